"""Best-effort conversion of COCO-style referring annotations into a dataset file.

The input is one JSON document with `images`, `annotations` (COCO `bbox` as
`[x, y, width, height]`) and `refs` entries carrying `ref_id`, `ann_id`,
`image_id`, `split` and a list of `sentences` (`{"sent": ...}`).
"""

# Copyright (c) 2025 Linus Held. All rights reserved.

import json
import logging
from pathlib import Path
from typing import Optional, Union

from ..errors import ReportIOError
from ..geometry import PixelBox
from .dataset import DatasetRecord, write_dataset

logger = logging.getLogger(__name__)


def convert_referring_annotations(
    annotation_path: Union[str, Path],
    image_dir: Union[str, Path],
    out_path: Union[str, Path],
    split: Optional[str] = None,
) -> list[DatasetRecord]:
    """Writes one dataset record per referring sentence.

    Refs pointing to unknown images or annotations, and degenerate boxes, are
    skipped with a warning.

    Args:
        annotation_path (Union[str, Path]): The annotation JSON document.
        image_dir (Union[str, Path]): Directory holding the images named by
            `images[].file_name`.
        out_path (Union[str, Path]): Destination dataset file.
        split (Optional[str]): Keep only refs of this split.

    Returns:
        list[DatasetRecord]: The written records.

    Raises:
        ReportIOError: If the annotation file cannot be read or parsed.
    """
    try:
        with open(annotation_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportIOError(f"Cannot read annotations '{annotation_path}': {exc}") from exc

    images = {image["id"]: image["file_name"] for image in data.get("images", [])}
    boxes = {ann["id"]: ann["bbox"] for ann in data.get("annotations", [])}

    records = []
    skipped = 0
    for ref in data.get("refs", []):
        if split is not None and ref.get("split") != split:
            continue
        file_name = images.get(ref.get("image_id"))
        bbox = boxes.get(ref.get("ann_id"))
        if file_name is None or bbox is None:
            skipped += 1
            continue
        x, y, w, h = (float(v) for v in bbox)
        try:
            gt_box = PixelBox(x, y, x + w, y + h)
        except ValueError:
            skipped += 1
            continue
        for position, sentence in enumerate(ref.get("sentences", [])):
            text = sentence.get("sent", "").strip() if isinstance(sentence, dict) else str(sentence).strip()
            if text:
                records.append(DatasetRecord(f"{ref['ref_id']}_{position}", str(Path(image_dir) / file_name), text, gt_box, ref.get("split", "unknown")))

    if skipped:
        logger.warning("Skipped %d ref(s) with unknown image, unknown annotation or empty box", skipped)
    write_dataset(records, out_path)
    logger.info("Converted %d referring sentence(s) into %s", len(records), out_path)
    return records

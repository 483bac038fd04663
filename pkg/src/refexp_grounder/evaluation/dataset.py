"""Referring-expression dataset files: one JSON record per line."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from PIL import Image
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from ..errors import DatasetParseError, MissingImageError, ReportIOError
from ..geometry import ImageDims, PixelBox

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DatasetRecord:
    """One (image, query, ground-truth box) sample.

    Attributes:
        sample_id (str): Unique sample id.
        image_path (str): Image location; `load_dataset` resolves it against
            the dataset file's directory.
        query (str): The referring expression.
        gt_box (PixelBox): Ground-truth box in top-left-origin pixels.
        split (str): Dataset split name.
    """

    sample_id: str
    image_path: str
    query: str
    gt_box: PixelBox
    split: str

    def to_dict(self) -> dict:
        return {"sample_id": self.sample_id, "image_path": self.image_path, "query": self.query, "gt_box": self.gt_box.to_list(), "split": self.split}


class _DatasetRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sample_id: str
    image_path: str
    query: str
    gt_box: list[float]
    split: str

    @field_validator("sample_id", "image_path", "query", "split")
    @classmethod
    def _non_empty(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("must not be empty")
        return value

    @field_validator("gt_box")
    @classmethod
    def _valid_box(cls, value: list[float]) -> list[float]:
        PixelBox.from_list(value)
        return value


def _parse_line(line: str, line_number: int, base_dir: Path, check_images: bool) -> DatasetRecord:
    try:
        row = _DatasetRow.model_validate(json.loads(line))
    except json.JSONDecodeError as exc:
        raise DatasetParseError(line_number, f"invalid JSON: {exc.msg}") from exc
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'record'}: {err['msg']}" for err in exc.errors())
        raise DatasetParseError(line_number, problems) from exc

    image_path = Path(row.image_path)
    if not image_path.is_absolute():
        image_path = base_dir / image_path
    gt_box = PixelBox.from_list(row.gt_box)

    if check_images:
        if not image_path.is_file():
            raise MissingImageError(f"line {line_number}: image '{image_path}' does not exist")
        with Image.open(image_path) as img:
            dims = ImageDims(*img.size)
        if not gt_box.fits_within(dims):
            raise DatasetParseError(line_number, f"gt_box {row.gt_box} exceeds image {dims.width}x{dims.height}")

    return DatasetRecord(row.sample_id, str(image_path), row.query, gt_box, row.split)


def load_dataset(path: Union[str, Path], strict: bool = True, check_images: bool = True) -> list[DatasetRecord]:
    """Loads and validates a dataset file.

    Each non-blank line holds `{sample_id, image_path, query, gt_box, split}`
    with `gt_box = [x_min, y_min, x_max, y_max]` in top-left-origin pixels.
    Relative image paths resolve against the dataset file's directory.

    Args:
        path (Union[str, Path]): The dataset file.
        strict (bool): Raise on the first invalid line; otherwise log and skip it.
        check_images (bool): Verify that images exist and contain the gt_box.

    Returns:
        list[DatasetRecord]: The records in file order.

    Raises:
        DatasetParseError: On a malformed line or a duplicate sample id.
        MissingImageError: If a referenced image does not exist.
        ReportIOError: If the file cannot be read.
    """
    dataset_path = Path(path)
    try:
        lines = dataset_path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ReportIOError(f"Cannot read dataset '{dataset_path}': {exc}") from exc

    records = []
    seen = set()
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = _parse_line(line, line_number, dataset_path.parent, check_images)
            if record.sample_id in seen:
                raise DatasetParseError(line_number, f"duplicate sample_id '{record.sample_id}'")
        except (DatasetParseError, MissingImageError) as exc:
            if strict:
                raise
            logger.warning("Skipping dataset %s %s", dataset_path.name, exc)
            continue
        seen.add(record.sample_id)
        records.append(record)

    logger.info("Loaded %d records from %s", len(records), dataset_path)
    return records


def write_dataset(records: list[DatasetRecord], path: Union[str, Path]):
    """Writes records as one JSON object per line.

    Raises:
        ReportIOError: If the file cannot be written.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for record in records:
                f.write(json.dumps(record.to_dict()) + "\n")
    except OSError as exc:
        raise ReportIOError(f"Cannot write dataset '{path}': {exc}") from exc

"""Parsing of chain-of-thought selection replies."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import re
from typing import Iterable, Optional

from .types import ParseQuality, ReasoningTrace

DEFAULT_REJECTION_TOKENS: tuple[str, ...] = ("none", "no match", "reject")

_STEP = re.compile(r"^\s*Reasoning Step\s*(\d+)\s*:\s*(.*)$", re.IGNORECASE)
_ANSWER = re.compile(r"^\s*\**\s*Answer\s*\**\s*:\s*\**\s*(.*?)\s*$", re.IGNORECASE)
# Integers not glued to words or decimals: "2" in "candidate 2." but not in "0.200".
_STANDALONE_INT = re.compile(r"(?<![\w.])(\d+)(?!\w)(?!\.\d)")


def _token_pattern(token: str) -> re.Pattern:
    return re.compile(r"(?<![a-z])" + re.escape(token.lower()) + r"(?![a-z])", re.IGNORECASE)


def _mentions_refusal(text: str, patterns: list[re.Pattern]) -> bool:
    return any(p.search(text) for p in patterns)


def _starts_with_refusal(text: str, patterns: list[re.Pattern]) -> bool:
    stripped = text.strip(" *`\"'[](").lower()
    return any(p.match(stripped) for p in patterns)


def _last_int(text: str) -> Optional[int]:
    found = _STANDALONE_INT.findall(text)
    return int(found[-1]) if found else None


def parse_reasoning_trace(raw: str, n_candidates: int, rejection_tokens: Iterable[str] = DEFAULT_REJECTION_TOKENS) -> ReasoningTrace:
    """Extracts steps and the final answer from a selection reply.

    The last `Answer:` line wins. It yields a CLEAN trace when it carries a
    refusal token or an integer. Without a usable `Answer:` line the last
    standalone integer outside the step headers is taken as a FALLBACK answer;
    failing that, a refusal token anywhere in the reply is a FALLBACK rejection.
    Indices outside 1..n_candidates make the trace UNPARSEABLE.

    Args:
        raw (str): The model reply.
        n_candidates (int): Number of candidates listed in the prompt.
        rejection_tokens (Iterable[str]): Case-insensitive refusal phrases.

    Returns:
        ReasoningTrace: The parsed trace; parse failures are encoded in its quality.

    Raises:
        ValueError: If n_candidates is below 1.
    """
    if n_candidates < 1:
        raise ValueError(f"n_candidates must be at least 1, got {n_candidates}.")
    patterns = [_token_pattern(token) for token in rejection_tokens if token.strip()]

    steps = []
    answer_text = None
    body_lines = []
    for line in raw.splitlines():
        step = _STEP.match(line)
        if step:
            steps.append(step.group(2).strip())
            body_lines.append(step.group(2))
            continue
        answer = _ANSWER.match(line)
        if answer:
            answer_text = answer.group(1)
        body_lines.append(line)
    steps = tuple(steps)

    def trace(answer: Optional[int], rejected: bool, quality: ParseQuality) -> ReasoningTrace:
        return ReasoningTrace(raw, steps, answer, rejected, quality)

    def in_range(index: int) -> bool:
        return 1 <= index <= n_candidates

    if answer_text is not None:
        if _starts_with_refusal(answer_text, patterns):
            return trace(None, True, ParseQuality.CLEAN)
        first = _STANDALONE_INT.search(answer_text)
        if first:
            index = int(first.group(1))
            return trace(index, False, ParseQuality.CLEAN) if in_range(index) else trace(None, False, ParseQuality.UNPARSEABLE)
        if _mentions_refusal(answer_text, patterns):
            return trace(None, True, ParseQuality.CLEAN)

    index = _last_int("\n".join(body_lines))
    if index is not None:
        return trace(index, False, ParseQuality.FALLBACK) if in_range(index) else trace(None, False, ParseQuality.UNPARSEABLE)
    if _mentions_refusal(raw, patterns):
        return trace(None, True, ParseQuality.FALLBACK)
    return trace(None, False, ParseQuality.UNPARSEABLE)

"""Character-span error annotations shared by the judge, the human annotation
service, and the metrics layer.

A span marks a half-open character range ``[start, end)`` of an output text
and carries an error category. Spans from automatic judging also record how
they were aligned to the text; spans from human annotators carry the id of
whoever marked them on the enclosing annotation record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class ErrorCategory(Enum):
    """Error taxonomy, stable integer codes 0 through 3."""

    INCORRECT = 0
    NOT_CHECKABLE = 1
    MISLEADING = 2
    OTHER = 3

    @property
    def code(self) -> int:
        return self.value

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @classmethod
    def from_code(cls, code: int) -> "ErrorCategory":
        return cls(code)


_DISPLAY_NAMES = {
    ErrorCategory.INCORRECT: "Incorrect",
    ErrorCategory.NOT_CHECKABLE: "Not checkable",
    ErrorCategory.MISLEADING: "Misleading",
    ErrorCategory.OTHER: "Other",
}

CATEGORIES = tuple(ErrorCategory)


@dataclass
class ErrorSpan:
    """One marked error: a character range plus category and rationale.

    ``aligned_via`` records how the range was located in the text:
    "monotonic" for a forward-cursor match, "fallback" for a full-text
    retry from the start, "manual" for a human-drawn span.
    """

    start: int
    end: int
    category: ErrorCategory
    reason: str = ""
    aligned_via: str = "manual"

    def slice(self, text: str) -> str:
        return text[self.start : self.end]

    def overlaps(self, start: int, end: int) -> bool:
        return self.start < end and self.end > start

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "category": self.category.code,
            "reason": self.reason,
            "aligned_via": self.aligned_via,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ErrorSpan":
        return cls(
            start=int(data["start"]),
            end=int(data["end"]),
            category=ErrorCategory.from_code(int(data["category"])),
            reason=data.get("reason", ""),
            aligned_via=data.get("aligned_via", "manual"),
        )


def validate_spans(spans: list[ErrorSpan], text_length: int) -> list[str]:
    """Check span bounds against a text length; returns issue strings."""
    issues = []
    for index, span in enumerate(spans):
        if span.start < 0 or span.end > text_length:
            issues.append(f"span {index} out of bounds: [{span.start}, {span.end}) vs length {text_length}")
        if span.start >= span.end:
            issues.append(f"span {index} is empty or inverted: [{span.start}, {span.end})")
    return issues


@dataclass
class SpanAnnotation:
    """All spans one source (a judge or one annotator) marked on one output.

    ``failures`` holds error mentions that could not be located in the text,
    as dicts with "reason", "text", and "category" keys; human annotations
    have none by construction.
    """

    example_id: str
    model_id: str
    spans: list[ErrorSpan] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    annotator_id: str | None = None
    duration: float | None = None

    def to_dict(self) -> dict:
        data = {
            "example_id": self.example_id,
            "model_id": self.model_id,
            "spans": [span.to_dict() for span in self.spans],
            "failures": self.failures,
        }
        if self.annotator_id is not None:
            data["annotator_id"] = self.annotator_id
        if self.duration is not None:
            data["duration"] = self.duration
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SpanAnnotation":
        return cls(
            example_id=data["example_id"],
            model_id=data["model_id"],
            spans=[ErrorSpan.from_dict(s) for s in data.get("spans", [])],
            failures=list(data.get("failures", [])),
            annotator_id=data.get("annotator_id"),
            duration=data.get("duration"),
        )


def save_annotations(path: str | Path, annotations: list[SpanAnnotation]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for annotation in annotations:
            handle.write(json.dumps(annotation.to_dict(), ensure_ascii=False) + "\n")


def load_annotations(path: str | Path) -> list[SpanAnnotation]:
    annotations = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                annotations.append(SpanAnnotation.from_dict(json.loads(line)))
    return annotations

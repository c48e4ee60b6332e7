"""Storage and workflow rules for human span annotations.

Annotations are accepted per output as annotators work, so nothing is
lost on a dropped connection; a batch only counts once it is finalized,
and only finalized batches are exported. Resubmitting an output inside
an open batch overwrites, keeping the previous version in an audit
trail.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field

from ..errors import ConfigurationError, SubmissionError, WorkflowError
from ..spans import SpanAnnotation, validate_spans
from .campaign import Campaign, OutputRef

EXPORT_KIND = "span_annotations"


@dataclass
class StoredAnnotation:
    annotation: SpanAnnotation
    batch_id: str
    submitted_at: float
    previous: list[dict] = field(default_factory=list)


class AnnotationStore:
    """In-memory annotation state for one service process.

    ``texts`` maps (example_id, model_id) to the exact generated text the
    spans index into; span bounds are checked against it on every
    submission.
    """

    def __init__(self, texts: dict[tuple[str, str], str], clock=time.time):
        self.texts = dict(texts)
        self.clock = clock
        self._records: dict[tuple[str, str, str], StoredAnnotation] = {}
        self._lock = threading.Lock()

    def get(self, batch_id: str, example_id: str, model_id: str) -> SpanAnnotation | None:
        stored = self._records.get((batch_id, example_id, model_id))
        return stored.annotation if stored else None

    def submit(self, campaign: Campaign, batch_id: str, annotation: SpanAnnotation) -> None:
        batch = campaign.batch(batch_id)
        if not annotation.annotator_id:
            raise SubmissionError("annotation carries no annotator_id")
        if batch.annotator_id != annotation.annotator_id:
            raise SubmissionError(
                f"batch {batch_id} is not assigned to {annotation.annotator_id!r}"
            )
        if batch.completed:
            raise SubmissionError(f"batch {batch_id} is already finalized")
        ref = OutputRef(annotation.example_id, annotation.model_id)
        if ref not in batch.items:
            raise SubmissionError(
                f"{annotation.example_id}/{annotation.model_id} is not part of batch {batch_id}"
            )
        text = self.texts.get((annotation.example_id, annotation.model_id))
        if text is None:
            raise SubmissionError(
                f"no generated text on record for {annotation.example_id}/{annotation.model_id}"
            )
        issues = validate_spans(annotation.spans, len(text))
        if issues:
            raise SubmissionError("; ".join(issues))

        key = (batch_id, annotation.example_id, annotation.model_id)
        with self._lock:
            now = self.clock()
            existing = self._records.get(key)
            if existing is None:
                self._records[key] = StoredAnnotation(annotation, batch_id, now)
            else:
                existing.previous.append(
                    {
                        "annotation": existing.annotation.to_dict(),
                        "submitted_at": existing.submitted_at,
                        "replaced_at": now,
                    }
                )
                existing.annotation = annotation
                existing.submitted_at = now

    def progress(self, campaign: Campaign, batch_id: str) -> dict:
        batch = campaign.batch(batch_id)
        done = sum(
            1
            for item in batch.items
            if (batch_id, item.example_id, item.model_id) in self._records
        )
        return {"done": done, "total": len(batch.items), "completed": batch.completed}

    def finalize(self, campaign: Campaign, batch_id: str, annotator_id: str) -> None:
        """Close a batch; requires every output in it to be annotated."""
        batch = campaign.batch(batch_id)
        if batch.annotator_id != annotator_id:
            raise WorkflowError(f"batch {batch_id} is not assigned to {annotator_id!r}")
        missing = [
            item
            for item in batch.items
            if (batch_id, item.example_id, item.model_id) not in self._records
        ]
        if missing:
            raise WorkflowError(
                f"batch {batch_id} has {len(missing)} unannotated output(s), "
                f"first: {missing[0].example_id}/{missing[0].model_id}"
            )
        batch.completed = True

    def export_jsonl(self, campaign: Campaign) -> str:
        """Finalized batches as JSONL: one metadata header, then one
        annotation per line in batch order."""
        complete = [batch for batch in campaign.batches if batch.completed]
        lines = [
            json.dumps(
                {
                    "kind": EXPORT_KIND,
                    "campaign": campaign.id,
                    "batch_size": campaign.batch_size,
                    "seed": campaign.seed,
                    "batches": [batch.id for batch in complete],
                },
                sort_keys=True,
            )
        ]
        for batch in complete:
            for item in batch.items:
                stored = self._records[(batch.id, item.example_id, item.model_id)]
                payload = stored.annotation.to_dict()
                payload["batch_id"] = batch.id
                lines.append(json.dumps(payload, sort_keys=True))
        return "\n".join(lines) + "\n"


@dataclass
class AnnotationExport:
    campaign_id: str
    batch_size: int
    seed: int
    batches: list[str]
    annotations: list[tuple[str, SpanAnnotation]]


def load_export(text: str) -> AnnotationExport:
    """Parse an export produced by :meth:`AnnotationStore.export_jsonl`."""
    lines = [line for line in text.split("\n") if line.strip()]
    if not lines:
        raise ConfigurationError("empty annotation export")
    header = json.loads(lines[0])
    if header.get("kind") != EXPORT_KIND:
        raise ConfigurationError(f"not an annotation export: kind={header.get('kind')!r}")
    annotations = []
    for line in lines[1:]:
        payload = json.loads(line)
        batch_id = payload.pop("batch_id")
        annotations.append((batch_id, SpanAnnotation.from_dict(payload)))
    return AnnotationExport(
        campaign_id=header["campaign"],
        batch_size=header["batch_size"],
        seed=header["seed"],
        batches=list(header["batches"]),
        annotations=annotations,
    )

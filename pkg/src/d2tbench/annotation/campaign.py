"""Campaign planning: who annotates which generated outputs, in batches.

A campaign covers the full cross of models and domains, split into
balanced batches. A configurable share of outputs is planned twice in
dedicated overlap batches so agreement between annotators can be
measured; assignment guarantees nobody sees the same output twice.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field

from ..corpus import domain_of_example_id
from ..errors import ConfigurationError, ExhaustionError

PRIMARY = "primary"
OVERLAP = "overlap"


@dataclass(frozen=True)
class OutputRef:
    """One generated output: an example and the model that wrote for it."""

    example_id: str
    model_id: str

    def to_dict(self) -> dict:
        return {"example_id": self.example_id, "model_id": self.model_id}

    @classmethod
    def from_dict(cls, payload: dict) -> OutputRef:
        return cls(example_id=payload["example_id"], model_id=payload["model_id"])


@dataclass
class Batch:
    id: str
    items: list[OutputRef]
    kind: str = PRIMARY
    annotator_id: str | None = None
    completed: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "items": [item.to_dict() for item in self.items],
            "kind": self.kind,
            "annotator_id": self.annotator_id,
            "completed": self.completed,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> Batch:
        return cls(
            id=payload["id"],
            items=[OutputRef.from_dict(item) for item in payload["items"]],
            kind=payload.get("kind", PRIMARY),
            annotator_id=payload.get("annotator_id"),
            completed=payload.get("completed", False),
        )


@dataclass
class Campaign:
    id: str
    batches: list[Batch]
    batch_size: int
    seed: int
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def batch(self, batch_id: str) -> Batch:
        for batch in self.batches:
            if batch.id == batch_id:
                return batch
        raise ConfigurationError(f"{self.id}: unknown batch {batch_id!r}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "batches": [batch.to_dict() for batch in self.batches],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> Campaign:
        return cls(
            id=payload["id"],
            batches=[Batch.from_dict(b) for b in payload["batches"]],
            batch_size=payload["batch_size"],
            seed=payload["seed"],
        )


def _check_composition(outputs: list[OutputRef]) -> None:
    """Every model must cover every domain, or percentages per cell stop
    being comparable."""
    models = sorted({ref.model_id for ref in outputs})
    domains = sorted({domain_of_example_id(ref.example_id).value for ref in outputs})
    seen = {(ref.model_id, domain_of_example_id(ref.example_id).value) for ref in outputs}
    missing = [
        f"{model}/{domain}"
        for model in models
        for domain in domains
        if (model, domain) not in seen
    ]
    if missing:
        raise ConfigurationError(
            f"incomplete model/domain grid, missing: {', '.join(missing[:5])}"
        )


def _balanced_chunks(items: list, size: int) -> list[list]:
    count = math.ceil(len(items) / size)
    base, extra = divmod(len(items), count)
    chunks, start = [], 0
    for i in range(count):
        width = base + (1 if i < extra else 0)
        chunks.append(items[start : start + width])
        start += width
    return chunks


def build_campaign(
    campaign_id: str,
    outputs: list[OutputRef],
    batch_size: int = 20,
    seed: int = 0,
    overlap: int = 0,
) -> Campaign:
    """Partition outputs into balanced annotation batches.

    ``overlap`` outputs are drawn again into dedicated overlap batches,
    so they end up annotated by two different people. The plan is fully
    determined by the inputs and the seed.
    """
    if batch_size < 1:
        raise ConfigurationError("batch_size must be positive")
    if not outputs:
        raise ConfigurationError("campaign has no outputs to annotate")
    if len(set(outputs)) != len(outputs):
        raise ConfigurationError("duplicate outputs in campaign")
    if not 0 <= overlap <= len(outputs):
        raise ConfigurationError(
            f"overlap {overlap} out of range for {len(outputs)} outputs"
        )
    _check_composition(outputs)

    rng = random.Random(seed)
    pool = sorted(outputs, key=lambda ref: (ref.example_id, ref.model_id))
    rng.shuffle(pool)

    batches = []
    for chunk in _balanced_chunks(pool, batch_size):
        batches.append(Batch(id=f"{campaign_id}-b{len(batches):04d}", items=chunk))
    if overlap:
        doubled = sorted(
            rng.sample(pool, overlap), key=lambda ref: (ref.example_id, ref.model_id)
        )
        for chunk in _balanced_chunks(doubled, batch_size):
            batches.append(
                Batch(id=f"{campaign_id}-b{len(batches):04d}", items=chunk, kind=OVERLAP)
            )
    return Campaign(id=campaign_id, batches=batches, batch_size=batch_size, seed=seed)


def assign_batch(campaign: Campaign, annotator_id: str) -> Batch:
    """Hand the annotator their current or next batch.

    Calling again before finishing returns the same batch. A batch is
    only eligible if none of its outputs were ever assigned to this
    annotator before, which keeps overlap annotations independent.
    """
    if not annotator_id:
        raise ConfigurationError("annotator_id must be non-empty")
    with campaign._lock:
        seen: set[OutputRef] = set()
        for batch in campaign.batches:
            if batch.annotator_id == annotator_id:
                if not batch.completed:
                    return batch
                seen.update(batch.items)
        for batch in campaign.batches:
            if batch.annotator_id is None and seen.isdisjoint(batch.items):
                batch.annotator_id = annotator_id
                return batch
        raise ExhaustionError(
            f"{campaign.id}: no assignable batch left for {annotator_id!r}"
        )

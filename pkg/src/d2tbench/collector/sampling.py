"""Deterministic dev/test sampling from a collected pool."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..corpus import DataRecord, Domain, make_record_id
from ..errors import SamplingError
from .base import RawItem


@dataclass
class SampleSpec:
    """How many records each split gets and how the draw is seeded.

    ``allow_shortfall`` admits a pool smaller than dev+test: dev fills
    first and test takes whatever remains. The default is strict, because
    a silently short benchmark skews every downstream percentage.
    """

    dev: int = 100
    test: int = 100
    seed: int = 0
    allow_shortfall: bool = False


def sample_split(items: list[RawItem], domain: Domain, spec: SampleSpec) -> list[DataRecord]:
    """Draw disjoint dev and test samples, reproducibly.

    The pool is ordered by source key and shuffled with the seed, so the
    same pool and seed always produce the same split regardless of the
    collection order. Records are renumbered per split in drawn order.
    """
    keys = [item.key for item in items]
    if len(set(keys)) != len(keys):
        duplicates = sorted({key for key in keys if keys.count(key) > 1})
        raise SamplingError(f"{domain.value}: duplicate keys in pool: {duplicates[:5]}")

    pool = sorted(items, key=lambda item: item.key)
    needed = spec.dev + spec.test
    if len(pool) < needed and not spec.allow_shortfall:
        raise SamplingError(
            f"{domain.value}: pool has {len(pool)} items, need {needed} "
            f"(dev {spec.dev} + test {spec.test})"
        )

    rng = random.Random(spec.seed)
    rng.shuffle(pool)

    records = []
    for split, count, offset in (("dev", spec.dev, 0), ("test", spec.test, spec.dev)):
        for ordinal, item in enumerate(pool[offset : offset + count]):
            records.append(
                DataRecord(
                    id=make_record_id(domain, split, ordinal),
                    domain=domain,
                    split=split,
                    format=domain.format,
                    content=item.content,
                    provenance={**item.provenance, "source_key": item.key},
                )
            )
    return records

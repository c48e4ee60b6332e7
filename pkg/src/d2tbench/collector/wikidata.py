"""Entity description collection from a collaborative knowledge graph.

Entities are rendered to Markdown: an H1 title followed by one bullet
per property. Entities keep between MIN_PROPERTIES and MAX_PROPERTIES
properties; sparser entities are skipped, denser ones are sampled down
without reordering.
"""

from __future__ import annotations

import logging
import random
import time

from ..corpus import Domain
from ..errors import SourceError, SpecError
from .base import LIVE, RawItem, SourceConfig, replay_items
from .pacing import RateLimiter
from .transport import fetch, http_get

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://www.wikidata.org/w/api.php"
REQUESTS_PER_MINUTE = 30
MIN_PROPERTIES = 2
MAX_PROPERTIES = 10
LABEL_BATCH = 50

_MONTHS = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)


def format_entity(title: str, pairs: list[tuple[str, str]]) -> str:
    lines = [f"# {title}", ""]
    lines.extend(f"- {name}: {value}" for name, value in pairs)
    return "\n".join(lines)


def select_properties(pairs: list[tuple[str, str]], rng: random.Random) -> list[tuple[str, str]] | None:
    """Apply the property-count rule, preserving source order.

    Returns None when the entity is too sparse to keep.
    """
    if len(pairs) < MIN_PROPERTIES:
        return None
    if len(pairs) <= MAX_PROPERTIES:
        return list(pairs)
    keep = sorted(rng.sample(range(len(pairs)), MAX_PROPERTIES))
    return [pairs[i] for i in keep]


def _render_time(value: dict) -> str | None:
    # Timestamps look like "+1867-11-07T00:00:00Z"; precision 11 is a
    # day, 10 a month, 9 a year.
    stamp = value.get("time", "")
    precision = value.get("precision", 11)
    try:
        date = stamp.lstrip("+").split("T")[0]
        year, month, day = date.split("-")
        year_n, month_n, day_n = int(year), int(month), int(day)
    except (ValueError, AttributeError):
        return None
    if precision >= 11 and month_n and day_n:
        return f"{day_n} {_MONTHS[month_n - 1]} {year_n}"
    if precision == 10 and month_n:
        return f"{_MONTHS[month_n - 1]} {year_n}"
    return str(year_n)


def _render_snak(snak: dict) -> str | None:
    """Render one claim value to text, or None for types we skip.

    Entity references come back as a placeholder carrying the target id;
    the caller resolves those to labels in a second pass.
    """
    if snak.get("snaktype") != "value":
        return None
    value = snak.get("datavalue", {}).get("value")
    kind = snak.get("datavalue", {}).get("type")
    if kind == "string":
        return value if isinstance(value, str) else None
    if kind == "monolingualtext":
        return value.get("text") if isinstance(value, dict) else None
    if kind == "time":
        return _render_time(value) if isinstance(value, dict) else None
    if kind == "quantity":
        if not isinstance(value, dict):
            return None
        amount = str(value.get("amount", "")).lstrip("+")
        return amount or None
    if kind == "wikibase-entityid":
        if isinstance(value, dict) and value.get("id"):
            return "\x00" + value["id"]
        return None
    return None


def _resolve_labels(ids, base, transport, limiter, sleep, headers):
    labels = {}
    todo = sorted(ids)
    for start in range(0, len(todo), LABEL_BATCH):
        batch = todo[start : start + LABEL_BATCH]
        body = fetch(
            transport,
            base,
            params={
                "action": "wbgetentities",
                "ids": "|".join(batch),
                "props": "labels",
                "languages": "en",
                "format": "json",
            },
            headers=headers,
            limiter=limiter,
            sleep=sleep,
            source="wikidata",
        )
        if not isinstance(body, dict):
            raise SourceError("wikidata: label lookup did not return JSON")
        for qid, entity in body.get("entities", {}).items():
            label = entity.get("labels", {}).get("en", {}).get("value")
            if label:
                labels[qid] = label
    return labels


def collect_wikidata(
    config: SourceConfig,
    transport=http_get,
    entity_ids: tuple[str, ...] = (),
    sleep=time.sleep,
) -> list[RawItem]:
    if config.mode != LIVE:
        return replay_items(config, Domain.WIKIDATA)
    if not entity_ids:
        raise SpecError("wikidata: no entity ids requested")

    base = config.base_url or DEFAULT_BASE_URL
    limiter = RateLimiter(config.rate_limit or REQUESTS_PER_MINUTE, 60.0, sleep=sleep)
    headers = {"User-Agent": "d2tbench/0.1 (benchmark corpus builder)"}
    rng = random.Random(config.seed)

    raw_entities = {}
    todo = list(entity_ids)
    for start in range(0, len(todo), LABEL_BATCH):
        batch = todo[start : start + LABEL_BATCH]
        body = fetch(
            transport,
            base,
            params={
                "action": "wbgetentities",
                "ids": "|".join(batch),
                "props": "labels|claims",
                "languages": "en",
                "format": "json",
            },
            headers=headers,
            limiter=limiter,
            sleep=sleep,
            source="wikidata",
        )
        if not isinstance(body, dict) or "entities" not in body:
            raise SourceError("wikidata: entity lookup did not return JSON entities")
        raw_entities.update(body["entities"])

    # First pass: render values, remembering which entity ids need labels.
    pending: dict[str, list[tuple[str, list[str]]]] = {}
    titles: dict[str, str] = {}
    referenced: set[str] = set()
    for qid in entity_ids:
        entity = raw_entities.get(qid)
        if not isinstance(entity, dict) or "missing" in entity:
            log.warning("wikidata: entity %s not found, skipping", qid)
            continue
        title = entity.get("labels", {}).get("en", {}).get("value")
        if not title:
            log.warning("wikidata: entity %s has no English label, skipping", qid)
            continue
        pairs = []
        for pid, claims in entity.get("claims", {}).items():
            values = []
            for claim in claims:
                rendered = _render_snak(claim.get("mainsnak", {}))
                if rendered is not None:
                    values.append(rendered)
            if values:
                pairs.append((pid, values))
                for v in values:
                    if v.startswith("\x00"):
                        referenced.add(v[1:])
        if pairs:
            titles[qid] = title
            pending[qid] = pairs
            referenced.update(pid for pid, _ in pairs)

    # Property ids and referenced entity ids both resolve via labels.
    labels = _resolve_labels(referenced, base, transport, limiter, sleep, headers)

    items = []
    for qid, pairs in pending.items():
        resolved = []
        for pid, values in pairs:
            name = labels.get(pid)
            if not name:
                continue
            texts = []
            for v in values:
                if v.startswith("\x00"):
                    label = labels.get(v[1:])
                    if label:
                        texts.append(label)
                else:
                    texts.append(v)
            if texts:
                resolved.append((name, ", ".join(texts)))
        kept = select_properties(resolved, rng)
        if kept is None:
            log.warning("wikidata: entity %s too sparse (%d properties), skipping", qid, len(resolved))
            continue
        items.append(
            RawItem(
                key=qid,
                content=format_entity(titles[qid], kept),
                provenance={"source": "wikidata", "entity": qid},
            )
        )
    return sorted(items, key=lambda item: item.key)

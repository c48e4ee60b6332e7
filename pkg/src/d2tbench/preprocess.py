"""Input-side preparation before prompting: drop noisy fields, annotate
units, and thin long series so the serialized input fits a token budget.

All operations are pure: they return new content documents and leave the
input untouched.
"""

from __future__ import annotations

import configparser
import logging
import re
from copy import deepcopy
from dataclasses import dataclass, field
from fnmatch import fnmatchcase
from pathlib import Path

from .corpus import (
    BenchmarkSet,
    Content,
    CsvDocument,
    DataFormat,
    DataRecord,
    Domain,
    serialize_content,
)
from .errors import BudgetError, PreprocessError

log = logging.getLogger(__name__)

DEFAULT_TOKEN_BUDGET = 8000

# Letter runs count once; every digit and every other non-space character
# counts alone. Deliberately pessimistic for numbers, which subword
# vocabularies split hard.
_TOKEN_RE = re.compile(r"[^\W\d_]+|\d|\S")

# Only these domains carry a homogeneous series that can be thinned without
# changing what the data is about.
SERIES_DOMAINS = (Domain.OPENWEATHER, Domain.OWID)


def estimate_tokens(text: str) -> int:
    """Rough subword count of ``text``, independent of any model tokenizer."""
    return len(_TOKEN_RE.findall(text))


def _format_of(content: Content) -> DataFormat:
    if isinstance(content, CsvDocument):
        return DataFormat.CSV
    if isinstance(content, str):
        return DataFormat.MARKDOWN
    return DataFormat.JSON


def _matches(path: str, patterns: list[str], matched: set[str]) -> bool:
    hit = False
    for pattern in patterns:
        if fnmatchcase(path, pattern):
            matched.add(pattern)
            hit = True
    return hit


def _filter_json(node, prefix: str, patterns: list[str], matched: set[str]):
    if isinstance(node, dict):
        kept = {}
        for key, value in node.items():
            path = f"{prefix}.{key}" if prefix else key
            if not _matches(path, patterns, matched):
                kept[key] = _filter_json(value, path, patterns, matched)
        return kept
    if isinstance(node, list):
        kept = []
        for index, value in enumerate(node):
            path = f"{prefix}.{index}" if prefix else str(index)
            if not _matches(path, patterns, matched):
                kept.append(_filter_json(value, path, patterns, matched))
        return kept
    return node


def filter_fields(content: Content, patterns: list[str]) -> Content:
    """Drop fields whose path matches any glob pattern.

    JSON paths are dotted key chains with list positions as numeric segments
    ("list.3.main.temp"); ``*`` crosses segment boundaries, so ``*.logoUrl``
    removes the key at any depth while a bare ``id`` only removes it at top
    level. For CSV the patterns address column names, for Markdown the
    bullet keys. A pattern that matches nothing logs a warning.
    """
    if not patterns:
        return deepcopy(content)
    matched: set[str] = set()

    if isinstance(content, CsvDocument):
        drop = [i for i, name in enumerate(content.header) if _matches(name, patterns, matched)]
        keep = [i for i in range(len(content.header)) if i not in drop]
        result: Content = CsvDocument(
            comments=list(content.comments),
            header=[content.header[i] for i in keep],
            rows=[[row[i] for i in keep if i < len(row)] for row in content.rows],
        )
    elif isinstance(content, str):
        lines = []
        for line in content.split("\n"):
            if line.startswith("- ") and ":" in line:
                key = line[2:].split(":", 1)[0].strip()
                if _matches(key, patterns, matched):
                    continue
            lines.append(line)
        result = "\n".join(lines)
    else:
        result = _filter_json(deepcopy(content), "", patterns, matched)

    for pattern in patterns:
        if pattern not in matched:
            log.warning("filter pattern %r matched nothing", pattern)
    return result


def _annotate_json(node, prefix: str, units: dict[str, str]):
    if isinstance(node, dict):
        return {
            key: _annotate_json(value, f"{prefix}.{key}" if prefix else key, units)
            for key, value in node.items()
        }
    if isinstance(node, list):
        return [
            _annotate_json(value, f"{prefix}.{index}" if prefix else str(index), units)
            for index, value in enumerate(node)
        ]
    if isinstance(node, (int, float)) and not isinstance(node, bool):
        for pattern, unit in units.items():
            if fnmatchcase(prefix, pattern):
                return f"{node} {unit}"
    return node


def annotate_units(content: Content, units: dict[str, str]) -> Content:
    """Attach measurement units to bare numbers so readers need no schema.

    JSON: a numeric leaf whose path matches a pattern becomes the string
    ``"<value> <unit>"``; values that are already strings are left alone,
    which makes the operation idempotent. CSV: a matching column name
    guarantees a ``# unit:`` comment. Markdown: a matching bullet key gets
    the unit appended to its value unless already present.
    """
    if not units:
        return deepcopy(content)

    if isinstance(content, CsvDocument):
        result = CsvDocument(
            comments=list(content.comments),
            header=list(content.header),
            rows=[list(row) for row in content.rows],
        )
        has_unit = any(line.lstrip("#").strip().lower().startswith("unit") for line in result.comments)
        if not has_unit:
            for pattern, unit in units.items():
                if any(fnmatchcase(name, pattern) for name in result.header):
                    result.comments.append(f"# unit: {unit}")
                    break
        return result

    if isinstance(content, str):
        lines = []
        for line in content.split("\n"):
            if line.startswith("- ") and ":" in line:
                key, value = line[2:].split(":", 1)
                for pattern, unit in units.items():
                    if fnmatchcase(key.strip(), pattern) and not value.rstrip().endswith(unit):
                        line = f"- {key}:{value.rstrip()} {unit}"
                        break
            lines.append(line)
        return "\n".join(lines)

    return _annotate_json(deepcopy(content), "", units)


def _locate_series(content: Content) -> list | None:
    if isinstance(content, CsvDocument):
        return content.rows
    if isinstance(content, list):
        return content
    if isinstance(content, dict):
        if isinstance(content.get("list"), list):
            return content["list"]
        lists = [value for value in content.values() if isinstance(value, list)]
        if lists:
            return max(lists, key=len)
    return None


def _evenly_spaced(items: list, count: int) -> list:
    total = len(items)
    if count >= total:
        return list(items)
    indices = dict.fromkeys(round(i * (total - 1) / (count - 1)) for i in range(count))
    return [items[i] for i in indices]


def downsample(
    content: Content, budget: int = DEFAULT_TOKEN_BUDGET, estimator=estimate_tokens
) -> tuple[Content, dict]:
    """Thin the content's series until its serialization fits ``budget``.

    Keeps evenly spaced elements with both endpoints pinned, choosing the
    largest density that fits. Content already within budget is returned
    unchanged, which makes the operation idempotent. Raises BudgetError
    when even two elements still exceed the budget.
    """
    fmt = _format_of(content)
    if estimator(serialize_content(fmt, content)) <= budget:
        return deepcopy(content), {}

    result = deepcopy(content)
    series = _locate_series(result)
    if series is None or len(series) < 2:
        raise BudgetError(f"content exceeds {budget} tokens and has no series to thin")
    original = list(series)
    total = len(original)

    def fits(count: int) -> bool:
        series[:] = _evenly_spaced(original, count)
        return estimator(serialize_content(fmt, result)) <= budget

    if not fits(2):
        raise BudgetError(f"content exceeds {budget} tokens even at two series elements")
    # Token count only shrinks as elements are removed, so fits() is
    # monotone and the largest fitting density can be bisected.
    low, high = 2, total
    while high - low > 1:
        mid = (low + high) // 2
        if fits(mid):
            low = mid
        else:
            high = mid
    series[:] = _evenly_spaced(original, low)
    return result, {"kept": len(series), "total": total}


@dataclass
class PreprocessConfig:
    """Per-domain preparation settings."""

    token_budget: int = DEFAULT_TOKEN_BUDGET
    remove: list[str] = field(default_factory=list)
    units: dict[str, str] = field(default_factory=dict)
    downsample: bool = True


def load_preprocess_config(path: str | Path) -> PreprocessConfig:
    """Read one domain's settings from an INI file.

    Layout: a ``[preprocess]`` section with ``token_budget`` and
    ``downsample``, a ``[remove]`` section with a multiline ``patterns``
    value, and a ``[units]`` section mapping path patterns to unit strings.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # unit paths are case-sensitive
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise PreprocessError(f"config not found: {path}")

    config = PreprocessConfig()
    if parser.has_section("preprocess"):
        section = parser["preprocess"]
        config.token_budget = section.getint("token_budget", DEFAULT_TOKEN_BUDGET)
        config.downsample = section.getboolean("downsample", True)
    if parser.has_section("remove"):
        patterns = parser.get("remove", "patterns", fallback="")
        config.remove = [line.strip() for line in patterns.split("\n") if line.strip()]
    if parser.has_section("units"):
        config.units = dict(parser["units"])
    return config


def load_config_dir(path: str | Path) -> dict[Domain, PreprocessConfig]:
    """Load ``<dir>/<domain>.ini`` for every domain, defaulting when absent."""
    path = Path(path)
    configs = {}
    for domain in Domain:
        file = path / f"{domain.value}.ini"
        configs[domain] = load_preprocess_config(file) if file.is_file() else PreprocessConfig()
    return configs


def preprocess_record(
    record: DataRecord, config: PreprocessConfig, estimator=estimate_tokens
) -> DataRecord:
    """Apply filtering, unit annotation, and budget enforcement to one record.

    Series domains are thinned to fit the budget; for the rest an
    over-budget input is an error, since dropping arbitrary facts would
    change what the text is supposed to say.
    """
    content = filter_fields(record.content, config.remove)
    content = annotate_units(content, config.units)

    note: dict = {}
    if config.remove:
        note["removed"] = list(config.remove)
    if config.downsample and record.domain in SERIES_DOMAINS:
        content, report = downsample(content, config.token_budget, estimator)
        if report:
            note["downsample"] = report
    else:
        used = estimator(serialize_content(record.format, content))
        if used > config.token_budget:
            raise BudgetError(
                f"{record.id}: {used} tokens exceed budget {config.token_budget}"
            )

    provenance = dict(record.provenance)
    if note:
        provenance["preprocess"] = note
    return DataRecord(
        id=record.id,
        domain=record.domain,
        split=record.split,
        format=record.format,
        content=content,
        provenance=provenance,
    )


def preprocess_benchmark(
    bset: BenchmarkSet,
    configs: dict[Domain, PreprocessConfig] | None = None,
    estimator=estimate_tokens,
) -> BenchmarkSet:
    configs = configs or {}
    records = [
        preprocess_record(record, configs.get(record.domain, PreprocessConfig()), estimator)
        for record in bset.records
    ]
    return BenchmarkSet(records=records, provenance=dict(bset.provenance))

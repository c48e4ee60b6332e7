"""Benchmark data model, on-disk layout, and validation.

A benchmark is a tree of record files, one file per structured-data input,
plus a manifest index:

    <root>/<domain>/<split>/<id>.<ext>     ext in {json, csv, md}
    <root>/manifest.json                   counts and provenance

Model outputs live outside the data tree as JSONL, one generation result
per line: ``out/<model>/<domain>/<split>.jsonl``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Union

from .errors import BenchmarkLoadError, CorpusError, ManifestError, RecordParseError

SPLITS = ("dev", "test")


class DataFormat(Enum):
    JSON = "json"
    CSV = "csv"
    MARKDOWN = "md"

    @property
    def extension(self) -> str:
        return self.value


class Domain(Enum):
    """The five benchmark domains, each tied to one task and one data format."""

    OPENWEATHER = "openweather"
    GSMARENA = "gsmarena"
    ICE_HOCKEY = "ice_hockey"
    OWID = "owid"
    WIKIDATA = "wikidata"

    @property
    def output_type(self) -> str:
        return _OUTPUT_TYPES[self]

    @property
    def format(self) -> DataFormat:
        return _FORMATS[self]

    @classmethod
    def from_id(cls, identifier: str) -> "Domain":
        try:
            return cls(identifier)
        except ValueError:
            raise CorpusError(f"unknown domain: {identifier!r}") from None


_OUTPUT_TYPES = {
    Domain.OPENWEATHER: "five-day weather forecast",
    Domain.GSMARENA: "product description",
    Domain.ICE_HOCKEY: "ice hockey game summary",
    Domain.OWID: "chart caption",
    Domain.WIKIDATA: "entity description",
}

_FORMATS = {
    Domain.OPENWEATHER: DataFormat.JSON,
    Domain.GSMARENA: DataFormat.JSON,
    Domain.ICE_HOCKEY: DataFormat.JSON,
    Domain.OWID: DataFormat.CSV,
    Domain.WIKIDATA: DataFormat.MARKDOWN,
}


@dataclass
class CsvDocument:
    """A CSV body with a leading ``#`` comment header.

    ``comments`` holds the verbatim comment lines (including the ``#``),
    ``header`` the column names, ``rows`` the data rows as strings.
    """

    comments: list[str] = field(default_factory=list)
    header: list[str] = field(default_factory=list)
    rows: list[list[str]] = field(default_factory=list)

    def metadata(self) -> dict[str, str]:
        """Parse ``# key: value`` comment lines into a dict (keys lowercased)."""
        meta = {}
        for line in self.comments:
            body = line.lstrip("#").strip()
            if ":" in body:
                key, value = body.split(":", 1)
                meta[key.strip().lower()] = value.strip()
        return meta


Content = Union[dict, list, CsvDocument, str]


def parse_content(fmt: DataFormat, text: str) -> Content:
    """Parse file text into the format-native content document.

    Raises ValueError when the text does not parse under ``fmt``.
    """
    if fmt is DataFormat.JSON:
        document = json.loads(text)
        if not isinstance(document, (dict, list)):
            raise ValueError("JSON content must be an object or an array")
        return document
    if fmt is DataFormat.CSV:
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        comments = []
        while lines and lines[0].startswith("#"):
            comments.append(lines.pop(0))
        try:
            reader = list(csv.reader(lines))
        except csv.Error as exc:
            raise ValueError(f"bad CSV body: {exc}") from exc
        header = reader[0] if reader else []
        return CsvDocument(comments=comments, header=header, rows=reader[1:])
    # Markdown is carried as text; normalize the trailing newline so that
    # parse(serialize(x) + "\n") round-trips exactly.
    return text.rstrip("\n")


def serialize_content(fmt: DataFormat, content: Content) -> str:
    """Canonical text form of a content document, without trailing newline."""
    if fmt is DataFormat.JSON:
        return json.dumps(content, ensure_ascii=False, indent=2)
    if fmt is DataFormat.CSV:
        if not isinstance(content, CsvDocument):
            raise CorpusError("CSV content must be a CsvDocument")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if content.header:
            writer.writerow(content.header)
        writer.writerows(content.rows)
        body = buf.getvalue().rstrip("\n")
        parts = list(content.comments)
        if body:
            parts.append(body)
        return "\n".join(parts)
    if not isinstance(content, str):
        raise CorpusError("Markdown content must be text")
    return content.rstrip("\n")


@dataclass
class DataRecord:
    """One structured input: a format-native document plus identity and provenance."""

    id: str
    domain: Domain
    split: str
    format: DataFormat
    content: Content
    provenance: dict = field(default_factory=dict)

    def serialized(self) -> str:
        return serialize_content(self.format, self.content)


def make_record_id(domain: Domain, split: str, ordinal: int) -> str:
    return f"{domain.value}-{split}-{ordinal:04d}"


def domain_of_example_id(example_id: str) -> Domain:
    """Recover the domain from a ``<domain>-<split>-<ordinal>`` id."""
    for domain in Domain:
        if example_id.startswith(domain.value + "-"):
            return domain
    raise CorpusError(f"example id {example_id!r} does not carry a known domain prefix")


def validate_record(record: DataRecord) -> list[str]:
    """Check one record against its type invariants.

    Returns a list of human-readable issues; an empty list means the record
    is valid. Issues are data, not failures: nothing is raised.
    """
    issues = []
    if not record.id:
        issues.append("empty record id")
    if record.split not in SPLITS:
        issues.append(f"unknown split {record.split!r}")
    if record.format is not record.domain.format:
        issues.append(
            f"format mismatch: domain {record.domain.value} expects "
            f"{record.domain.format.value}, record declares {record.format.value}"
        )

    if record.format is DataFormat.JSON:
        if not isinstance(record.content, (dict, list)):
            issues.append("format mismatch: JSON record content is not a parsed document")
    elif record.format is DataFormat.CSV:
        if not isinstance(record.content, CsvDocument):
            issues.append("format mismatch: CSV record content is not a CsvDocument")
        else:
            if not record.content.comments:
                issues.append("missing metadata header")
            if not record.content.header:
                issues.append("missing column header row")
    elif record.format is DataFormat.MARKDOWN:
        if not isinstance(record.content, str):
            issues.append("format mismatch: Markdown record content is not text")
        else:
            lines = [line for line in record.content.split("\n") if line.strip()]
            if not lines or not lines[0].startswith("#"):
                issues.append("missing title heading")
            bullets = [line for line in lines if line.startswith("- ")]
            if not bullets:
                issues.append("no property bullets")
            for bullet in bullets:
                if ":" not in bullet:
                    issues.append(f"bullet without key-value separator: {bullet!r}")
    return issues


@dataclass
class BenchmarkSet:
    """A collection of records plus the manifest bookkeeping for them."""

    records: list[DataRecord] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def manifest_counts(self) -> dict[str, dict[str, int]]:
        counts: dict[str, dict[str, int]] = {}
        for record in self.records:
            per_domain = counts.setdefault(record.domain.value, {})
            per_domain[record.split] = per_domain.get(record.split, 0) + 1
        return counts

    def subset(self, domain: Domain | None = None, split: str | None = None) -> list[DataRecord]:
        return [
            r
            for r in self.records
            if (domain is None or r.domain is domain) and (split is None or r.split == split)
        ]

    def get(self, record_id: str) -> DataRecord:
        for record in self.records:
            if record.id == record_id:
                return record
        raise KeyError(record_id)


def save_benchmark(bset: BenchmarkSet, root: str | Path) -> None:
    """Write a benchmark tree: one file per record plus manifest.json."""
    root = Path(root)
    seen = set()
    for record in bset.records:
        key = (record.domain.value, record.split, record.id)
        if key in seen:
            raise CorpusError(f"duplicate record id {record.id!r} in {key[0]}/{key[1]}")
        seen.add(key)
        path = root / record.domain.value / record.split / f"{record.id}.{record.format.extension}"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(record.serialized() + "\n", encoding="utf-8")

    provenance = dict(bset.provenance)
    per_record = {}
    for record in bset.records:
        if record.provenance:
            per_record[record.id] = record.provenance
    if per_record:
        provenance.setdefault("records", {}).update(per_record)
    manifest = {"counts": bset.manifest_counts(), "provenance": provenance}
    (root / "manifest.json").parent.mkdir(parents=True, exist_ok=True)
    (root / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_benchmark(root: str | Path) -> BenchmarkSet:
    """Load a benchmark tree, validating layout and manifest counts.

    Raises BenchmarkLoadError (carrying the loadable remainder) when any
    record file fails to parse, and ManifestError when the manifest counts
    disagree with the files found.
    """
    root = Path(root)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise ManifestError(f"manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ManifestError(f"manifest unreadable: {exc}") from exc

    provenance = manifest.get("provenance", {})
    record_provenance = provenance.get("records", {})
    records = []
    file_errors = []
    for domain in Domain:
        ext = domain.format.extension
        for split in SPLITS:
            directory = root / domain.value / split
            if not directory.is_dir():
                continue
            for path in sorted(directory.glob(f"*.{ext}")):
                text = path.read_text(encoding="utf-8")
                try:
                    content = parse_content(domain.format, text)
                except ValueError as exc:
                    file_errors.append((str(path), str(exc)))
                    continue
                records.append(
                    DataRecord(
                        id=path.stem,
                        domain=domain,
                        split=split,
                        format=domain.format,
                        content=content,
                        provenance=record_provenance.get(path.stem, {}),
                    )
                )

    bset = BenchmarkSet(records=records, provenance={k: v for k, v in provenance.items() if k != "records"})
    if file_errors:
        raise BenchmarkLoadError(file_errors, partial=bset)

    declared = manifest.get("counts", {})
    actual = bset.manifest_counts()
    mismatches = []
    for domain_id in sorted(set(declared) | set(actual)):
        for split in SPLITS:
            want = declared.get(domain_id, {}).get(split, 0)
            have = actual.get(domain_id, {}).get(split, 0)
            if want != have:
                mismatches.append(f"{domain_id}/{split}: manifest says {want}, found {have}")
    if mismatches:
        raise ManifestError("; ".join(mismatches))
    return bset


@dataclass
class GenerationResult:
    """One model output: the raw completion plus the parsed text and bookkeeping."""

    example_id: str
    model_id: str
    prompt: str
    raw_completion: str
    text: str
    decoding: dict
    token_count: int
    flags: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "model_id": self.model_id,
            "prompt": self.prompt,
            "raw_completion": self.raw_completion,
            "text": self.text,
            "decoding": self.decoding,
            "token_count": self.token_count,
            "flags": self.flags,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationResult":
        return cls(
            example_id=data["example_id"],
            model_id=data["model_id"],
            prompt=data.get("prompt", ""),
            raw_completion=data.get("raw_completion", ""),
            text=data["text"],
            decoding=data.get("decoding", {}),
            token_count=data.get("token_count", 0),
            flags=list(data.get("flags", [])),
            meta=dict(data.get("meta", {})),
        )


def results_path(out_root: str | Path, model_id: str, domain: Domain, split: str) -> Path:
    return Path(out_root) / model_id / domain.value / f"{split}.jsonl"


def save_results(path: str | Path, results: list[GenerationResult]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for result in results:
            handle.write(json.dumps(result.to_dict(), ensure_ascii=False) + "\n")


def load_results(path: str | Path) -> list[GenerationResult]:
    results = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                results.append(GenerationResult.from_dict(json.loads(line)))
    return results

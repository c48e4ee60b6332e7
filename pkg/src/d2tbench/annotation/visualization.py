"""Render input data into display specs the annotation UI can draw.

Series-shaped domains become line charts, nested records become flat
two-column tables, and entity markdown becomes a key-value list. The
spec is plain JSON, free of layout decisions.
"""

from __future__ import annotations

import re

from ..corpus import CsvDocument, DataRecord, Domain

_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?")


def _numeric(value) -> float | None:
    """Leading number of a value, tolerating unit suffixes like "12.3 °C"."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        match = _NUMBER_RE.match(value.strip())
        if match:
            return float(match.group())
    return None


def _flatten(node, prefix: str, rows: list[tuple[str, str]]) -> None:
    if isinstance(node, dict):
        for key, value in node.items():
            _flatten(value, f"{prefix}.{key}" if prefix else key, rows)
    elif isinstance(node, list):
        for index, value in enumerate(node):
            _flatten(value, f"{prefix}.{index}" if prefix else str(index), rows)
    elif node is not None:
        rows.append((prefix, str(node)))


def _chart_from_csv(document: CsvDocument) -> dict:
    metadata = document.metadata()
    x = [row[0] for row in document.rows if row]
    y = [_numeric(row[1]) for row in document.rows if len(row) > 1]
    label = document.header[1] if len(document.header) > 1 else "value"
    return {
        "kind": "chart",
        "title": metadata.get("title", ""),
        "unit": metadata.get("unit", ""),
        "x_label": document.header[0] if document.header else "",
        "series": [{"label": label, "x": x, "y": y}],
    }


_FORECAST_QUANTITIES = (
    ("temperature", ("main", "temp")),
    ("feels like", ("main", "feels_like")),
    ("humidity", ("main", "humidity")),
    ("wind speed", ("wind", "speed")),
)


def _chart_from_forecast(content: dict) -> dict:
    entries = content.get("list", [])
    x = [entry.get("dt_txt", str(i)) for i, entry in enumerate(entries)]
    series = []
    for label, path in _FORECAST_QUANTITIES:
        values = []
        for entry in entries:
            node = entry
            for step in path:
                node = node.get(step, {}) if isinstance(node, dict) else {}
            values.append(_numeric(node))
        if any(value is not None for value in values):
            series.append({"label": label, "x": x, "y": values})
    city = content.get("city", {})
    return {
        "kind": "chart",
        "title": f"Five-day forecast: {city.get('name', '?')}",
        "unit": "",
        "x_label": "time",
        "series": series,
    }


def _key_value_from_markdown(text: str) -> dict:
    title = ""
    pairs = []
    for line in text.split("\n"):
        if line.startswith("# ") and not title:
            title = line[2:].strip()
        elif line.startswith("- ") and ":" in line:
            key, value = line[2:].split(":", 1)
            pairs.append([key.strip(), value.strip()])
    return {"kind": "key_value", "title": title, "pairs": pairs}


def render_visualization_spec(record: DataRecord) -> dict:
    """Display spec for one record, keyed by the domain's natural shape."""
    if record.domain == Domain.OWID and isinstance(record.content, CsvDocument):
        return _chart_from_csv(record.content)
    if record.domain == Domain.OPENWEATHER and isinstance(record.content, dict):
        return _chart_from_forecast(record.content)
    if record.domain == Domain.WIKIDATA and isinstance(record.content, str):
        return _key_value_from_markdown(record.content)
    rows: list[tuple[str, str]] = []
    _flatten(record.content, "", rows)
    return {"kind": "table", "title": record.id, "rows": [list(row) for row in rows]}

"""Chart data collection from a public statistics catalog.

Source charts arrive as wide CSV (Entity, Code, Year/Day, metrics...).
Each collected record is one series for one country, reduced to a
two-column CSV body under ``#`` metadata comments carrying the chart
title, description, and unit.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

from ..corpus import CsvDocument, Domain
from ..errors import SourceError, SpecError
from .base import LIVE, RawItem, SourceConfig, replay_items
from .pacing import RateLimiter
from .transport import fetch, http_get

DEFAULT_BASE_URL = "https://ourworldindata.org/grapher"
REQUESTS_PER_MINUTE = 30


@dataclass(frozen=True)
class OwidSeries:
    """One chart column worth collecting, with its display metadata."""

    slug: str
    column: str
    title: str
    unit: str = ""
    description: str = ""


DEFAULT_SERIES = (
    OwidSeries(
        "covid-cases",
        "new_cases_smoothed_per_million",
        "Daily new confirmed COVID-19 cases per million people",
        description="7-day rolling average.",
    ),
    OwidSeries(
        "covid-testing",
        "new_tests_smoothed_per_thousand",
        "Daily COVID-19 tests per 1,000 people",
        description="7-day rolling average.",
    ),
    OwidSeries(
        "covid-vaccinations",
        "people_vaccinated_per_hundred",
        "Share of people who received at least one dose of COVID-19 vaccine",
        unit="%",
    ),
    OwidSeries(
        "covid-reproduction-rate",
        "reproduction_rate",
        "COVID-19: The effective reproduction rate (R)",
    ),
    OwidSeries(
        "covid-positivity",
        "positive_rate",
        "The share of COVID-19 tests that are positive",
        unit="%",
        description="7-day rolling average.",
    ),
    OwidSeries(
        "life-expectancy",
        "life_expectancy_0",
        "Life expectancy at birth",
        unit="years",
        description="Period life expectancy at birth in a given year.",
    ),
)


def _series_document(series: OwidSeries, country: str, rows: list[list[str]], time_name: str) -> CsvDocument:
    comments = [f"# title: {series.title}"]
    if series.description:
        comments.append(f"# description: {series.description}")
    if series.unit:
        comments.append(f"# unit: {series.unit}")
    return CsvDocument(comments=comments, header=[time_name, series.column], rows=rows)


def collect_owid(
    config: SourceConfig,
    transport=http_get,
    series: tuple[OwidSeries, ...] = DEFAULT_SERIES,
    countries: tuple[str, ...] = ("United States",),
    sleep=time.sleep,
) -> list[RawItem]:
    if config.mode != LIVE:
        return replay_items(config, Domain.OWID)
    if not series or not countries:
        raise SpecError("owid: need at least one series and one country")

    base = (config.base_url or DEFAULT_BASE_URL).rstrip("/")
    limiter = RateLimiter(config.rate_limit or REQUESTS_PER_MINUTE, 60.0, sleep=sleep)

    items = []
    for spec in series:
        body = fetch(
            transport,
            f"{base}/{spec.slug}.csv",
            limiter=limiter,
            sleep=sleep,
            source="owid",
        )
        if not isinstance(body, str):
            raise SourceError(f"owid: chart {spec.slug} did not return CSV text")
        try:
            table = list(csv.reader(io.StringIO(body)))
        except csv.Error as exc:
            raise SourceError(f"owid: chart {spec.slug} is not parseable CSV: {exc}") from exc
        if not table:
            raise SourceError(f"owid: chart {spec.slug} is empty")

        header = table[0]
        if "Entity" not in header or spec.column not in header:
            raise SpecError(
                f"owid: chart {spec.slug} lacks required columns "
                f"(need Entity and {spec.column}, got {header})"
            )
        entity_at = header.index("Entity")
        value_at = header.index(spec.column)
        time_at, time_name = None, "year"
        for candidate in ("Year", "Day", "Date"):
            if candidate in header:
                time_at, time_name = header.index(candidate), candidate.lower()
                break
        if time_at is None:
            raise SpecError(f"owid: chart {spec.slug} has no time column")

        for country in countries:
            rows = [
                [row[time_at], row[value_at]]
                for row in table[1:]
                if len(row) > max(entity_at, value_at, time_at)
                and row[entity_at] == country
                and row[value_at] != ""
            ]
            if not rows:
                raise SpecError(f"owid: chart {spec.slug} has no data for {country!r}")
            items.append(
                RawItem(
                    key=f"{spec.slug}:{spec.column}:{country}",
                    content=_series_document(spec, country, rows, time_name),
                    provenance={"source": "owid", "slug": spec.slug, "country": country},
                )
            )
    return sorted(items, key=lambda item: item.key)

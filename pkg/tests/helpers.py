"""Builders for small, valid benchmark content used across the test suite."""

from __future__ import annotations

from pathlib import Path

from d2tbench.corpus import (
    BenchmarkSet,
    CsvDocument,
    DataRecord,
    Domain,
    make_record_id,
)


class ScriptedTransport:
    """Plays back queued (status, body) responses and records every call.

    An Exception instance in the script is raised instead of returned, which
    simulates a network-level failure.
    """

    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def __call__(self, url, headers, payload, timeout):
        self.calls.append({"url": url, "headers": headers, "payload": payload, "timeout": timeout})
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


class RoutingTransport:
    """Derives each response from the request payload via a callable."""

    def __init__(self, route):
        self.route = route
        self.calls = []

    def __call__(self, url, headers, payload, timeout):
        self.calls.append({"url": url, "headers": headers, "payload": payload, "timeout": timeout})
        return self.route(payload)


def completion(content, finish_reason="stop", tokens=17):
    """A successful chat-completions response body."""
    return 200, {
        "choices": [{"message": {"content": content}, "finish_reason": finish_reason}],
        "usage": {"completion_tokens": tokens},
    }


class ScriptedGet:
    """GET-style scripted transport for the collector fetch layer."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def __call__(self, url, params=None, headers=None, timeout=30.0):
        self.calls.append({"url": url, "params": params, "headers": headers, "timeout": timeout})
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


class RoutingGet:
    """GET-style transport deriving each response from (url, params)."""

    def __init__(self, route):
        self.route = route
        self.calls = []

    def __call__(self, url, params=None, headers=None, timeout=30.0):
        self.calls.append({"url": url, "params": params, "headers": headers, "timeout": timeout})
        return self.route(url, params or {})


def forbidden_transport(url, params=None, headers=None, timeout=30.0):
    raise AssertionError(f"network transport called in replay mode: {url}")


class FakeClock:
    """Synthetic monotonic time; sleep() advances it."""

    def __init__(self):
        self.now = 0.0
        self.slept = []

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.slept.append(seconds)
        self.now += seconds

SPLITS = ("dev", "test")
FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def openweather_content(ordinal: int = 0, entries: int = 8) -> dict:
    forecast = []
    for i in range(entries):
        forecast.append(
            {
                "dt": 1700000000 + 10800 * i,
                "dt_txt": f"2023-11-{14 + i // 8:02d} {(i % 8) * 3:02d}:00:00",
                "main": {
                    "temp": round(4.0 + ordinal + 0.7 * i, 2),
                    "feels_like": round(1.5 + ordinal + 0.7 * i, 2),
                    "pressure": 1008 + i,
                    "humidity": 60 + (i * 3) % 30,
                },
                "weather": [{"main": "Clouds", "description": "overcast clouds"}],
                "wind": {"speed": round(2.0 + 0.3 * i, 2), "deg": (200 + 10 * i) % 360},
                "clouds": {"all": (50 + 5 * i) % 100},
            }
        )
    return {
        "city": {
            "name": f"Testville {ordinal}",
            "country": "CZ",
            "coord": {"lat": 49.2, "lon": 16.6},
            "timezone": 7200,
        },
        "list": forecast,
    }


def gsmarena_content(ordinal: int = 0) -> dict:
    return {
        "name": f"Acme Phone {ordinal + 10}",
        "brand": "Acme",
        "released": "2023, September",
        "display": {"size": "6.1 inches", "resolution": "1170x2532"},
        "platform": {"chipset": "Acme A16", "os": "AcmeOS 17"},
        "battery": {"capacity": f"{3200 + 10 * ordinal} mAh"},
        "memory": ["128GB 6GB RAM", "256GB 6GB RAM"],
        "misc": {"price": "$799", "logoUrl": "https://example.invalid/acme.png"},
    }


def ice_hockey_content(ordinal: int = 0) -> dict:
    home_goals = 2 + ordinal % 3
    away_goals = 1 + ordinal % 2
    return {
        "id": 90000 + ordinal,
        "date": "2023-11-27",
        "status": "Finished",
        "league": {"name": "NHL", "season": 2023},
        "teams": {
            "home": {"name": "Boston Bruins"},
            "away": {"name": "Buffalo Sabres"},
        },
        "scores": {"home": home_goals, "away": away_goals},
        "periods": {
            "first": f"{min(home_goals, 1)}-0",
            "second": f"{max(home_goals - 2, 0)}-{min(away_goals, 1)}",
            "third": f"{min(home_goals, 1)}-{max(away_goals - 1, 0)}",
            "overtime": None,
        },
    }


def owid_content(ordinal: int = 0, rows: int = 10) -> CsvDocument:
    return CsvDocument(
        comments=[
            "# title: Life expectancy at birth",
            "# description: Period life expectancy at birth in a given year.",
            "# unit: years",
        ],
        header=["year", "life_expectancy_0"],
        rows=[[str(1950 + 5 * i), str(round(45.0 + ordinal + 1.5 * i, 1))] for i in range(rows)],
    )


def wikidata_content(ordinal: int = 0) -> str:
    return "\n".join(
        [
            f"# Test Person {ordinal}",
            "",
            "- occupation: physicist",
            "- date of birth: 7 November 1867",
            "- country of citizenship: Poland",
            "- field of work: radioactivity",
        ]
    )


_BUILDERS = {
    Domain.OPENWEATHER: openweather_content,
    Domain.GSMARENA: gsmarena_content,
    Domain.ICE_HOCKEY: ice_hockey_content,
    Domain.OWID: owid_content,
    Domain.WIKIDATA: wikidata_content,
}


def make_record(domain: Domain, split: str = "dev", ordinal: int = 0, **kwargs) -> DataRecord:
    return DataRecord(
        id=make_record_id(domain, split, ordinal),
        domain=domain,
        split=split,
        format=domain.format,
        content=_BUILDERS[domain](ordinal, **kwargs),
    )


def make_benchmark(per_cell: int = 2, splits: tuple[str, ...] = SPLITS) -> BenchmarkSet:
    records = []
    for domain in Domain:
        for split in splits:
            for ordinal in range(per_cell):
                records.append(make_record(domain, split, ordinal))
    return BenchmarkSet(records=records)

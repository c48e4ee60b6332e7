#!/usr/bin/env python3
"""Regenerate the committed replay fixtures.

Output is deterministic: every file is seeded, serialized canonically,
and safe to diff. One chart fixture is deliberately long so that the
token-budget downsampling path runs against real data.
"""

from __future__ import annotations

import argparse
import datetime
import random
from pathlib import Path

from d2tbench.corpus import CsvDocument, DataFormat, Domain, serialize_content

CONDITIONS = (
    ("Clear", "clear sky", 10),
    ("Clouds", "few clouds", 30),
    ("Clouds", "scattered clouds", 55),
    ("Clouds", "overcast clouds", 92),
    ("Rain", "light rain", 85),
    ("Snow", "light snow", 95),
)

CITIES = (
    (3067696, "Prague", "CZ", 50.09, 14.42, 3600, 2.0),
    (2761369, "Vienna", "AT", 48.21, 16.37, 3600, 3.0),
    (658225, "Helsinki", "FI", 60.17, 24.94, 7200, -4.0),
    (2267057, "Lisbon", "PT", 38.72, -9.13, 0, 11.0),
    (1857910, "Kyoto", "JP", 35.02, 135.75, 32400, 6.0),
    (5419384, "Denver", "US", 39.74, -104.98, -25200, -1.0),
)


def openweather_fixtures(rng: random.Random):
    for city_id, name, country, lat, lon, tz, base_temp in CITIES:
        start = datetime.datetime(2023, 11, 27, 0, 0)
        entries = []
        temp = base_temp
        for i in range(40):
            when = start + datetime.timedelta(hours=3 * i)
            temp += rng.uniform(-1.4, 1.4) + (0.8 if 4 <= when.hour <= 13 else -0.6)
            cond, desc, clouds = rng.choice(CONDITIONS)
            wind = round(rng.uniform(0.5, 9.0), 2)
            entries.append(
                {
                    "dt": int(when.replace(tzinfo=datetime.timezone.utc).timestamp()),
                    "dt_txt": when.strftime("%Y-%m-%d %H:%M:%S"),
                    "main": {
                        "temp": round(temp, 2),
                        "feels_like": round(temp - wind * 0.45, 2),
                        "pressure": rng.randint(995, 1030),
                        "humidity": rng.randint(45, 97),
                    },
                    "weather": [{"main": cond, "description": desc}],
                    "clouds": {"all": clouds},
                    "wind": {"speed": wind, "deg": rng.randint(0, 359)},
                }
            )
        content = {
            "city": {
                "id": city_id,
                "name": name,
                "country": country,
                "coord": {"lat": lat, "lon": lon},
                "timezone": tz,
            },
            "list": entries,
        }
        yield f"{city_id}", content


DEVICES = (
    ("Samsung", "Galaxy S23", "2023, February 17", "6.1 inches", "1080x2340",
     "Snapdragon 8 Gen 2", "Android 13", 3900, ("128GB 8GB RAM", "256GB 8GB RAM"), "$799"),
    ("Samsung", "Galaxy A54", "2023, March 24", "6.4 inches", "1080x2340",
     "Exynos 1380", "Android 13", 5000, ("128GB 6GB RAM", "256GB 8GB RAM"), "$449"),
    ("Apple", "iPhone 15", "2023, September 22", "6.1 inches", "1179x2556",
     "Apple A16 Bionic", "iOS 17", 3349, ("128GB 6GB RAM", "256GB 6GB RAM", "512GB 6GB RAM"), "$799"),
    ("Apple", "iPhone 15 Pro", "2023, September 22", "6.1 inches", "1179x2556",
     "Apple A17 Pro", "iOS 17", 3274, ("128GB 8GB RAM", "256GB 8GB RAM", "1TB 8GB RAM"), "$999"),
    ("Xiaomi", "Redmi Note 12", "2023, March 23", "6.67 inches", "1080x2400",
     "Snapdragon 685", "Android 13", 5000, ("64GB 4GB RAM", "128GB 6GB RAM"), "$199"),
    ("Xiaomi", "13T Pro", "2023, September 26", "6.67 inches", "1220x2712",
     "Dimensity 9200+", "Android 13", 5000, ("256GB 12GB RAM", "512GB 12GB RAM", "1TB 16GB RAM"), "$649"),
)


def gsmarena_fixtures(rng: random.Random):
    for i, (brand, model, released, size, res, chipset, os_name, battery, memory, price) in enumerate(DEVICES):
        weight = rng.randint(168, 215)
        content = {
            "name": f"{brand} {model}",
            "brand": brand,
            "released": released,
            "body": {"weight": f"{weight} g", "sim": "Nano-SIM and eSIM"},
            "display": {"size": size, "resolution": res, "type": "OLED, 120Hz"},
            "platform": {"chipset": chipset, "os": os_name},
            "memory": list(memory),
            "mainCamera": {"modules": f"{rng.choice((12, 48, 50, 108))} MP (wide)", "video": "4K@60fps"},
            "battery": {"capacity": f"{battery} mAh", "charging": f"{rng.choice((18, 25, 45, 120))}W wired"},
            "misc": {
                "price": price,
                "colors": "Black, Silver, Blue",
                "logoUrl": f"https://img.example.org/{brand.lower()}.png",
            },
        }
        yield f"{brand.lower()}-{model.lower().replace(' ', '-')}", content


TEAMS = (
    "Boston Bruins", "Buffalo Sabres", "Toronto Maple Leafs", "Detroit Red Wings",
    "Montreal Canadiens", "Ottawa Senators", "Florida Panthers", "Tampa Bay Lightning",
    "New York Rangers", "Pittsburgh Penguins", "Chicago Blackhawks", "Colorado Avalanche",
)


def ice_hockey_fixtures(rng: random.Random):
    game_id = 198204
    teams = list(TEAMS)
    rng.shuffle(teams)
    for date in ("2023-11-27", "2023-11-28"):
        for _ in range(3):
            home, away = teams.pop(), teams.pop()
            periods = [(rng.randint(0, 2), rng.randint(0, 2)) for _ in range(3)]
            home_goals = sum(p[0] for p in periods)
            away_goals = sum(p[1] for p in periods)
            overtime = None
            if home_goals == away_goals:
                winner = rng.choice(("home", "away"))
                overtime = "1-0" if winner == "home" else "0-1"
                home_goals += winner == "home"
                away_goals += winner == "away"
            content = {
                "id": game_id,
                "date": date,
                "time": f"{rng.randint(17, 21)}:00",
                "status": "Finished" + (" (OT)" if overtime else ""),
                "league": {"name": "NHL", "season": 2023},
                "country": {"name": "USA"},
                "teams": {"home": {"name": home}, "away": {"name": away}},
                "scores": {"home": home_goals, "away": away_goals},
                "periods": {
                    "first": f"{periods[0][0]}-{periods[0][1]}",
                    "second": f"{periods[1][0]}-{periods[1][1]}",
                    "third": f"{periods[2][0]}-{periods[2][1]}",
                    "overtime": overtime,
                },
            }
            yield f"game-{game_id}", content
            game_id += rng.randint(3, 40)


def _walk(rng: random.Random, start: float, low: float, high: float, step: float):
    value = start
    while True:
        yield value
        value = min(high, max(low, value + rng.uniform(-step, step)))


def owid_fixtures(rng: random.Random):
    # Daily series long enough to blow an 8k-token budget on purpose.
    day = datetime.date(2020, 3, 1)
    walk = _walk(rng, 12.0, 0.0, 900.0, 35.0)
    rows = []
    for _ in range(900):
        rows.append([day.isoformat(), f"{next(walk):.2f}"])
        day += datetime.timedelta(days=1)
    yield "covid-cases-usa", CsvDocument(
        comments=[
            "# title: Daily new confirmed COVID-19 cases per million people",
            "# description: 7-day rolling average. United States.",
        ],
        header=["day", "new_cases_smoothed_per_million"],
        rows=rows,
    )

    day = datetime.date(2021, 1, 5)
    share = 0.1
    rows = []
    for _ in range(60):
        share = min(78.0, share + rng.uniform(0.1, 1.4))
        rows.append([day.isoformat(), f"{share:.2f}"])
        day += datetime.timedelta(days=7)
    yield "covid-vaccinations-uk", CsvDocument(
        comments=[
            "# title: Share of people who received at least one dose of COVID-19 vaccine",
            "# description: United Kingdom.",
            "# unit: %",
        ],
        header=["day", "people_vaccinated_per_hundred"],
        rows=rows,
    )

    day = datetime.date(2020, 9, 1)
    walk = _walk(rng, 1.1, 0.6, 1.9, 0.08)
    rows = [[(day + datetime.timedelta(days=3 * i)).isoformat(), f"{next(walk):.2f}"] for i in range(48)]
    yield "covid-reproduction-rate-germany", CsvDocument(
        comments=[
            "# title: COVID-19: The effective reproduction rate (R)",
            "# description: Germany.",
        ],
        header=["day", "reproduction_rate"],
        rows=rows,
    )

    day = datetime.date(2020, 6, 1)
    walk = _walk(rng, 4.0, 0.3, 22.0, 1.1)
    rows = [[(day + datetime.timedelta(days=7 * i)).isoformat(), f"{next(walk):.2f}"] for i in range(40)]
    yield "covid-positivity-india", CsvDocument(
        comments=[
            "# title: The share of COVID-19 tests that are positive",
            "# description: 7-day rolling average. India.",
            "# unit: %",
        ],
        header=["day", "positive_rate"],
        rows=rows,
    )

    value = 48.5
    rows = []
    for year in range(1950, 2022):
        value += rng.uniform(0.05, 0.45)
        rows.append([str(year), f"{value:.1f}"])
    yield "life-expectancy-japan", CsvDocument(
        comments=[
            "# title: Life expectancy at birth",
            "# description: Period life expectancy at birth. Japan.",
            "# unit: years",
        ],
        header=["year", "life_expectancy_0"],
        rows=rows,
    )

    day = datetime.date(2020, 4, 2)
    walk = _walk(rng, 0.4, 0.05, 9.0, 0.5)
    rows = [[(day + datetime.timedelta(days=5 * i)).isoformat(), f"{next(walk):.3f}"] for i in range(55)]
    yield "covid-testing-italy", CsvDocument(
        comments=[
            "# title: Daily COVID-19 tests per 1,000 people",
            "# description: 7-day rolling average. Italy.",
        ],
        header=["day", "new_tests_smoothed_per_thousand"],
        rows=rows,
    )


ENTITIES = (
    ("Q36600", "Marie Curie", (
        ("occupation", "physicist, chemist"),
        ("date of birth", "7 November 1867"),
        ("place of birth", "Warsaw"),
        ("country of citizenship", "Poland, France"),
        ("field of work", "radioactivity"),
        ("award received", "Nobel Prize in Physics, Nobel Prize in Chemistry"),
        ("employer", "University of Paris"),
    )),
    ("Q1085", "Prague", (
        ("instance of", "capital city"),
        ("country", "Czech Republic"),
        ("population", "1357326"),
        ("area", "496 square kilometre"),
        ("located in time zone", "Central European Time"),
    )),
    ("Q83287", "Aki Kaurismäki", (
        ("occupation", "film director, screenwriter"),
        ("date of birth", "4 April 1957"),
        ("country of citizenship", "Finland"),
        ("notable work", "The Man Without a Past, Le Havre"),
    )),
    ("Q11571", "Grace Hopper", (
        ("occupation", "computer scientist, naval officer"),
        ("date of birth", "9 December 1906"),
        ("date of death", "1 January 1992"),
        ("employer", "United States Navy, Harvard University"),
        ("field of work", "compiler construction"),
        ("award received", "Presidential Medal of Freedom"),
    )),
    ("Q9439", "Victoria Falls", (
        ("instance of", "waterfall"),
        ("country", "Zambia, Zimbabwe"),
        ("height", "108 metre"),
        ("width", "1708 metre"),
        ("heritage designation", "World Heritage Site"),
        ("named after", "Queen Victoria"),
    )),
    ("Q201235", "Ada Lovelace", (
        ("occupation", "mathematician, writer"),
        ("date of birth", "10 December 1815"),
        ("date of death", "27 November 1852"),
        ("father", "Lord Byron"),
        ("field of work", "mathematics, computing"),
        ("notable work", "notes on the Analytical Engine"),
    )),
)


def wikidata_fixtures(rng: random.Random):
    for qid, title, pairs in ENTITIES:
        lines = [f"# {title}", ""]
        lines.extend(f"- {name}: {value}" for name, value in pairs)
        yield qid.lower(), "\n".join(lines)


GENERATORS = {
    Domain.OPENWEATHER: openweather_fixtures,
    Domain.GSMARENA: gsmarena_fixtures,
    Domain.ICE_HOCKEY: ice_hockey_fixtures,
    Domain.OWID: owid_fixtures,
    Domain.WIKIDATA: wikidata_fixtures,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--root",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "fixtures",
        help="fixture tree to (re)write",
    )
    args = parser.parse_args(argv)

    for domain, generate in GENERATORS.items():
        target = args.root / domain.value
        target.mkdir(parents=True, exist_ok=True)
        rng = random.Random(f"fixtures:{domain.value}")
        count = 0
        for stem, content in generate(rng):
            path = target / f"{stem}.{domain.format.extension}"
            path.write_text(serialize_content(domain.format, content) + "\n", encoding="utf-8")
            count += 1
        print(f"{domain.value}: wrote {count} fixtures to {target}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

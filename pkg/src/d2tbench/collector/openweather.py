"""Five-day forecast collection from a city-level weather API."""

from __future__ import annotations

import logging
import time

from ..corpus import Domain
from ..errors import SourceError, SpecError
from .base import LIVE, RawItem, SourceConfig, replay_items, require_key
from .pacing import RateLimiter
from .transport import fetch, http_get

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.openweathermap.org/data/2.5"
REQUESTS_PER_MINUTE = 60
# five days in three-hour steps
FORECAST_ENTRIES = 40


def collect_openweather(
    config: SourceConfig,
    transport=http_get,
    cities: list | None = None,
    sleep=time.sleep,
) -> list[RawItem]:
    """Fetch one five-day forecast per city.

    Cities are given as names (queried as-is) or numeric city ids. The
    stored content keeps the city block and the forecast entries, nothing
    else from the response envelope.
    """
    if config.mode != LIVE:
        return replay_items(config, Domain.OPENWEATHER)
    if not cities:
        raise SpecError("openweather: no cities to fetch forecasts for")

    key = require_key(config, Domain.OPENWEATHER)
    base = (config.base_url or DEFAULT_BASE_URL).rstrip("/")
    limiter = RateLimiter(config.rate_limit or REQUESTS_PER_MINUTE, 60.0, sleep=sleep)

    items = []
    for city in cities:
        params = {"units": "metric", "appid": key}
        if isinstance(city, int):
            params["id"] = city
        else:
            params["q"] = str(city)
        body = fetch(
            transport,
            f"{base}/forecast",
            params=params,
            limiter=limiter,
            sleep=sleep,
            source="openweather",
        )
        if not isinstance(body, dict) or "city" not in body or "list" not in body:
            raise SourceError(f"openweather: malformed forecast for {city!r}")
        entries = body["list"]
        if len(entries) != FORECAST_ENTRIES:
            log.warning(
                "openweather: %r returned %d entries, expected %d",
                city,
                len(entries),
                FORECAST_ENTRIES,
            )
        items.append(
            RawItem(
                key=str(body["city"].get("id", city)),
                content={"city": body["city"], "list": entries},
                provenance={"source": "openweather", "query": str(city)},
            )
        )
    return sorted(items, key=lambda item: item.key)

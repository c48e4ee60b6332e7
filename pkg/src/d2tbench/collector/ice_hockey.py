"""Game summary collection from a hockey results API."""

from __future__ import annotations

import time

from ..corpus import Domain
from ..errors import SourceError, SpecError
from .base import LIVE, RawItem, SourceConfig, replay_items, require_key
from .pacing import RateLimiter
from .transport import fetch, http_get

DEFAULT_BASE_URL = "https://api-hockey.p.rapidapi.com"
# free tier quota; waiting out a day is pointless, so the limiter raises
REQUESTS_PER_DAY = 50


def collect_ice_hockey(
    config: SourceConfig,
    transport=http_get,
    dates: list[str] | None = None,
    sleep=time.sleep,
) -> list[RawItem]:
    """Fetch all games played on the given ISO dates, one request per date.

    Splits are typically drawn from different dates; collect each date
    pool separately and sample with the other split set to zero.
    """
    if config.mode != LIVE:
        return replay_items(config, Domain.ICE_HOCKEY)
    if not dates:
        raise SpecError("ice_hockey: no dates to fetch games for")

    key = require_key(config, Domain.ICE_HOCKEY)
    base = (config.base_url or DEFAULT_BASE_URL).rstrip("/")
    limiter = RateLimiter(config.rate_limit or REQUESTS_PER_DAY, 86400.0, blocking=False)
    headers = {"X-RapidAPI-Key": key}

    items = []
    for date in dates:
        body = fetch(
            transport,
            f"{base}/games",
            params={"date": date},
            headers=headers,
            limiter=limiter,
            sleep=sleep,
            source="ice_hockey",
        )
        games = body.get("response") if isinstance(body, dict) else body
        if not isinstance(games, list):
            raise SourceError(f"ice_hockey: malformed games listing for {date}")
        for game in games:
            if not isinstance(game, dict) or "id" not in game:
                raise SourceError(f"ice_hockey: game without id on {date}")
            items.append(
                RawItem(
                    # zero-padded so numeric ids keep numeric order as strings
                    key=f"{date}:{str(game['id']).rjust(10, '0')}",
                    content=game,
                    provenance={"source": "ice_hockey", "date": date},
                )
            )
    return sorted(items, key=lambda item: item.key)

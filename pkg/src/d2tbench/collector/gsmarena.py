"""Product specification collection from a phone-catalog API.

The upstream catalog has no official public API, so live mode requires an
explicit ``base_url`` pointing at a deployment that serves the JSON
contract used here: ``GET /brands`` lists brands, ``GET /devices?brand=``
lists a brand's devices newest first, ``GET /device?id=`` returns the full
specification document.
"""

from __future__ import annotations

import time

from ..corpus import Domain
from ..errors import SourceError
from .base import LIVE, RawItem, SourceConfig, replay_items
from .pacing import RateLimiter
from .transport import fetch, http_get

DEVICES_PER_BRAND = 10
REQUESTS_PER_MINUTE = 30


def collect_gsmarena(
    config: SourceConfig,
    transport=http_get,
    brands: list[str] | None = None,
    sleep=time.sleep,
) -> list[RawItem]:
    """Fetch specifications for the newest devices of each brand.

    Takes at most ten devices per brand so no single vendor dominates the
    pool. ``brands`` filters by brand name; all brands when omitted.
    """
    if config.mode != LIVE:
        return replay_items(config, Domain.GSMARENA)
    if not config.base_url:
        raise SourceError("gsmarena: live collection needs base_url for a catalog API")

    base = config.base_url.rstrip("/")
    limiter = RateLimiter(config.rate_limit or REQUESTS_PER_MINUTE, 60.0, sleep=sleep)

    def get(path, **params):
        return fetch(
            transport,
            f"{base}/{path}",
            params=params or None,
            limiter=limiter,
            sleep=sleep,
            source="gsmarena",
        )

    catalog = get("brands")
    if not isinstance(catalog, list):
        raise SourceError("gsmarena: brand listing is not a list")
    wanted = {name.lower() for name in brands} if brands else None

    items = []
    for brand in catalog:
        name = brand.get("name", "")
        if wanted is not None and name.lower() not in wanted:
            continue
        devices = get("devices", brand=brand["id"])
        if not isinstance(devices, list):
            raise SourceError(f"gsmarena: device listing for {name!r} is not a list")
        for device in devices[:DEVICES_PER_BRAND]:
            detail = get("device", id=device["id"])
            if not isinstance(detail, dict) or "name" not in detail:
                raise SourceError(f"gsmarena: malformed device {device['id']!r}")
            items.append(
                RawItem(
                    key=f"{name}/{device['id']}",
                    content=detail,
                    provenance={"source": "gsmarena", "brand": name},
                )
            )
    return sorted(items, key=lambda item: item.key)

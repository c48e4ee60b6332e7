"""Data collection for the five benchmark domains.

Each collector fetches raw source items either live from its upstream
API or from committed fixtures (replay mode, the default). Sampling
into dev/test splits is a separate, deterministic step.
"""

from __future__ import annotations

from ..corpus import Domain
from .base import LIVE, REPLAY, RawItem, SourceConfig, credential_env_name
from .gsmarena import collect_gsmarena
from .ice_hockey import collect_ice_hockey
from .openweather import collect_openweather
from .owid import OwidSeries, collect_owid
from .pacing import RateLimiter
from .sampling import SampleSpec, sample_split
from .wikidata import collect_wikidata

COLLECTORS = {
    Domain.OPENWEATHER: collect_openweather,
    Domain.GSMARENA: collect_gsmarena,
    Domain.ICE_HOCKEY: collect_ice_hockey,
    Domain.OWID: collect_owid,
    Domain.WIKIDATA: collect_wikidata,
}


def collect_domain(domain: Domain, config: SourceConfig, transport=None, **kwargs) -> list[RawItem]:
    collect = COLLECTORS[domain]
    if transport is not None:
        kwargs["transport"] = transport
    return collect(config, **kwargs)


__all__ = [
    "COLLECTORS",
    "LIVE",
    "OwidSeries",
    "REPLAY",
    "RateLimiter",
    "RawItem",
    "SampleSpec",
    "SourceConfig",
    "collect_domain",
    "collect_gsmarena",
    "collect_ice_hockey",
    "collect_openweather",
    "collect_owid",
    "collect_wikidata",
    "credential_env_name",
    "sample_split",
]

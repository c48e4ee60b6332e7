"""Shared plumbing for the source collectors.

Every collector works in one of two modes: "live" talks to the upstream
API through a transport, "replay" reads canonical fixture files and never
touches the network. Collectors return raw items keyed deterministically
by the source; turning a pool of items into dev/test records is the
sampler's job.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus import Content, Domain, parse_content
from ..errors import AuthenticationError, SourceError

LIVE = "live"
REPLAY = "replay"


@dataclass
class SourceConfig:
    """How to reach one source: mode, location, credentials, pacing."""

    mode: str = REPLAY
    fixture_dir: str | Path | None = None
    base_url: str | None = None
    api_key: str | None = None
    rate_limit: int | None = None
    seed: int = 0


@dataclass
class RawItem:
    """One collected data document before split assignment."""

    key: str
    content: Content
    provenance: dict = field(default_factory=dict)


def credential_env_name(domain: Domain) -> str:
    return f"D2TBENCH_{domain.value.upper()}_KEY"


def require_key(config: SourceConfig, domain: Domain, env=None) -> str:
    env = os.environ if env is None else env
    key = config.api_key or env.get(credential_env_name(domain))
    if not key:
        raise AuthenticationError(
            f"{domain.value}: no API key given; set {credential_env_name(domain)}"
        )
    return key


def fixture_dir(config: SourceConfig, domain: Domain) -> Path:
    root = Path(config.fixture_dir) if config.fixture_dir else Path("fixtures") / domain.value
    if not root.is_dir():
        raise SourceError(f"{domain.value}: fixture directory not found: {root}")
    return root


def replay_items(config: SourceConfig, domain: Domain) -> list[RawItem]:
    """Read canonical fixture files for a domain, keyed by file stem."""
    root = fixture_dir(config, domain)
    extension = domain.format.extension
    paths = sorted(root.glob(f"*.{extension}"))
    if not paths:
        raise SourceError(f"{domain.value}: no *.{extension} fixtures in {root}")
    items = []
    for path in paths:
        try:
            content = parse_content(domain.format, path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise SourceError(f"{domain.value}: bad fixture {path.name}: {exc}") from exc
        items.append(RawItem(key=path.stem, content=content, provenance={"fixture": path.name}))
    # same contract as live collection: items come back key-sorted
    return sorted(items, key=lambda item: item.key)

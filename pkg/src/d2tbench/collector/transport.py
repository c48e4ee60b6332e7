"""HTTP fetch layer for collectors.

A transport is a callable ``(url, params=None, headers=None, timeout=...)
-> (status, body)`` where the body is decoded JSON when possible and raw
text otherwise. Collectors never import requests directly, so tests swap in
scripted transports and replay mode skips this layer entirely.
"""

from __future__ import annotations

import time

import requests

from ..errors import AuthenticationError, SourceError


def http_get(url: str, params=None, headers=None, timeout: float = 30.0):
    response = requests.get(url, params=params, headers=headers, timeout=timeout)
    try:
        body = response.json()
    except ValueError:
        body = response.text
    return response.status_code, body


def fetch(
    transport,
    url: str,
    *,
    params=None,
    headers=None,
    timeout: float = 30.0,
    attempts: int = 3,
    backoff: float = 1.0,
    sleep=time.sleep,
    limiter=None,
    source: str = "source",
):
    """GET with bounded retries and optional rate limiting.

    Authentication failures raise immediately. 429 and 5xx responses back
    off exponentially and retry; any other non-200 raises SourceError.
    """
    last = "no attempt made"
    for attempt in range(attempts):
        if attempt:
            sleep(backoff * 2 ** (attempt - 1))
        if limiter is not None:
            limiter.acquire()
        try:
            status, body = transport(url, params=params, headers=headers, timeout=timeout)
        except (requests.RequestException, OSError) as exc:
            last = f"transport failure: {exc}"
            continue
        if status in (401, 403):
            raise AuthenticationError(f"{source}: authentication rejected ({status})")
        if status == 429 or 500 <= status <= 599:
            last = f"status {status}"
            continue
        if status != 200:
            raise SourceError(f"{source}: unexpected status {status} from {url}")
        return body
    raise SourceError(f"{source}: gave up after {attempts} attempts: {last}")

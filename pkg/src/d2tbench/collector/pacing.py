"""Request pacing for rate-limited sources."""

from __future__ import annotations

import threading
import time
from collections import deque

from ..errors import RateLimitError


class RateLimiter:
    """Sliding-window limiter: at most ``limit`` acquisitions per ``window``
    seconds.

    A blocking limiter sleeps until the oldest event leaves the window; a
    non-blocking one raises RateLimitError instead, which suits daily
    quotas where waiting out the window is pointless. Clock and sleep are
    injectable so tests can run on synthetic time.
    """

    def __init__(
        self,
        limit: int,
        window: float,
        *,
        blocking: bool = True,
        clock=time.monotonic,
        sleep=time.sleep,
    ):
        if limit < 1:
            raise ValueError("limit must be positive")
        self.limit = limit
        self.window = window
        self.blocking = blocking
        self.clock = clock
        self.sleep = sleep
        self.events: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self.clock()
                while self.events and now - self.events[0] >= self.window:
                    self.events.popleft()
                if len(self.events) < self.limit:
                    self.events.append(now)
                    return
                wait = self.window - (now - self.events[0])
            if not self.blocking:
                raise RateLimitError(
                    f"rate limit of {self.limit} requests per {self.window:.0f}s exhausted"
                )
            self.sleep(wait)

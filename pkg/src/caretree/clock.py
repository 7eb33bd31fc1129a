"""Virtual clock: time advances only when the engine or run loop says so."""

from __future__ import annotations

from .values import Duration


class VirtualClock:
    def __init__(self, now: float = 0.0):
        self.now = float(now)

    def advance(self, amount: Duration | float) -> float:
        seconds = amount.seconds if isinstance(amount, Duration) else float(amount)
        if seconds < 0:
            raise ValueError("clock cannot move backwards")
        self.now += seconds
        return self.now

    def advance_to(self, target: float) -> float:
        if target < self.now:
            raise ValueError(f"clock cannot move backwards ({target} < {self.now})")
        self.now = float(target)
        return self.now

    def __repr__(self) -> str:
        return f"VirtualClock(now={self.now})"

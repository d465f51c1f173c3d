"""Closed-form round plan shared by every node after diameter estimation."""

from __future__ import annotations

from dataclasses import dataclass

from ..codec import ceil_log2
from .findmax import findmax_length


@dataclass(frozen=True)
class Plan:
    N: int
    L: int
    M: int
    d_star: int
    lam: int
    x: int
    y: int

    def ordering_interval(self, blue: int, i: int) -> tuple[int, int]:
        """Rounds of the ``i``-th Modified Find Max, ``i = 1..N``."""
        return blue + (i - 1) * self.x + 1, blue + i * self.x

    def gossip_interval(self, blue: int, j: int) -> tuple[int, int]:
        """Rounds reserved for the broadcast of rank ``j``, ``j = 0..N``."""
        base = blue + self.N * self.x
        return base + j * self.y + 1, base + (j + 1) * self.y

    def end(self, blue: int) -> int:
        return blue + self.N * self.x + (self.N + 1) * self.y


def plan_schedule(N: int, L: int, M: int, d_star: int) -> Plan:
    """``x`` covers one Modified Find Max (start beep to last stage round, plus one
    idle round); ``y`` covers one broadcast of at most ``M`` bits over depth ``D*``."""
    if min(N, L, M, d_star) < 1:
        raise ValueError("all parameters must be positive")
    lam = ceil_log2(L)
    x = findmax_length(lam, d_star) + 1
    y = d_star + 6 * M + 12
    return Plan(N, L, M, d_star, lam, x, y)

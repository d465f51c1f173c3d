"""Echo-wave eccentricity probe from the leader and broadcast of ``D*``.

After red round ``r`` time is cut into windows ``J_j = [r + (j-1)N + 1, r + jN]``.
A level-``l`` node beeps at position ``l`` of ``J_1`` and keeps doing so in
``J_{j+1}`` while it hears an echo at position ``l + 1`` of ``J_j``.  The
leader sees the first silent position 1 in window ``ρ + 1`` where ``ρ`` is
its eccentricity, then broadcasts ``D* = max(1, 2ρ)`` from the next round.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .. import engine
from ..codec import bits_to_int, int_bits
from ..engine import BEEP, LISTEN, Action, Trace
from ..topology import Graph
from .base import SubAutomaton
from .broadcast import BroadcastRelay, BroadcastSource


def blue_round(red: int, N: int, d_star: int) -> int:
    rho = d_star // 2
    m = len(int_bits(d_star))
    return red + rho * N + d_star + 6 * m + 12


class DiamEstNode(SubAutomaton):
    def __init__(self, is_leader: bool, level: int, N: int, red: int, events: list[str] | None = None) -> None:
        super().__init__(events)
        self.is_leader = is_leader
        self.level = level
        self.N = N
        self.red = red
        self.probing = True
        self.source: BroadcastSource | None = None
        self.relay: BroadcastRelay | None = None
        self.rho: int | None = None
        self.d_star: int | None = None
        self.blue: int | None = None

    def _pos(self, now: int) -> tuple[int, int]:
        j, p = divmod(now - self.red - 1, self.N)
        return j + 1, p + 1

    def act(self, now: int) -> Action:
        if self.source is not None:
            return self.source.act(now)
        if self.relay is not None:
            return self.relay.act(now)
        if not self.is_leader and self.probing and now > self.red:
            if self._pos(now)[1] == self.level:
                return BEEP
        return LISTEN

    def _settle(self, d_star: int) -> None:
        self.d_star = d_star
        self.rho = d_star // 2
        self.blue = blue_round(self.red, self.N, d_star)

    def perceive(self, now: int, heard: bool) -> None:
        if now == self.blue:
            self.done = True
            self.events.append("blue")
            return
        if self.source is not None:
            self.source.perceive(now, heard)
            return
        if self.relay is not None:
            self.relay.perceive(now, heard)
            if self.relay.decoded is not None and self.d_star is None:
                self._settle(bits_to_int(self.relay.decoded))
            return
        if now <= self.red:
            return
        j, pos = self._pos(now)
        if self.is_leader:
            if pos == 1 and not heard:
                rho = j - 1
                d_star = max(1, 2 * rho)
                self._settle(d_star)
                self.rho = rho
                self.source = BroadcastSource(int_bits(d_star), now + 1, self.events)
        elif pos == self.level + 1:
            if self.probing:
                if not heard:
                    self.probing = False
            elif heard:
                # echoes have died out for good, so this is the D* frame arriving
                self.relay = BroadcastRelay(now, self.events)


@dataclass
class DiamEstResult:
    rho: int
    d_star: list[int]
    blue: list[int]
    trace: Trace

    def to_dict(self) -> dict:
        return {"rho": self.rho, "d_star": self.d_star, "blue": self.blue}


def run_diam_est(graph: Graph, z: int, levels: Sequence[int], red: int, N: int) -> DiamEstResult:
    """All nodes awake from round 0 and agreeing on ``red``; ``levels`` are hop distances from ``z``."""
    nodes = [DiamEstNode(v == z, levels[v], N, red) for v in range(graph.n)]
    budget = red + N * N + 3 * N + 6 * max(1, (2 * N).bit_length()) + 16
    trace = engine.run(graph, nodes, {v: 0 for v in range(graph.n)}, budget)
    return DiamEstResult(nodes[z].rho, [nd.d_star for nd in nodes], [nd.blue for nd in nodes], trace)

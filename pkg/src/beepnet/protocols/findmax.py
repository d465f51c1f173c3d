"""Maximum-label election by bitwise elimination.

Stage ``j`` of a node anchored at round ``a`` is centred on
``t_j = a + j(4W + 1)`` and covers ``[t_j - 2W, t_j + 2W]``, where the width
``W`` is the size bound ``N`` (wake-up anchored) or a diameter bound ``D*``
(synchronised start).  Every node also beeps once in round ``a + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Mapping

from .. import engine
from ..codec import bits_to_int, ceil_log2, fixed_bin
from ..engine import BEEP, LISTEN, Action, Trace
from ..topology import Graph
from .base import SubAutomaton


def findmax_length(lam: int, width: int) -> int:
    """Local round of the last stage round, counted from the anchor."""
    return lam * (4 * width + 1) + 2 * width


class FindMaxNode(SubAutomaton):
    def __init__(
        self,
        label: int,
        participating: bool,
        width: int,
        lam: int,
        anchor: int = 0,
        events: list[str] | None = None,
    ) -> None:
        super().__init__(events)
        if width < 1:
            raise ValueError("stage width must be positive")
        self.code = fixed_bin(label, lam)
        self.participating = participating
        self.active = participating
        self.width = width
        self.lam = lam
        self.anchor = anchor
        self.period = 4 * width + 1
        self.first = anchor + 2 * width + 1
        self.end = anchor + findmax_length(lam, width)
        self.pending: int | None = anchor + 1
        self.stage = 0
        self.lo = self.hi = self.t_j = -1
        self.heard_in_stage = False
        self.own_beep_planned = False
        self.beeped_own = False
        self.bits: list[int] = []

    def _open_stage(self) -> None:
        self.stage += 1
        self.lo = self.first + (self.stage - 1) * self.period
        self.hi = self.lo + 4 * self.width
        self.t_j = self.lo + 2 * self.width
        self.heard_in_stage = False
        self.beeped_own = False
        self.own_beep_planned = self.active and self.code[self.stage - 1] == 1
        if self.own_beep_planned:
            self.pending = self.t_j

    def act(self, now: int) -> Action:
        if self.stage < self.lam and now == self.first + self.stage * self.period:
            self._open_stage()
        if now == self.pending:
            self.pending = None
            if self.own_beep_planned and now == self.t_j:
                self.beeped_own = True
            return BEEP
        return LISTEN

    def perceive(self, now: int, heard: bool) -> None:
        if self.done or not self.lo <= now <= self.hi:
            return
        if heard and not self.heard_in_stage:
            self.heard_in_stage = True
            bit = self.code[self.stage - 1]
            if self.active and bit == 1:
                if now < self.t_j:
                    self.own_beep_planned = False
                    if now + 1 <= self.hi:
                        self.pending = now + 1
            elif now + 1 <= self.hi:
                self.pending = now + 1
            if self.active and bit == 0:
                self.active = False
        if now == self.hi:
            # a beeping node cannot hear, so its own t_j beep also counts as a 1
            self.bits.append(int(self.heard_in_stage or self.beeped_own))
            if self.stage == self.lam:
                self.done = True
                self.events.append("decoded")

    @property
    def winner(self) -> bool:
        return self.done and self.participating and self.active

    @property
    def decoded(self) -> int | None:
        return bits_to_int(self.bits) if self.done else None


@dataclass
class FindMaxResult:
    winner: int | None
    decoded: list[int]
    end: list[int]
    wake: list[int]
    trace: Trace

    def to_dict(self) -> dict:
        return {"winner": self.winner, "decoded": self.decoded, "end": self.end, "wake": self.wake}


def _collect(graph: Graph, nodes: list[FindMaxNode], trace: Trace) -> FindMaxResult:
    wake = trace.wake_rounds()
    winners = [v for v, nd in enumerate(nodes) if nd.winner]
    if len(winners) > 1:
        raise AssertionError(f"several active participants at the end: {winners}")
    return FindMaxResult(
        winner=winners[0] if winners else None,
        decoded=[nd.decoded for nd in nodes],
        end=[wake[v] + nd.end for v, nd in enumerate(nodes)],
        wake=[wake[v] for v in range(graph.n)],
        trace=trace,
    )


def run_find_max(
    graph: Graph,
    participants: Collection[int] | None,
    schedule: Mapping[int, int],
    N: int,
    L: int | None = None,
) -> FindMaxResult:
    """Wake-up anchored Find Max; ``participants=None`` means every node."""
    L = graph.L if L is None else L
    if N < graph.n:
        raise ValueError("N must bound the number of nodes")
    lam = ceil_log2(L)
    part = set(range(graph.n)) if participants is None else set(participants)
    nodes = [FindMaxNode(graph.labels[v], v in part, N, lam) for v in range(graph.n)]
    spread = max(schedule.values()) - min(schedule.values())
    trace = engine.run(graph, nodes, schedule, spread + graph.n + findmax_length(lam, N) + 2)
    return _collect(graph, nodes, trace)


def run_modified_find_max(
    graph: Graph,
    participants: Collection[int] | None,
    xi: int,
    d_star: int,
    L: int | None = None,
) -> FindMaxResult:
    """Find Max over synchronised nodes: all anchored at round ``xi``, width ``d_star``."""
    L = graph.L if L is None else L
    lam = ceil_log2(L)
    part = set(range(graph.n)) if participants is None else set(participants)
    nodes = [FindMaxNode(graph.labels[v], v in part, d_star, lam, anchor=xi) for v in range(graph.n)]
    trace = engine.run(graph, nodes, {v: 0 for v in range(graph.n)}, xi + findmax_length(lam, d_star) + 2)
    return _collect(graph, nodes, trace)

"""Ranking by ``N`` back-to-back Modified Find Max runs after the blue round."""

from __future__ import annotations

from dataclasses import dataclass

from .. import engine
from ..codec import ceil_log2
from ..engine import LISTEN, Action, Trace
from ..topology import Graph
from .base import SubAutomaton
from .findmax import FindMaxNode
from .schedule import plan_schedule


class OrderingNode(SubAutomaton):
    """Iteration ``i`` runs Modified Find Max anchored at ``blue + (i-1)x``.

    The leader holds rank 0 and never participates; the winner of iteration
    ``i`` takes rank ``i``.  Every node records the label decoded in every
    iteration (0 for an empty contest).
    """

    def __init__(self, is_leader: bool, label: int, blue: int, d_star: int, N: int, L: int,
                 events: list[str] | None = None) -> None:
        super().__init__(events)
        self.is_leader = is_leader
        self.label = label
        self.blue = blue
        self.d_star = d_star
        self.N = N
        self.lam = ceil_log2(L)
        self.x = plan_schedule(N, L, 1, d_star).x
        self.rank: int | None = 0 if is_leader else None
        self.winner_labels: list[int] = []
        self.end = blue + N * self.x
        self.mfm: FindMaxNode | None = None
        self.iteration = 0

    def act(self, now: int) -> Action:
        if self.mfm is None and self.iteration < self.N and now == self.blue + self.iteration * self.x + 1:
            if self.iteration == 0 and self.is_leader:
                self.events.append("rank=0")
            self.iteration += 1
            self.mfm = FindMaxNode(self.label, self.rank is None, self.d_star, self.lam,
                                   anchor=now - 1, events=self.events)
        return self.mfm.act(now) if self.mfm is not None else LISTEN

    def perceive(self, now: int, heard: bool) -> None:
        mfm = self.mfm
        if mfm is not None:
            mfm.perceive(now, heard)
            if mfm.done:
                self.winner_labels.append(mfm.decoded)
                if mfm.winner:
                    self.rank = self.iteration
                    self.events.append(f"rank={self.iteration}")
                self.mfm = None
        if now == self.end:
            self.done = True


@dataclass
class OrderingResult:
    ranks: list[int | None]
    winner_labels: list[list[int]]
    trace: Trace

    def to_dict(self) -> dict:
        return {"ranks": self.ranks, "winner_labels": self.winner_labels}


def run_ordering(graph: Graph, z: int, blue: int, d_star: int, N: int, L: int | None = None) -> OrderingResult:
    L = graph.L if L is None else L
    nodes = [OrderingNode(v == z, graph.labels[v], blue, d_star, N, L) for v in range(graph.n)]
    trace = engine.run(graph, nodes, {v: 0 for v in range(graph.n)}, nodes[0].end + 2)
    return OrderingResult([nd.rank for nd in nodes], [nd.winner_labels for nd in nodes], trace)

"""Gossiping: elect, synchronise, estimate the diameter, rank, then broadcast in turn.

Each node runs one :class:`GossipNode`, a sequence of phase automata on its
own clock.  The phases hand over in fixed local rounds, so apart from the
wake-up offset of Find Max every node follows the same global timetable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .. import engine
from ..codec import Bits, as_bits, bits_str, ceil_log2, int_bits
from ..engine import LISTEN, Action, Trace
from ..topology import Graph
from .base import ProtocolError, SubAutomaton
from .broadcast import BroadcastRelay, BroadcastSource
from .diameter import DiamEstNode
from .findmax import FindMaxNode, findmax_length
from .ordering import OrderingNode
from .schedule import plan_schedule
from .sync import SyncNode, frame_length, sync_guard


class ExchangeNode(SubAutomaton):
    """Rank ``j`` broadcasts its message in the ``j``-th slot of length ``y`` after ``start``."""

    def __init__(self, rank: int | None, label: int, message: Bits, rank_labels: Mapping[int, int],
                 start: int, N: int, y: int, events: list[str] | None = None) -> None:
        super().__init__(events)
        self.rank = rank
        self.label = label
        self.message = message
        self.rank_labels = dict(rank_labels)
        self.start = start
        self.y = y
        self.slots = N + 1
        self.end = start + self.slots * y
        self.slot = -1
        self.sub: BroadcastSource | BroadcastRelay | None = None
        self.received: dict[int, Bits] = {}
        self.vacant: list[int] = []

    def act(self, now: int) -> Action:
        slot = (now - self.start - 1) // self.y
        if slot != self.slot and 0 <= slot < self.slots:
            self.slot = slot
            first = self.start + slot * self.y + 1
            self.sub = BroadcastSource(self.message, first, self.events) if slot == self.rank else None
        return self.sub.act(now) if self.sub is not None else LISTEN

    def perceive(self, now: int, heard: bool) -> None:
        j = self.slot
        if self.sub is None:
            if heard:
                self.sub = BroadcastRelay(now, self.events)
        elif not self.sub.done:
            self.sub.perceive(now, heard)
        if now == self.start + (j + 1) * self.y:
            sub = self.sub
            if isinstance(sub, BroadcastSource):
                self.received[self.label] = self.message
            elif sub is None:
                self.vacant.append(j)
            elif sub.decoded is None:
                raise ProtocolError(f"slot {j} ended before its frame was complete")
            else:
                self.received[self.rank_labels[j]] = sub.decoded
            self.sub = None
        if now == self.end:
            self.done = True


class GossipNode(SubAutomaton):
    def __init__(self, label: int, message: Sequence[int], N: int, L: int, M: int) -> None:
        super().__init__()
        self.label = label
        self.message = as_bits(message)
        if not 1 <= len(self.message) <= M:
            raise ValueError(f"message size must be in [1, {M}]")
        self.N, self.L, self.M = N, L, M
        self.lam = ceil_log2(L)
        self.phase: SubAutomaton = FindMaxNode(label, True, N, self.lam, 0, self.events)
        self.is_leader = False
        self.leader_label: int | None = None
        self.level: int | None = None
        self.red: int | None = None
        self.rho: int | None = None
        self.d_star: int | None = None
        self.blue: int | None = None
        self.rank: int | None = None
        self.rank_labels: dict[int, int] = {}
        self.end: int | None = None
        self.findmax_end = findmax_length(self.lam, N)

    def act(self, now: int) -> Action:
        return self.phase.act(now)

    def perceive(self, now: int, heard: bool) -> None:
        phase = self.phase
        phase.perceive(now, heard)
        if phase.done:
            self._advance(now)

    def _advance(self, now: int) -> None:
        phase, ev = self.phase, self.events
        if isinstance(phase, FindMaxNode):
            self.is_leader = phase.winner
            self.leader_label = phase.decoded
            self.phase = SyncNode(self.is_leader, self.N, now + 1, now + sync_guard(self.N), ev)
        elif isinstance(phase, SyncNode):
            self.level, self.red = phase.level, phase.red
            self.phase = DiamEstNode(self.is_leader, phase.level, self.N, now, ev)
        elif isinstance(phase, DiamEstNode):
            self.rho, self.d_star, self.blue = phase.rho, phase.d_star, phase.blue
            self.phase = OrderingNode(self.is_leader, self.label, now, phase.d_star, self.N, self.L, ev)
        elif isinstance(phase, OrderingNode):
            self.rank = phase.rank
            self.rank_labels = {0: self.leader_label}
            self.rank_labels.update(enumerate(phase.winner_labels, start=1))
            plan = plan_schedule(self.N, self.L, self.M, self.d_star)
            self.phase = ExchangeNode(self.rank, self.label, self.message, self.rank_labels,
                                      now, self.N, plan.y, ev)
        else:
            self.end = now
            self.done = True

    @property
    def exchange(self) -> ExchangeNode | None:
        return self.phase if isinstance(self.phase, ExchangeNode) else None


@dataclass
class NodeReport:
    node: int
    label: int
    wake: int
    is_leader: bool
    leader_label: int
    level: int
    red: int
    rho: int
    d_star: int
    blue: int
    rank: int | None
    rank_labels: dict[int, int]
    received: dict[int, str]
    vacant: list[int]
    end: int


@dataclass
class GossipResult:
    N: int
    L: int
    M: int
    first_wake: int
    end: int
    nodes: list[NodeReport]
    trace: Trace | None = field(default=None, repr=False)

    @property
    def total_rounds(self) -> int:
        """Rounds from the first adversary wake-up to the round every map is complete."""
        return self.end - self.first_wake

    @property
    def leader(self) -> int:
        return next(r.node for r in self.nodes if r.is_leader)

    def maps(self) -> list[dict[int, str]]:
        return [r.received for r in self.nodes]

    def to_dict(self) -> dict:
        from dataclasses import asdict

        d = {"N": self.N, "L": self.L, "M": self.M, "first_wake": self.first_wake,
             "end": self.end, "total_rounds": self.total_rounds}
        d["nodes"] = []
        for r in self.nodes:
            nd = asdict(r)
            nd["rank_labels"] = {str(k): v for k, v in sorted(r.rank_labels.items())}
            nd["received"] = {str(k): v for k, v in sorted(r.received.items())}
            d["nodes"].append(nd)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> GossipResult:
        nodes = []
        for nd in d["nodes"]:
            nd = dict(nd)
            nd["rank_labels"] = {int(k): v for k, v in nd["rank_labels"].items()}
            nd["received"] = {int(k): v for k, v in nd["received"].items()}
            nodes.append(NodeReport(**nd))
        return cls(d["N"], d["L"], d["M"], d["first_wake"], d["end"], nodes)


def round_budget(n: int, N: int, L: int, M: int, spread: int) -> int:
    """Generous cap on the run length using ``N - 1`` as the diameter bound."""
    lam = ceil_log2(L)
    d_max = max(1, 2 * (N - 1))
    plan = plan_schedule(N, L, M, d_max)
    return (spread + n + findmax_length(lam, N) + sync_guard(N) + N * frame_length(N)
            + N * N + d_max + 6 * len(int_bits(d_max)) + 12 + plan.end(0) + 16)


def run_gossip(
    graph: Graph,
    messages: Mapping[int, Sequence[int] | str],
    schedule: Mapping[int, int],
    N: int,
    L: int,
    M: int,
) -> GossipResult:
    """``messages`` maps each node label to its input bit string."""
    if N < graph.n:
        raise ValueError(f"N={N} is smaller than the network size {graph.n}")
    if max(graph.labels) >= L:
        raise ValueError(f"labels must be below L={L}")
    msgs = {lab: as_bits(m) for lab, m in messages.items()}
    if set(msgs) != set(graph.labels):
        raise ValueError("need exactly one message per node label")
    nodes = [GossipNode(graph.labels[v], msgs[graph.labels[v]], N, L, M) for v in range(graph.n)]
    spread = max(schedule.values()) - min(schedule.values())
    trace = engine.run(graph, nodes, schedule, round_budget(graph.n, N, L, M, spread))
    wake = trace.wake_rounds()
    reports = []
    for v, nd in enumerate(nodes):
        tau = wake[v]
        ex = nd.phase
        reports.append(NodeReport(
            node=v, label=nd.label, wake=tau, is_leader=nd.is_leader, leader_label=nd.leader_label,
            level=nd.level, red=tau + nd.red, rho=nd.rho, d_star=nd.d_star, blue=tau + nd.blue,
            rank=nd.rank, rank_labels=nd.rank_labels,
            received={lab: bits_str(b) for lab, b in sorted(ex.received.items())},
            vacant=list(ex.vacant), end=tau + nd.end,
        ))
    ends = {r.end for r in reports}
    return GossipResult(N, L, M, min(schedule.values()), max(ends), reports, trace)


def random_messages(labels: Sequence[int], M: int, rng: random.Random) -> dict[int, Bits]:
    """One message of random length in ``[1, M]`` per label."""
    return {lab: tuple(rng.getrandbits(1) for _ in range(rng.randint(1, M))) for lab in labels}


def read_messages(path: str | Path) -> dict[int, Bits]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            label, bits = line.split()
            out[int(label)] = as_bits(bits)
    return out


def write_messages(messages: Mapping[int, Sequence[int]], path: str | Path) -> None:
    Path(path).write_text("".join(f"{lab} {bits_str(b)}\n" for lab, b in sorted(messages.items())))

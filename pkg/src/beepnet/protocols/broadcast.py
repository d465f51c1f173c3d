"""Single-source broadcast over canonical frames with mod-3 relay slots."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .. import engine
from ..codec import B, S, Bits, Decoder, Phase, as_bits, encode
from ..engine import BEEP, LISTEN, Action, Trace
from ..topology import Graph
from .base import ProtocolError, SubAutomaton


class BroadcastSource(SubAutomaton):
    """Sends symbol ``k`` of the canonical frame in round ``anchor + 3k``."""

    def __init__(self, bits: Sequence[int], anchor: int = 0, events: list[str] | None = None) -> None:
        super().__init__(events)
        symbols = encode(bits)
        self.bits = as_bits(bits)
        self.anchor = anchor
        self.beep_rounds = frozenset(anchor + 3 * k for k, c in enumerate(symbols) if c == B)
        self.finish = anchor + 3 * (len(symbols) - 1)

    def act(self, now: int) -> Action:
        return BEEP if now in self.beep_rounds else LISTEN

    def perceive(self, now: int, heard: bool) -> None:
        if now == self.finish:
            self.done = True


class BroadcastRelay(SubAutomaton):
    """Relay woken by the frame's first beep, heard in round ``anchor``.

    Samples rounds ``anchor + 3j`` only and repeats every sampled beep one
    round later; after the closing ``bb`` it sends that last repeat and stops.
    """

    def __init__(self, anchor: int = 0, events: list[str] | None = None) -> None:
        super().__init__(events)
        self.anchor = anchor
        self.decoder = Decoder().feed(B)
        self.pending: int | None = anchor + 1
        self.decoded: Bits | None = None
        self.finish: int | None = None

    def wake(self, by_beep: bool) -> None:
        if not by_beep:
            raise ProtocolError("only the source may be woken by the adversary")

    def act(self, now: int) -> Action:
        if now == self.pending:
            self.pending = None
            return BEEP
        return LISTEN

    def perceive(self, now: int, heard: bool) -> None:
        off = now - self.anchor
        if off % 3:
            if now == self.finish:
                self.done = True
            return
        if off <= 0 or self.decoded is not None:
            return
        self.decoder = dec = self.decoder.feed(B if heard else S)
        if heard:
            self.pending = now + 1
        phase = dec.phase
        if phase is Phase.PAYLOAD:
            return
        if phase is Phase.ERROR:
            raise ProtocolError(f"scrambled broadcast frame at local round {now}")
        if phase is Phase.DONE:
            self.decoded = dec.bits
            self.finish = now + 1
            self.events.append("decoded")


def broadcast_span(m: int) -> int:
    """Rounds from the source's first beep to its last: ``3(2m + 3)``."""
    return 3 * (2 * m + 3)


@dataclass
class BroadcastResult:
    decoded: list[Bits | None]
    finish: list[int]
    wake: list[int]
    trace: Trace

    def to_dict(self) -> dict:
        return {
            "decoded": ["".join(map(str, d)) if d is not None else None for d in self.decoded],
            "finish": self.finish,
            "wake": self.wake,
        }


def run_broadcast(graph: Graph, source: int, msg: Sequence[int] | str, t: int = 0) -> BroadcastResult:
    bits = as_bits(msg)
    if not 0 <= source < graph.n:
        raise ValueError(f"source {source} is not a node")
    if t < 0:
        raise ValueError("wake-up round must be non-negative")
    nodes = [BroadcastSource(bits) if v == source else BroadcastRelay() for v in range(graph.n)]
    budget = graph.n + broadcast_span(len(bits)) + 4
    sim = engine.Simulation(graph, nodes, {source: t})
    trace = sim.run(budget)
    return BroadcastResult(
        decoded=[nd.bits if v == source else nd.decoded for v, nd in enumerate(nodes)],
        finish=list(sim.done_round),
        wake=list(sim.world.tau),
        trace=trace,
    )

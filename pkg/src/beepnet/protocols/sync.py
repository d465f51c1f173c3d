"""Level assignment and agreement on a common "red" round.

The leader ``z`` sends ``num(0)``; a node that decodes ``num(j)`` takes
level ``j + 1`` and forwards ``num(j + 1)`` immediately, so frames move one
BFS layer per ``2ν + 4`` rounds.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import engine
from ..codec import B, S, Decoder, bits_to_int, ceil_log2, num_frame
from ..engine import BEEP, LISTEN, Action, Trace
from ..topology import Graph
from .base import ProtocolError, SubAutomaton


def frame_length(N: int) -> int:
    return 2 * ceil_log2(N) + 4


def sync_guard(N: int) -> int:
    """Idle rounds the leader waits after Find Max before its first frame."""
    return N + 2


class SyncNode(SubAutomaton):
    """``anchor`` is the leader's transmission anchor (first beep at ``anchor + 1``).

    Non-leaders ignore ``anchor`` and listen from ``listen_from`` on.
    """

    def __init__(
        self,
        is_leader: bool,
        N: int,
        listen_from: int = 0,
        anchor: int = 0,
        events: list[str] | None = None,
    ) -> None:
        super().__init__(events)
        self.is_leader = is_leader
        self.N = N
        self.nu = ceil_log2(N)
        self.frame = 2 * self.nu + 4
        self.listen_from = listen_from
        self.level = 0
        self.decoder = Decoder()
        self.tx: frozenset[int] = frozenset()
        self.red: int | None = None
        if is_leader:
            self._transmit(0, anchor)
            self.red = anchor + N * self.frame

    def _transmit(self, value: int, last: int) -> None:
        frame = num_frame(value, self.nu)
        self.tx = frozenset(last + 1 + k for k, c in enumerate(frame) if c == B)

    def act(self, now: int) -> Action:
        return BEEP if now in self.tx else LISTEN

    def perceive(self, now: int, heard: bool) -> None:
        if self.red is None and now >= self.listen_from:
            self.decoder = dec = self.decoder.feed(B if heard else S)
            if dec.error:
                raise ProtocolError(f"scrambled level frame at local round {now}")
            if dec.done:
                self.level = bits_to_int(dec.bits) + 1
                if self.level >= self.N:
                    raise ProtocolError(f"decoded level {self.level} exceeds N - 1")
                self._transmit(self.level, now)
                # ``now`` closes the interval of layer level-1; red is N - level frames on
                self.red = now + (self.N - self.level) * self.frame
                self.events.append("decoded")
        if now == self.red:
            self.done = True
            self.events.append("red")


@dataclass
class SyncResult:
    levels: list[int]
    red: list[int]
    anchor: int
    trace: Trace

    def to_dict(self) -> dict:
        return {"levels": self.levels, "red": self.red, "anchor": self.anchor}


def run_sync(graph: Graph, z: int, t: int, N: int, guard: int | None = None) -> SyncResult:
    """Run synchronisation with leader ``z`` that finished Find Max in round ``t``.

    Every node is awake and listening from round 0; the leader transmits
    from ``t + guard + 1`` (``guard`` defaults to ``N + 2``).
    """
    if N < graph.n:
        raise ValueError("N must bound the number of nodes")
    anchor = t + (sync_guard(N) if guard is None else guard)
    nodes = [SyncNode(v == z, N, 0, anchor) for v in range(graph.n)]
    trace = engine.run(graph, nodes, {v: 0 for v in range(graph.n)}, anchor + N * frame_length(N) + 2)
    return SyncResult([nd.level for nd in nodes], [nd.red for nd in nodes], anchor, trace)

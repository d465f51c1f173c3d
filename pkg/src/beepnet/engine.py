"""Synchronous round executor for the beeping model.

Every awake node either beeps or listens in a round.  A listening node hears
a beep iff at least one neighbour beeps in the same round; multiplicity is
invisible and a beeping node hears nothing.  Dormant nodes listen and are
woken by the first beep they hear, or by the adversary schedule.

Automata see only their own clock: ``now`` is the number of rounds since
the node woke up.  An adversary wakeup in round ``r`` takes effect at the
start of ``r`` (the node already acts in ``r``, with ``now == 0``); a node
woken by a beep in round ``r`` starts acting in ``r + 1`` (``now == 1``).
"""

from __future__ import annotations

import csv
import enum
import io
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .topology import Graph


class Action(enum.IntEnum):
    LISTEN = 0
    BEEP = 1


LISTEN = Action.LISTEN
BEEP = Action.BEEP


class EngineError(RuntimeError):
    pass


class Automaton:
    """Base class for node automata driven by :class:`Simulation`.

    Subclasses override :meth:`act` and :meth:`perceive`.  Protocol events
    (``decoded``, ``red``...) are appended to ``events`` and stamped with the
    global round by the engine.
    """

    done: bool = False

    def __init__(self) -> None:
        self.events: list[str] = []

    def wake(self, by_beep: bool) -> None:
        pass

    def act(self, now: int) -> Action:
        return LISTEN

    def perceive(self, now: int, heard: bool) -> None:
        pass


class TraceRecord(NamedTuple):
    round: int
    node: int
    action: str
    heard: bool
    event: str


FIELDS = ("round", "node", "action", "heard", "event")


class Trace:
    """Append-only run record.

    Only rows carrying information are stored: a beep, a heard beep, or an
    event.  Any (round, node) pair not present listened without hearing.
    Multiple events in one round are joined with ``;``.

    The engine logs one compact entry per round; ``records`` expands them
    into per-node rows on first access.
    """

    def __init__(self, n: int, records: Iterable[TraceRecord] = (), start_round: int = 0,
                 end_round: int = -1, completed: bool = False) -> None:
        self.n = n
        self._records = list(records)
        self._rounds: list[tuple] = []
        self.start_round = start_round
        self.end_round = end_round
        self.completed = completed

    def __repr__(self) -> str:
        return (f"Trace(n={self.n}, rounds={self.start_round}..{self.end_round}, "
                f"records={len(self.records)}, completed={self.completed})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return (self.n, self.records, self.start_round, self.end_round, self.completed) == \
            (other.n, other.records, other.start_round, other.end_round, other.completed)

    def log_round(self, r: int, beepers: Sequence[int], heard: set[int], events: dict[int, list[str]]) -> None:
        # flat tuples of ints are untracked by the garbage collector, sets and dicts are not
        ev = tuple((v, ";".join(tags)) for v, tags in events.items()) if events else ()
        self._rounds.append((r, tuple(beepers), tuple(heard), ev))

    @property
    def records(self) -> list[TraceRecord]:
        if self._rounds:
            append = self._records.append
            # tuple.__new__ skips the NamedTuple constructor, which dominates long runs
            new = tuple.__new__
            for r, beepers, heard, ev in self._rounds:
                beep_set = set(beepers)
                heard_set = set(heard)
                events = dict(ev)
                for v in sorted(beep_set.union(heard_set, events)):
                    append(new(TraceRecord, (r, v, "beep" if v in beep_set else "listen", v in heard_set,
                                             events.get(v, ""))))
            self._rounds.clear()
        return self._records

    def beeps(self, node: int) -> list[int]:
        return [r.round for r in self.records if r.node == node and r.action == "beep"]

    def heard(self, node: int) -> list[int]:
        return [r.round for r in self.records if r.node == node and r.heard]

    def events(self, tag: str) -> list[tuple[int, int]]:
        return [(r.round, r.node) for r in self.records if r.event and tag in r.event.split(";")]

    def event_round(self, node: int, tag: str) -> int | None:
        for r in self.records:
            if r.node == node and r.event and tag in r.event.split(";"):
                return r.round
        return None

    def wake_rounds(self) -> dict[int, int]:
        return {node: rnd for rnd, node in self.events("wake")}

    def beep_set(self) -> set[tuple[int, int]]:
        return {(r.round, r.node) for r in self.records if r.action == "beep"}

    # serialisation ---------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIELDS)
        for r in self.records:
            w.writerow((r.round, r.node, r.action, int(r.heard), r.event))
        return buf.getvalue()

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(dict(zip(FIELDS, (r.round, r.node, r.action, r.heard, r.event)))) + "\n"
            for r in self.records
        )

    def write(self, path: str | Path, fmt: str | None = None) -> None:
        fmt = fmt or ("jsonl" if str(path).endswith((".jsonl", ".json")) else "csv")
        text = self.to_jsonl() if fmt == "jsonl" else self.to_csv()
        Path(path).write_text(text)

    @classmethod
    def from_records(cls, records: Iterable[TraceRecord], n: int | None = None) -> Trace:
        records = sorted(records, key=lambda r: (r.round, r.node))
        if n is None:
            n = 1 + max((r.node for r in records), default=-1)
        start = records[0].round if records else 0
        end = records[-1].round if records else -1
        return cls(n, records, start, end, completed=True)

    @classmethod
    def from_csv(cls, text: str, n: int | None = None) -> Trace:
        rows = csv.DictReader(io.StringIO(text))
        if tuple(rows.fieldnames or ()) != FIELDS:
            raise ValueError(f"trace header must be {','.join(FIELDS)}")
        recs = [
            TraceRecord(int(d["round"]), int(d["node"]), d["action"], d["heard"] in ("1", "true", "True"), d["event"])
            for d in rows
        ]
        return cls.from_records(recs, n)

    @classmethod
    def from_jsonl(cls, text: str, n: int | None = None) -> Trace:
        recs = []
        for line in text.splitlines():
            if line.strip():
                d = json.loads(line)
                recs.append(TraceRecord(int(d["round"]), int(d["node"]), d["action"], bool(d["heard"]), d["event"]))
        return cls.from_records(recs, n)

    @classmethod
    def read(cls, path: str | Path, n: int | None = None) -> Trace:
        text = Path(path).read_text()
        if str(path).endswith((".jsonl", ".json")):
            return cls.from_jsonl(text, n)
        return cls.from_csv(text, n)


class SimulationTimeout(EngineError):
    """Round budget exhausted before every automaton finished."""

    def __init__(self, trace: Trace, rounds: int) -> None:
        super().__init__(f"not all nodes finished within {rounds} rounds")
        self.trace = trace


@dataclass
class WorldState:
    round: int
    awake: list[bool]
    tau: list[int | None]


class Simulation:
    """One single-threaded beeping-model run over a fixed graph."""

    def __init__(self, graph: Graph, automata: Sequence[Automaton], schedule: Mapping[int, int]) -> None:
        if len(automata) != graph.n:
            raise EngineError("need exactly one automaton per node")
        if not schedule:
            raise EngineError("adversary schedule must wake at least one node")
        for node, rnd in schedule.items():
            if not 0 <= node < graph.n:
                raise EngineError(f"scheduled node {node} out of range")
            if rnd < 0:
                raise EngineError("wakeup rounds are non-negative")
        self.graph = graph
        self.automata = list(automata)
        self._due: dict[int, list[int]] = {}
        for node, rnd in sorted(schedule.items()):
            self._due.setdefault(rnd, []).append(node)
        start = min(self._due)
        self.world = WorldState(start, [False] * graph.n, [None] * graph.n)
        self.trace = Trace(graph.n, start_round=start)
        self._dormant = graph.n
        self.done_round: list[int | None] = [None] * graph.n
        # (node, automaton, act, perceive, wake round) of every awake, unfinished node
        self._live: list[tuple] = []

    def _wake(self, v: int, r: int, by_beep: bool) -> None:
        self.world.awake[v] = True
        self.world.tau[v] = r
        self._dormant -= 1
        auto = self.automata[v]
        auto.wake(by_beep)
        self._live.append((v, auto, auto.act, auto.perceive, r))

    @property
    def finished(self) -> bool:
        return not self._live and (not self._dormant or not self._due)

    def step(self) -> None:
        world, adj = self.world, self.graph.adj
        r = world.round
        events: dict[int, list[str]] = {}
        for v in self._due.pop(r, ()):
            if not world.awake[v]:
                self._wake(v, r, by_beep=False)
                events[v] = ["wake"]
        live = self._live
        beepers = []
        for v, _, act, _, t0 in live:
            a = act(r - t0)
            if a:
                beepers.append(v)
            elif a is None:
                raise EngineError(f"automaton of node {v} returned no action in round {r}")
        heard: set[int] = set()
        for b in beepers:
            heard.update(adj[b])
        if beepers:
            heard.difference_update(beepers)
        finished = False
        for v, auto, _, perceive, t0 in live:
            perceive(r - t0, v in heard)
            if auto.events:
                events.setdefault(v, []).extend(auto.events)
                auto.events.clear()
            if auto.done:
                events.setdefault(v, []).append("done")
                self.done_round[v] = r
                finished = True
        if self._dormant and heard:
            awake = world.awake
            for v in sorted(heard):
                if not awake[v]:
                    self._wake(v, r, by_beep=True)
                    events.setdefault(v, []).append("wake")
        if finished:
            self._live = [e for e in self._live if not e[1].done]
        if beepers or heard or events:
            self.trace.log_round(r, beepers, heard, events)
        self.trace.end_round = r
        world.round = r + 1

    def run(self, max_rounds: int) -> Trace:
        for _ in range(max_rounds):
            if self.finished:
                break
            self.step()
        self.trace.completed = self.finished
        if not self.trace.completed:
            raise SimulationTimeout(self.trace, max_rounds)
        return self.trace


def run(graph: Graph, automata: Sequence[Automaton], schedule: Mapping[int, int], max_rounds: int) -> Trace:
    """Step until every node is awake and done; raise SimulationTimeout otherwise."""
    sim = Simulation(graph, automata, schedule)
    return sim.run(max_rounds)


def random_schedule(n: int, rng: random.Random, spread: int | None = None) -> dict[int, int]:
    """Wake a random non-empty subset of nodes at random rounds in ``[0, spread]``.

    ``spread`` defaults to ``n - 1``; later entries for nodes already woken by
    a beep are simply ignored by the engine.
    """
    spread = n - 1 if spread is None else spread
    k = rng.randint(1, n)
    nodes = sorted(rng.sample(range(n), k))
    sched = {v: rng.randint(0, spread) for v in nodes}
    # keep round 0 as the first wakeup so totals are measured from zero
    first = min(sched.values())
    return {v: r - first for v, r in sched.items()}


def read_schedule(path: str | Path) -> dict[int, int]:
    sched = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            node, rnd = line.split()
            sched[int(node)] = int(rnd)
    return sched


def write_schedule(schedule: Mapping[int, int], path: str | Path) -> None:
    Path(path).write_text("".join(f"{v} {r}\n" for v, r in sorted(schedule.items())))

"""Checkers for broadcast traces, Find Max runs and gossip reports.

The checkers read traces and reports only.  Expected rounds are recomputed
here from closed forms and BFS distances, never taken from the automata.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .codec import B, S, DecodeError, as_bits, bits_str, ceil_log2, decode, encode
from .engine import Trace
from .topology import Graph, bfs, diameter, eccentricity, multi_source_bfs


class TraceError(ValueError):
    pass


@dataclass
class CheckReport:
    name: str
    passed: bool
    expected: Any = None
    observed: Any = None
    witness: tuple[int, int] | None = None
    checks: list[CheckReport] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.passed and self.witness is None:
            raise ValueError(f"failing check {self.name!r} needs a (round, node) witness")

    def __bool__(self) -> bool:
        return self.passed

    def failures(self) -> list[CheckReport]:
        out = [] if self.passed or self.checks else [self]
        for c in self.checks:
            out.extend(c.failures())
        return out

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"name": self.name, "passed": self.passed}
        if self.expected is not None or self.observed is not None:
            d["expected"] = self.expected
            d["observed"] = self.observed
        if self.witness is not None:
            d["witness"] = {"round": self.witness[0], "node": self.witness[1]}
        if self.checks:
            d["checks"] = [c.to_dict() for c in self.checks]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _ok(name: str, expected: Any = None, observed: Any = None) -> CheckReport:
    return CheckReport(name, True, expected, observed)


def _combine(name: str, checks: Sequence[CheckReport], **extra: Any) -> CheckReport:
    failed = [c for c in checks if not c.passed]
    witness = failed[0].witness if failed else None
    return CheckReport(name, not failed, extra.get("expected"), extra.get("observed"), witness, list(checks))


# -- broadcast -------------------------------------------------------------


def check_broadcast(
    trace: Trace,
    graph: Graph,
    source: int,
    msg: Sequence[int] | str,
    t: int,
    decoded: Mapping[int, Sequence[int] | str] | Sequence[Any] | None = None,
) -> CheckReport:
    """Layer timing, mod-3 slots, exact beep pattern, finish rounds and decoding."""
    bits = as_bits(msg)
    m = len(bits)
    symbols = encode(bits)
    dist = bfs(graph, source)
    wake = trace.wake_rounds()
    done = {node: rnd for rnd, node in trace.events("done")}
    missing = [v for v in range(graph.n) if v not in wake or v not in done]
    if missing:
        raise TraceError(f"trace lacks wake/done events for nodes {missing}")

    beeps: dict[int, list[int]] = {v: [] for v in range(graph.n)}
    heard: dict[int, set[int]] = {v: set() for v in range(graph.n)}
    for rec in trace.records:
        if rec.action == "beep":
            beeps[rec.node].append(rec.round)
        if rec.heard:
            heard[rec.node].add(rec.round)

    # mod-3 slot invariant
    slot = _ok("slot", "beep rounds = t + dist (mod 3)")
    for v in range(graph.n):
        bad = [r for r in beeps[v] if (r - t - dist[v]) % 3]
        if bad:
            slot = CheckReport("slot", False, (t + dist[v]) % 3, bad[0] % 3, (bad[0], v))
            break

    # every node repeats the source frame shifted by its distance
    pattern = _ok("pattern")
    for v in range(graph.n):
        want = {t + 3 * k + dist[v] for k, c in enumerate(symbols) if c == B}
        diff = want.symmetric_difference(beeps[v])
        if diff:
            r = min(diff)
            pattern = CheckReport("pattern", False, r in want, r in beeps[v], (r, v))
            break

    timing = []
    for v in range(graph.n):
        i = dist[v]
        if v == source:
            want_wake, want_done = t, t + 3 * (2 * m + 3)
        else:
            want_wake, want_done = t + i - 1, t + i - 1 + 3 * (2 * m + 4) - 2
        if wake[v] != want_wake:
            timing.append(CheckReport(f"wake[{v}]", False, want_wake, wake[v], (wake[v], v)))
        if done[v] != want_done:
            timing.append(CheckReport(f"finish[{v}]", False, want_done, done[v], (done[v], v)))
    finish = _combine("finish", timing) if timing else _ok("finish", "t+i-1+3(2m+4)-2")

    dec_checks = []
    for v in range(graph.n):
        if v == source:
            got = bits
        else:
            R = wake[v]
            stream = (B if R + 3 * k in heard[v] else S for k in range((done[v] - R) // 3 + 1))
            try:
                got = decode(stream)
            except DecodeError:
                got = None
        if got != bits:
            dec_checks.append(CheckReport(f"decode[{v}]", False, bits_str(bits),
                                          None if got is None else bits_str(got), (done[v], v)))
        if decoded is not None:
            rep = decoded[v]
            if rep is None or as_bits(rep) != bits:
                dec_checks.append(CheckReport(f"reported[{v}]", False, bits_str(bits),
                                              None if rep is None else bits_str(as_bits(rep)), (done[v], v)))
    dec = _combine("decode", dec_checks) if dec_checks else _ok("decode", bits_str(bits), bits_str(bits))

    return _combine("broadcast", [slot, pattern, finish, dec])


# -- find max --------------------------------------------------------------


def check_findmax(
    result: Any,
    graph: Graph,
    participants: Iterable[int] | None,
    schedule: Mapping[int, int],
    N: int,
    L: int | None = None,
) -> CheckReport:
    """Winner maximality, decode agreement, wake-up oracle and stage-window timing.

    ``result`` needs ``winner``, ``decoded`` and ``trace`` attributes.
    """
    L = graph.L if L is None else L
    lam = ceil_log2(L)
    part = set(range(graph.n)) if participants is None else set(participants)
    best = max(part, key=lambda v: graph.labels[v]) if part else None
    want_label = graph.labels[best] if part else 0
    trace: Trace = result.trace
    wake = trace.wake_rounds()
    end_round = trace.end_round
    checks = []

    if result.winner != best:
        checks.append(CheckReport("winner", False, best, result.winner, (end_round, best if best is not None else 0)))
    bad = [v for v in range(graph.n) if result.decoded[v] != want_label]
    if bad:
        checks.append(CheckReport("decode", False, want_label, result.decoded[bad[0]], (end_round, bad[0])))

    tau = multi_source_bfs(graph, dict(schedule))
    bad = [v for v in range(graph.n) if wake.get(v) != tau[v]]
    if bad:
        checks.append(CheckReport("wake", False, tau[bad[0]], wake.get(bad[0]), (tau[bad[0]], bad[0])))

    first, last = 2 * N + 1, lam * (4 * N + 1) + 2 * N
    # neighbours' clocks differ by at most one round per hop
    skew = graph.n - 1
    for rec in trace.records:
        v, r = rec.node, rec.round
        local = r - wake[v]
        if rec.action == "beep" and not (local == 1 or first <= local <= last):
            checks.append(CheckReport("beep_window", False, "wake beep or stage window", local, (r, v)))
            break
        if rec.heard and not (local <= 2 or first - skew <= local <= last + skew):
            checks.append(CheckReport("heard_window", False, "wake wave or stage window", local, (r, v)))
            break
    return _combine("findmax", checks) if checks else _ok("findmax", want_label, want_label)


def connected_graphs(n: int) -> list[tuple[tuple[int, int], ...]]:
    """Edge lists of all connected simple graphs on ``n`` nodes, one per isomorphism class."""
    pairs = list(itertools.combinations(range(n), 2))
    perms = list(itertools.permutations(range(n)))
    seen: set[tuple] = set()
    out = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
        if len(edges) < n - 1:
            continue
        canon = min(tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in edges)) for p in perms)
        if canon in seen:
            continue
        seen.add(canon)
        try:
            Graph.from_edges(n, canon)
        except ValueError:
            continue
        out.append(canon)
    return out


def automorphisms(n: int, edges: Sequence[tuple[int, int]]) -> list[tuple[int, ...]]:
    es = {frozenset(e) for e in edges}
    return [p for p in itertools.permutations(range(n)) if {frozenset((p[a], p[b])) for a, b in edges} == es]


def lipschitz_schedules(n: int, edges: Sequence[tuple[int, int]], spread: int | None = None) -> list[tuple[int, ...]]:
    """Every reachable wake-up vector: values differ by at most 1 across an edge, minimum 0.

    Waking every node by the adversary at exactly these rounds realises each
    vector; any other schedule collapses to one of them once beeps propagate.
    """
    top = n - 1 if spread is None else min(spread, n - 1)
    out = []
    for tau in itertools.product(range(top + 1), repeat=n):
        if min(tau) == 0 and all(abs(tau[a] - tau[b]) <= 1 for a, b in edges):
            out.append(tau)
    return out


def findmax_cases(
    n: int,
    label_space: int,
    spread: int | None = None,
    subsets: bool = False,
) -> Iterator[tuple[tuple, tuple[int, ...], frozenset[int], tuple[int, ...], int]]:
    """Yield ``(edges, labels, participants, tau, weight)`` orbit representatives.

    Cases equivalent under a graph automorphism are simulated once; ``weight``
    is the number of original cases the representative stands for.  Labels of
    non-participants cannot influence a run and are filled with the smallest
    unused values.
    """
    for edges in connected_graphs(n):
        auts = automorphisms(n, edges)
        schedules = lipschitz_schedules(n, edges, spread)
        part_sets = [frozenset(s) for k in range(n + 1) for s in itertools.combinations(range(n), k)] \
            if subsets else [frozenset(range(n))]
        for part in part_sets:
            order = sorted(part)
            for chosen in itertools.permutations(range(label_space), len(order)):
                lab = dict(zip(order, chosen))
                for tau in schedules:
                    key = (tuple(lab.get(v, -1) for v in range(n)), tau)
                    images = set()
                    for p in auts:
                        # node v of the image is node p^-1(v) of the original
                        inv = [0] * n
                        for a, b in enumerate(p):
                            inv[b] = a
                        images.add((tuple(key[0][inv[v]] for v in range(n)), tuple(tau[inv[v]] for v in range(n))))
                    if key != min(images):
                        continue
                    free = iter(x for x in range(label_space) if x not in chosen)
                    labels = tuple(lab[v] if v in lab else next(free) for v in range(n))
                    yield edges, labels, part, tau, len(images)


def _sample_cases(sizes: Sequence[int], label_space: int, spread: int | None, subsets: bool,
                  count: int, seed: int) -> list:
    rng = random.Random(seed)
    pools = {n: [(e, lipschitz_schedules(n, e, spread)) for e in connected_graphs(n)] for n in sizes}
    out = []
    for _ in range(count):
        n = rng.choice(sizes)
        edges, schedules = rng.choice(pools[n])
        labels = tuple(rng.sample(range(label_space), n))
        part = frozenset(v for v in range(n) if rng.random() < 0.5) if subsets else frozenset(range(n))
        out.append((edges, labels, part, rng.choice(schedules), 1))
    return out


def exhaustive_findmax(
    n_max: int = 3,
    label_space: int = 8,
    schedule_spread: int | None = None,
    *,
    subsets: bool = False,
    sizes: Iterable[int] | None = None,
    sample: int | None = None,
    seed: int = 0,
) -> CheckReport:
    """Run Find Max on every case (or a seeded sample) and check each run.

    ``observed`` reports ``cases`` (orbit-expanded count) and ``runs``
    (simulations actually executed).
    """
    from .protocols.findmax import run_find_max

    if n_max > 5 or label_space > 16:
        raise ValueError("exhaustive search limited to n <= 5 and labels < 16")
    sizes = range(1, n_max + 1) if sizes is None else sizes
    sizes = [n for n in sizes if n <= label_space]
    if sample is None:
        cases: Iterable = itertools.chain.from_iterable(
            findmax_cases(n, label_space, schedule_spread, subsets) for n in sizes)
    else:
        cases = _sample_cases(sizes, label_space, schedule_spread, subsets, sample, seed)
    covered = runs = 0
    for edges, labels, part, tau, weight in cases:
        n = len(labels)
        g = Graph.from_edges(n, edges, labels, label_space)
        sched = {v: tau[v] for v in range(n)}
        res = run_find_max(g, part, sched, n, label_space)
        rep = check_findmax(res, g, part, sched, n, label_space)
        runs += 1
        covered += 1 if sample is not None else weight
        if not rep.passed:
            return CheckReport("exhaustive_findmax", False, "all cases pass",
                               {"edges": edges, "labels": labels, "participants": sorted(part), "tau": tau},
                               rep.witness, [rep])
    return _ok("exhaustive_findmax", "all cases pass", {"cases": covered, "runs": runs})


# -- gossip ----------------------------------------------------------------


def gossip_closed_form(graph: Graph, schedule: Mapping[int, int], N: int, L: int, M: int) -> dict[str, int]:
    """Expected leader, rounds and bounds of a gossip run, from the schedule formulas alone."""
    lam = ceil_log2(L)
    nu = ceil_log2(N)
    z = max(range(graph.n), key=lambda v: graph.labels[v])
    tau = multi_source_bfs(graph, dict(schedule))
    rho = eccentricity(graph, z)
    d_star = max(1, 2 * rho)
    m = d_star.bit_length()
    findmax_end = tau[z] + lam * (4 * N + 1) + 2 * N
    red = findmax_end + (N + 2) + N * (2 * nu + 4)
    blue = red + rho * N + d_star + 6 * m + 12
    x = lam * (4 * d_star + 1) + 2 * d_star + 1
    y = d_star + 6 * M + 12
    end = blue + N * x + (N + 1) * y
    first = min(schedule.values())
    return {"z": z, "rho": rho, "d_star": d_star, "red": red, "blue": blue, "x": x, "y": y,
            "end": end, "total": end - first}


def bound_rhs(N: int, M: int, D: int, L: int) -> int:
    return 100 * N * (M + D * ceil_log2(L))


def check_gossip(
    result: Any,
    graph: Graph,
    messages: Mapping[int, Sequence[int] | str],
    schedule: Mapping[int, int],
    N: int,
    L: int,
    M: int,
) -> CheckReport:
    """Check a gossip report (``GossipResult`` or its dict form) against the oracles."""
    if isinstance(result, dict):
        from .protocols.gossip import GossipResult

        result = GossipResult.from_dict(result)
    nodes = result.nodes
    cf = gossip_closed_form(graph, schedule, N, L, M)
    z = cf["z"]
    end = result.end
    truth = {lab: bits_str(as_bits(b)) for lab, b in messages.items()}
    dist = bfs(graph, z)
    D = diameter(graph)
    checks: list[CheckReport] = []

    def agree(name: str, key: str, want: Any) -> None:
        bad = [r for r in nodes if getattr(r, key) != want]
        if bad:
            r = bad[0]
            rnd = getattr(r, key) if key in ("red", "blue") and isinstance(getattr(r, key), int) else end
            checks.append(CheckReport(name, False, want, getattr(r, key), (rnd, r.node)))
        else:
            checks.append(_ok(name, want, want))

    bad = [r for r in nodes if r.received != truth]
    checks.append(CheckReport("maps", not bad, truth, bad[0].received if bad else truth,
                              (end, bad[0].node) if bad else None))

    leaders = [r.node for r in nodes if r.is_leader]
    checks.append(CheckReport("leader", leaders == [z], [z], leaders, None if leaders == [z] else (end, z)))
    agree("leader_label", "leader_label", graph.labels[z])

    tau = multi_source_bfs(graph, dict(schedule))
    bad = [r for r in nodes if r.wake != tau[r.node]]
    checks.append(CheckReport("wake", not bad, "multi-source BFS", None if not bad else bad[0].wake,
                              (bad[0].wake, bad[0].node) if bad else None))

    bad = [r for r in nodes if r.level != dist[r.node]]
    checks.append(CheckReport("levels", not bad, dist, [r.level for r in nodes],
                              (nodes[0].red, bad[0].node) if bad else None))

    agree("red", "red", cf["red"])
    agree("rho", "rho", cf["rho"])
    agree("d_star", "d_star", cf["d_star"])
    if graph.n >= 2:
        ok = D <= cf["d_star"] <= 2 * D and all(D <= r.d_star <= 2 * D for r in nodes)
        checks.append(CheckReport("d_star_bounds", ok, f"{D} <= D* <= {2 * D}", nodes[0].d_star,
                                  None if ok else (nodes[0].blue, z)))
    agree("blue", "blue", cf["blue"])

    ranks = {r.node: r.rank for r in nodes}
    want_order = sorted(range(graph.n), key=lambda v: -graph.labels[v])
    want_ranks = {v: i for i, v in enumerate(want_order)}
    bad = [v for v in range(graph.n) if ranks[v] != want_ranks[v]]
    checks.append(CheckReport("ranks", not bad, want_ranks, ranks, (cf["blue"], bad[0]) if bad else None))

    want_table = {j: (graph.labels[want_order[j]] if j < graph.n else 0) for j in range(N + 1)}
    bad = [r for r in nodes if r.rank_labels != want_table]
    checks.append(CheckReport("rank_labels", not bad, want_table, bad[0].rank_labels if bad else want_table,
                              (cf["blue"], bad[0].node) if bad else None))

    want_vacant = list(range(graph.n, N + 1))
    bad = [r for r in nodes if r.vacant != want_vacant]
    checks.append(CheckReport("vacant", not bad, want_vacant, bad[0].vacant if bad else want_vacant,
                              (end, bad[0].node) if bad else None))

    bad = [r for r in nodes if r.end != cf["end"]]
    checks.append(CheckReport("schedule", not bad and result.total_rounds == cf["total"],
                              cf["total"], result.total_rounds,
                              None if not bad and result.total_rounds == cf["total"] else (end, (bad or nodes)[0].node)))

    if D >= 1:
        rhs = bound_rhs(N, M, D, L)
        ok = result.total_rounds <= rhs
        checks.append(CheckReport("bound", ok, f"<= {rhs}", result.total_rounds, None if ok else (end, z)))
    return _combine("gossip", checks)

"""Command-line front end: generate graphs, run protocols, check traces, sweep parameters.

Exit codes: 0 when every embedded check passes, 2 for invalid input or
configuration, 3 when a check fails or a protocol run breaks down.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .codec import as_bits
from .engine import EngineError, Trace, random_schedule, read_schedule, write_schedule
from .protocols import (
    ProtocolError,
    random_messages,
    read_messages,
    run_broadcast,
    run_find_max,
    run_gossip,
)
from .topology import KINDS, Graph, diameter, format_graph, generate, read_graph, write_graph
from .verify import CheckReport, bound_rhs, check_broadcast, check_findmax, check_gossip, exhaustive_findmax

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3

# Built-in values used when neither a flag nor the config file sets an option.
DEFAULTS: dict[str, Any] = {
    "kind": "path",
    "n": 5,
    "p": 0.1,
    "source": 0,
    "t": 0,
    "format": "csv",
    "jobs": 1,
    "protocol": "gossip",
    "n_max": 3,
    "label_space": 8,
    "M": 8,
    "L": None,
    "N": None,
}

COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "sweep": {"kind": "random_connected", "n": "4..8", "M": "1..4", "L": "1024"},
}


class ConfigError(ValueError):
    pass


def env_seed() -> int:
    raw = os.environ.get("BEEPNET_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"BEEPNET_SEED must be an integer, got {raw!r}") from None


def parse_range(text: str) -> list[int]:
    """``"4..16"`` -> 4..16 inclusive, ``"3,5,9"`` -> list, ``"7"`` -> [7]."""
    out: list[int] = []
    try:
        for part in str(text).split(","):
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise ConfigError(f"bad range {text!r}; expected a..b or comma-separated integers") from None
    if not out:
        raise ConfigError(f"empty range {text!r}")
    return out


# -- option resolution -----------------------------------------------------


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge flags over the config file over the built-in defaults."""
    cfg: dict[str, Any] = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    opts: dict[str, Any] = {}
    for key, value in vars(args).items():
        if key in ("func", "config"):
            continue
        if value is None:
            value = cfg.get(key, defaults.get(key))
        opts[key] = value
    unknown = set(cfg) - set(opts)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if opts.get("seed") is None:
        opts["seed"] = env_seed()
    return opts


def load_graph(opts: dict[str, Any]) -> Graph:
    if opts.get("graph"):
        graph = read_graph(opts["graph"])
    else:
        kind = opts["kind"]
        seed = opts["seed"] if kind.startswith("random") else None
        graph = generate(kind, int(opts["n"]), seed, p=float(opts["p"]))
    labels = opts.get("labels")
    L = opts.get("L")
    if labels == "random":
        L = int(L) if L is not None else max(graph.n, graph.L)
        rng = random.Random(f"labels:{opts['seed']}")
        graph = graph.relabel(rng.sample(range(L), graph.n), L)
    elif labels:
        values = [int(x) for x in Path(labels).read_text().split()]
        if len(values) != graph.n:
            raise ConfigError(f"label file has {len(values)} labels for {graph.n} nodes")
        graph = graph.relabel(values, max(int(L or 0), max(values) + 1, graph.L))
    elif L is not None and int(L) != graph.L:
        graph = graph.relabel(graph.labels, int(L))
    opts["L"], opts["n"] = graph.L, graph.n
    return graph


def load_schedule(opts: dict[str, Any], graph: Graph) -> dict[int, int]:
    if opts.get("wake"):
        return read_schedule(opts["wake"])
    return {v: 0 for v in range(graph.n)}


def emit(opts: dict[str, Any], report: dict[str, Any]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if opts.get("report"):
        Path(opts["report"]).write_text(text)
    else:
        sys.stdout.write(text)


def save_trace(opts: dict[str, Any], trace: Trace) -> None:
    if opts.get("trace"):
        trace.write(opts["trace"], opts["format"])


def finish(opts: dict[str, Any], command: str, result: Any, check: CheckReport) -> int:
    config = {k: v for k, v in sorted(opts.items()) if v is not None}
    emit(opts, {"command": command, "version": __version__, "config": config,
                "result": result, "check": check.to_dict()})
    return EXIT_OK if check.passed else EXIT_CHECK


# -- subcommands -----------------------------------------------------------


def cmd_gen(opts: dict[str, Any]) -> int:
    graph = load_graph(opts)
    if opts.get("output"):
        write_graph(graph, opts["output"])
    else:
        sys.stdout.write(format_graph(graph))
    if opts.get("wake_out"):
        rng = random.Random(f"wake:{opts['seed']}")
        write_schedule(random_schedule(graph.n, rng), opts["wake_out"])
    return EXIT_OK


def cmd_broadcast(opts: dict[str, Any]) -> int:
    graph = load_graph(opts)
    if opts.get("msg") is None:
        raise ConfigError("broadcast needs --msg")
    msg = as_bits(opts["msg"])
    source, t = int(opts["source"]), int(opts["t"])
    if not 0 <= source < graph.n:
        raise ConfigError(f"source {source} is not a node")
    res = run_broadcast(graph, source, msg, t)
    save_trace(opts, res.trace)
    check = check_broadcast(res.trace, graph, source, msg, t, res.decoded)
    return finish(opts, "broadcast", res.to_dict(), check)


def cmd_findmax(opts: dict[str, Any]) -> int:
    graph = load_graph(opts)
    N = int(opts["N"] or graph.n)
    sched = load_schedule(opts, graph)
    part = None
    if opts.get("participants") not in (None, "all"):
        part = [int(x) for x in str(opts["participants"]).split(",") if x]
    res = run_find_max(graph, part, sched, N, graph.L)
    save_trace(opts, res.trace)
    check = check_findmax(res, graph, part, sched, N, graph.L)
    return finish(opts, "findmax", res.to_dict(), check)


def _messages(opts: dict[str, Any], graph: Graph) -> dict[int, tuple[int, ...]]:
    src = opts.get("messages")
    if src in (None, "random"):
        return random_messages(graph.labels, int(opts["M"]), random.Random(f"messages:{opts['seed']}"))
    return read_messages(src)


def cmd_gossip(opts: dict[str, Any]) -> int:
    graph = load_graph(opts)
    N, L, M = int(opts["N"] or graph.n), graph.L, int(opts["M"])
    msgs = _messages(opts, graph)
    if max(len(b) for b in msgs.values()) > M:
        raise ConfigError(f"a message is longer than M={M}")
    sched = load_schedule(opts, graph)
    res = run_gossip(graph, msgs, sched, N, L, M)
    save_trace(opts, res.trace)
    check = check_gossip(res, graph, msgs, sched, N, L, M)
    if opts.get("result"):
        Path(opts["result"]).write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n")
    return finish(opts, "gossip", res.to_dict(), check)


def cmd_verify(opts: dict[str, Any]) -> int:
    protocol = opts["protocol"]
    if protocol == "findmax":
        check = exhaustive_findmax(int(opts["n_max"]), int(opts["label_space"]), opts.get("spread"),
                                   subsets=bool(opts.get("subsets")), sample=opts.get("sample"),
                                   seed=int(opts["seed"]))
        return finish(opts, "verify", None, check)
    graph = load_graph(opts)
    if protocol == "broadcast":
        if not opts.get("trace") or opts.get("msg") is None:
            raise ConfigError("verify --protocol broadcast needs --trace and --msg")
        trace = Trace.read(opts["trace"], graph.n)
        check = check_broadcast(trace, graph, int(opts["source"]), opts["msg"], int(opts["t"]))
        return finish(opts, "verify", None, check)
    if not opts.get("result"):
        raise ConfigError("verify --protocol gossip needs --result")
    data = json.loads(Path(opts["result"]).read_text())
    msgs = _messages(opts, graph)
    sched = load_schedule(opts, graph)
    check = check_gossip(data, graph, msgs, sched, data["N"], data["L"], data["M"])
    return finish(opts, "verify", None, check)


SWEEP_COLUMNS = ("n", "D", "L", "M", "total_rounds", "bound_rhs")


def sweep_row(kind: str, n: int, L: int, M: int, seed: int) -> dict[str, int]:
    """One seeded gossip instance with ``N = n``; raises if its checks fail."""
    rng = random.Random(f"{seed}:{kind}:{n}:{L}:{M}")
    graph = generate(kind, n, rng.randrange(2**32) if kind.startswith("random") else None, L=L)
    graph = graph.relabel(rng.sample(range(L), n), L)
    msgs = random_messages(graph.labels, M, rng)
    sched = random_schedule(n, rng)
    res = run_gossip(graph, msgs, sched, n, L, M)
    check = check_gossip(res, graph, msgs, sched, n, L, M)
    if not check.passed:
        raise ProtocolError(f"checks failed for n={n} M={M}: {[c.name for c in check.failures()]}")
    D = diameter(graph)
    return {"n": n, "D": D, "L": L, "M": M, "total_rounds": res.total_rounds,
            "bound_rhs": bound_rhs(n, M, D, L)}


def _sweep_task(task: tuple) -> dict[str, int]:
    return sweep_row(*task)


def cmd_sweep(opts: dict[str, Any]) -> int:
    if opts["protocol"] != "gossip":
        raise ConfigError("sweep supports --protocol gossip only")
    kind = opts["kind"]
    ns = parse_range(opts["n"])
    Ms = parse_range(opts["M"])
    Ls = parse_range(opts["L"])
    if min(ns) < 1 or min(Ms) < 1:
        raise ConfigError("n and M must be positive")
    tasks = [(kind, n, L, M, int(opts["seed"])) for n in ns for L in Ls for M in Ms if n <= L]
    jobs = int(opts["jobs"])
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(t) for t in tasks]
    buf = io.StringIO()
    w = csv.DictWriter(buf, SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if opts.get("output"):
        Path(opts["output"]).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    over = [r for r in rows if r["total_rounds"] > r["bound_rhs"] and r["D"] > 0]
    return EXIT_CHECK if over else EXIT_OK


# -- parser ----------------------------------------------------------------


def _graph_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph")
    g.add_argument("-g", "--graph", help="graph file (n e L / edges / labels)")
    g.add_argument("--kind", choices=KINDS, help="generator kind when no --graph is given")
    g.add_argument("--n", help="generator size (sweep: range a..b)")
    g.add_argument("--p", type=float, help="extra-edge probability for random_connected")
    g.add_argument("--seed", type=int, help="seed; defaults to $BEEPNET_SEED or 0")
    g.add_argument("--labels", help="'random' or a file of labels in node order")
    g.add_argument("--L", help="label space size")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of option values; flags take precedence")
    p.add_argument("--trace", help="trace output path (verify: trace input)")
    p.add_argument("--format", choices=("csv", "jsonl"), help="trace format")
    p.add_argument("--report", help="report JSON path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beepnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph file and optionally a wake-up schedule")
    _graph_flags(p)
    p.add_argument("--config")
    p.add_argument("-o", "--output", help="graph output path (default: stdout)")
    p.add_argument("--wake-out", help="also write a random wake-up schedule here")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("broadcast", help="broadcast one message from a source")
    _graph_flags(p)
    _common(p)
    p.add_argument("--source", type=int)
    p.add_argument("--msg", help="bit string, e.g. 101")
    p.add_argument("--t", type=int, help="wake-up round of the source")
    p.set_defaults(func=cmd_broadcast)

    p = sub.add_parser("findmax", help="elect the maximum label")
    _graph_flags(p)
    _common(p)
    p.add_argument("--wake", help="schedule file of 'node round' lines (default: all at 0)")
    p.add_argument("--participants", help="'all' or comma-separated node ids")
    p.add_argument("--N", type=int)
    p.set_defaults(func=cmd_findmax)

    p = sub.add_parser("gossip", help="run the full gossiping pipeline")
    _graph_flags(p)
    _common(p)
    p.add_argument("--msg", "--messages", dest="messages", help="'label bits' file or 'random'")
    p.add_argument("--wake")
    p.add_argument("--N", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--result", help="also write the gossip result JSON here")
    p.set_defaults(func=cmd_gossip)

    p = sub.add_parser("verify", help="check a stored trace or result, or run exhaustive Find Max")
    _graph_flags(p)
    _common(p)
    p.add_argument("--protocol", choices=("broadcast", "gossip", "findmax"))
    p.add_argument("--source", type=int)
    p.add_argument("--msg")
    p.add_argument("--t", type=int)
    p.add_argument("--messages")
    p.add_argument("--wake")
    p.add_argument("--result", help="gossip result JSON to check")
    p.add_argument("--M", type=int, help="message bound for random messages")
    p.add_argument("--n-max", type=int)
    p.add_argument("--label-space", type=int)
    p.add_argument("--spread", type=int)
    p.add_argument("--subsets", action="store_true", default=None)
    p.add_argument("--sample", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="gossip over a parameter grid, one CSV row per instance")
    _graph_flags(p)
    p.add_argument("--config")
    p.add_argument("--protocol", choices=("gossip",))
    p.add_argument("--M", help="message bound range a..b")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        return args.func(opts)
    except (ProtocolError, EngineError) as exc:
        print(f"beepnet: run failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (ValueError, OSError, KeyError) as exc:
        print(f"beepnet: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def cli_run(argv: Sequence[str]) -> int:
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())

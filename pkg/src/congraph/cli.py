"""``congraph`` command line: bench, accept, check-history, snapshot-diff.

Exit status is 0 on success, 1 when a check fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from . import acceptance
from .bench import PRESETS, VARIANTS, BenchConfig, emit_csv, preset_workload, run_benchmark, thread_sweep
from .lincheck import CapacityError, History, HistoryError, check_linearizable
from .oracle import CodecError, SequentialGraphModel
from .snapshot import FormatError, GraphSnapshot, canonical_partition, partition_from_text


def _key_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}") from None
    return lo, hi


def _threads(text: str) -> list[int]:
    if text == "sweep":
        return thread_sweep()
    try:
        out = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N, N,M,... or 'sweep', got {text!r}") from None
    if any(t < 1 for t in out):
        raise argparse.ArgumentTypeError("thread counts must be positive")
    return out


def cmd_bench(args) -> int:
    mix = preset_workload(args.workload)
    results = []
    for threads in args.threads:
        try:
            cfg = BenchConfig(variant=args.variant, threads=threads, duration=args.duration,
                              key_range=args.key_range, initial_vertices=args.initial_vertices,
                              initial_edges=args.initial_edges, seed=args.seed)
            res = run_benchmark(cfg, mix)
        except ValueError as exc:
            print(f"congraph bench: {exc}", file=sys.stderr)
            return 2
        results.append(res)
        print(f"{res.variant:>20} {res.workload:>18} threads={res.threads:<3} "
              f"ops={res.total_ops:<9} {res.ops_per_sec:,.0f} ops/s")
        if args.variant == "seq":
            break
    if args.csv:
        emit_csv(results, args.csv)
    return 0


def cmd_accept(args) -> int:
    names = list(acceptance.SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        rep = acceptance.run_suite(name, seed=args.seed, quick=args.quick)
        rep.metrics.pop("first_rejected", None)
        print(rep.to_json(), flush=True)
        failed |= not rep.passed
    return 1 if failed else 0


def cmd_check_history(args) -> int:
    try:
        with open(args.path) as fp:
            history = History.load(fp)
        initial = SequentialGraphModel()
        if args.initial:
            with open(args.initial) as fp:
                initial = SequentialGraphModel.from_snapshot(GraphSnapshot.from_text(fp.read()))
        verdict = check_linearizable(history, initial)
    except (OSError, CodecError, HistoryError, CapacityError, FormatError) as exc:
        print(f"congraph check-history: {exc}", file=sys.stderr)
        return 2
    if verdict.linearizable:
        print(f"linearizable ({verdict.explored} states explored)")
        for op in verdict.witness:
            print(f"  {op}")
        return 0
    print(f"NOT linearizable ({verdict.explored} states explored)")
    return 1


def _load_any(path):
    with open(path) as fp:
        text = fp.read()
    if any(line.lstrip().startswith("C ") for line in text.splitlines()):
        return "partition", canonical_partition(keys for _, keys in partition_from_text(text))
    return "snapshot", GraphSnapshot.from_text(text)


def cmd_snapshot_diff(args) -> int:
    try:
        kind_a, a = _load_any(args.a)
        kind_b, b = _load_any(args.b)
    except (OSError, FormatError) as exc:
        print(f"congraph snapshot-diff: {exc}", file=sys.stderr)
        return 2
    if kind_a != kind_b:
        print(f"congraph snapshot-diff: cannot compare a {kind_a} with a {kind_b}", file=sys.stderr)
        return 2
    if kind_a == "partition":
        if a == b:
            print(f"identical partitions ({len(a)} components)")
            return 0

        def fmt(s):
            return " ".join(map(str, sorted(s)))
        for comp in sorted(a - b, key=min):
            print(f"- {{{fmt(comp)}}}")
        for comp in sorted(b - a, key=min):
            print(f"+ {{{fmt(comp)}}}")
        return 1
    if a == b:
        print(f"identical snapshots ({len(a.vertices)} vertices, {len(a.edges)} edges)")
        return 0
    for v in sorted(a.vertices - b.vertices):
        print(f"- V {v}")
    for v in sorted(b.vertices - a.vertices):
        print(f"+ V {v}")
    for u, v in sorted(a.edges - b.edges):
        print(f"- E {u} {v}")
    for u, v in sorted(b.edges - a.edges):
        print(f"+ E {u} {v}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="congraph", description="Concurrent graph benchmarks and checkers.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run a throughput benchmark")
    b.add_argument("--variant", choices=sorted(VARIANTS), default="fine")
    b.add_argument("--workload", choices=sorted(PRESETS), default="update-dominated")
    b.add_argument("--threads", type=_threads, default=None,
                   help="N, a comma list, or 'sweep' (default: 1, 2, 4, ... hardware threads)")
    b.add_argument("--duration", type=float, default=20.0)
    b.add_argument("--key-range", type=_key_range, default=(1, 100_000))
    b.add_argument("--initial-vertices", type=int, default=100)
    b.add_argument("--initial-edges", type=int, default=None)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv", default=None)
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("accept", help="run an acceptance suite")
    a.add_argument("--suite", choices=sorted(acceptance.SUITES) + ["all"], required=True)
    a.add_argument("--seed", type=int, default=1)
    a.add_argument("--quick", action="store_true", help="reduced sizes for a smoke run")
    a.set_defaults(func=cmd_accept)

    h = sub.add_parser("check-history", help="check a JSON-lines history for linearizability")
    h.add_argument("path")
    h.add_argument("--initial", default=None, help="snapshot file with the starting graph")
    h.set_defaults(func=cmd_check_history)

    d = sub.add_parser("snapshot-diff", help="compare two snapshot or partition files")
    d.add_argument("a")
    d.add_argument("b")
    d.set_defaults(func=cmd_snapshot_diff)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "bench" and args.threads is None:
        args.threads = thread_sweep()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

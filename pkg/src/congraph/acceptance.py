"""Self-checking suites run by ``congraph accept`` and the acceptance tests.

Every suite returns a ``SuiteReport``. ``status`` is ``pass``, ``fail`` or
``warn``; ``warn`` is used only where a precondition (hardware threads) is
not met, and does not count as a failure.
"""

from __future__ import annotations

import json
import random
import sys
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from . import instrument
from .acyclic import AcyclicGraph
from .bench import BenchConfig, WorkloadMix, hardware_threads, preset_workload, run_benchmark, _Worker
from .graph import ConcurrentGraph
from .lincheck import Recorder, check_linearizable, replay
from .oracle import (SequentialGraphModel, fwbw_scc, is_acyclic, kosaraju_scc, path_exists,
                     tarjan_scc)
from .ordered_set import CheckedCell
from .scc import SccGraph
from .snapshot import GraphSnapshot

KEYS = (1, 2, 3, 4, 5)


@dataclass
class SuiteReport:
    suite: str
    status: str
    detail: str
    metrics: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_json(self) -> str:
        return json.dumps({"suite": self.suite, "status": self.status, "detail": self.detail,
                           "elapsed_s": round(self.elapsed, 3), **self.metrics}, sort_keys=False)

    def line(self) -> str:
        return f"[{self.status.upper()}] {self.suite}: {self.detail}"


def _report(name, ok, detail, **metrics):
    return SuiteReport(name, "pass" if ok else "fail", detail, metrics)


@contextmanager
def switch_interval(seconds: float):
    old = sys.getswitchinterval()
    sys.setswitchinterval(seconds)
    try:
        yield
    finally:
        sys.setswitchinterval(old)


def random_graph(rng: random.Random, n: int, p: float, first: int = 1) -> GraphSnapshot:
    keys = range(first, first + n)
    edges = [(u, v) for u in keys for v in keys if u != v and rng.random() < p]
    return GraphSnapshot.build(keys, edges)


# ------------------------------------------------------------ lin-histories

def record_history(rng: random.Random, die: bool, threads: int | None = None, max_ops: int = 16):
    """Run a small concurrent workload on a fresh graph; return (history, initial model).

    Keys that start present are only ever removed and keys that start absent
    are only ever added, so no key is reused.
    """
    threads = threads or rng.choice((3, 4))
    per = max_ops // threads
    removable = rng.sample(KEYS, rng.randint(1, 3))
    addable = [k for k in KEYS if k not in removable]
    g = ConcurrentGraph(die=die)
    for k in removable:
        g.add_vertex(k)
    for u in removable:
        for v in removable:
            if u != v and rng.random() < 0.4:
                g.add_edge(u, v)
    initial = SequentialGraphModel.from_snapshot(g.snapshot())

    def plan():
        op = rng.choice(("addVertex", "removeVertex", "addEdge", "removeEdge",
                         "addEdge", "removeEdge", "containsVertex", "containsEdge"))
        if op == "addVertex":
            return op, (rng.choice(addable),)
        if op == "removeVertex":
            return op, (rng.choice(removable),)
        if op == "containsVertex":
            return op, (rng.choice(KEYS),)
        return op, tuple(rng.sample(KEYS, 2))

    plans = [[plan() for _ in range(per)] for _ in range(threads)]
    rec = Recorder()
    barrier = threading.Barrier(threads)

    def run(tid):
        barrier.wait()
        for op, args in plans[tid]:
            rec.call(tid, op, lambda *a, op=op: g.apply(op, *a), *args)

    workers = [threading.Thread(target=run, args=(t,)) for t in range(threads)]
    with switch_interval(1e-6):
        for w in workers:
            w.start()
        for w in workers:
            w.join()
    return rec.history, initial


def lin_histories(seed: int = 1, count: int = 1000) -> SuiteReport:
    rng = random.Random(seed)
    accepted = 0
    overlapping = 0
    first_bad = None
    for i in range(count):
        history, initial = record_history(rng, die=bool(i % 2))
        verdict = check_linearizable(history, initial)
        ok = verdict.linearizable and replay(verdict.witness, initial)
        ops = history.operations()
        if any(a.inv < b.inv < a.resp for a in ops for b in ops if a is not b):
            overlapping += 1
        if ok:
            accepted += 1
        elif first_bad is None:
            first_bad = history.dumps()
    rep = _report("lin-histories", accepted == count,
                  f"{accepted}/{count} histories linearizable ({overlapping} with overlapping ops)",
                  accepted=accepted, total=count, overlapping=overlapping)
    if first_bad:
        rep.metrics["first_rejected"] = first_bad
    return rep


# --------------------------------------------------------- seq-conformance

def seq_conformance(seed: int = 1, count: int = 100_000) -> SuiteReport:
    """Single-threaded random sequences over keys 1..6, checked against the model."""
    rng = random.Random(seed)
    keys = (1, 2, 3, 4, 5, 6)
    ops = ("addVertex", "removeVertex", "addEdge", "removeEdge", "containsVertex", "containsEdge")
    mismatches = 0
    checked = 0
    example = None
    for i in range(count):
        g = ConcurrentGraph(die=True, cell_type=CheckedCell)
        m = SequentialGraphModel()
        for _ in range(rng.randint(1, 12)):
            op = rng.choice(ops)
            args = (rng.choice(keys),) if op in ("addVertex", "removeVertex", "containsVertex") \
                else tuple(rng.sample(keys, 2))
            want, m = m.apply(op, args)
            got = g.apply(op, *args)
            checked += 1
            if got != want:
                mismatches += 1
                example = example or f"{op}{args}: got {got}, model {want}"
        if g.snapshot() != m.snapshot():
            mismatches += 1
            example = example or "final snapshot differs"
    return _report("seq-conformance", mismatches == 0,
                   f"{checked} operations over {count} sequences, {mismatches} mismatches",
                   operations=checked, sequences=count, mismatches=mismatches,
                   **({"example": example} if example else {}))


# ---------------------------------------------------------------- scc-oracle

SCC_MIX = WorkloadMix("scc-oracle", {"addVertex": 12, "removeVertex": 8, "addEdge": 35, "removeEdge": 20,
                                     "checkScc": 10, "belongsTo": 10, "containsEdge": 5})


def scc_oracle(seed: int = 1, trials: int = 200, threads: int = 4, duration: float = 2.0) -> SuiteReport:
    rng = random.Random(seed)
    mismatches = counter_errors = reissued = 0
    ops = 0
    for trial in range(trials):
        n = rng.randint(10, 100)
        die = bool(trial % 2)
        cfg = BenchConfig(variant="scc-die" if die else "scc", threads=threads, duration=duration,
                          key_range=(1, n), initial_vertices=n,
                          initial_edges=rng.randint(n, 3 * n), seed=rng.getrandbits(63))
        res = run_benchmark(cfg, SCC_MIX, graph_factory=lambda die=die: SccGraph(die=die, cell_type=CheckedCell))
        g: SccGraph = res.graph
        ops += res.total_ops
        g.compact_empty_components()
        snap = g.snapshot()
        if g.partition() != tarjan_scc(snap):
            mismatches += 1
        if g.cc_count.value != g.component_count():
            counter_errors += 1
        reissued += len(g.reissued)
    ok = mismatches == 0 and counter_errors == 0 and reissued == 0
    return _report("scc-oracle", ok,
                   f"{trials - mismatches}/{trials} partitions match offline Tarjan; "
                   f"counter mismatches {counter_errors}; reissued ids {reissued}",
                   trials=trials, mismatches=mismatches, counter_errors=counter_errors,
                   reissued=reissued, operations=ops)


# ------------------------------------------------- scc-sequential-exhaustive

def build_scc(snap: GraphSnapshot, **kw) -> SccGraph:
    g = SccGraph(**kw)
    for v in sorted(snap.vertices):
        g.add_vertex(v)
    for u, v in sorted(snap.edges):
        g.add_edge(u, v)
    return g


def scc_sequential_exhaustive(seed: int = 1, graphs: int = 20, n: int = 30) -> SuiteReport:
    rng = random.Random(seed)
    mismatches = steps = 0
    for _ in range(graphs):
        base = random_graph(rng, n, rng.choice((0.03, 0.06, 0.1)))
        g = build_scc(base)
        edges = set(base.edges)
        keys = sorted(base.vertices)

        def check():
            nonlocal mismatches, steps
            steps += 1
            g.compact_empty_components()
            if g.partition() != tarjan_scc(GraphSnapshot(base.vertices, frozenset(edges))):
                mismatches += 1

        check()
        for u in keys:
            for v in keys:
                if u == v:
                    continue
                if (u, v) in edges:
                    g.remove_edge(u, v)
                    edges.discard((u, v))
                    check()
                    g.add_edge(u, v)
                    edges.add((u, v))
                    check()
                else:
                    g.add_edge(u, v)
                    edges.add((u, v))
                    check()
                    g.remove_edge(u, v)
                    edges.discard((u, v))
                    check()
        if g.snapshot() != base:
            mismatches += 1
    return _report("scc-sequential-exhaustive", mismatches == 0,
                   f"{steps} single-edge updates on {graphs} graphs of {n} vertices, {mismatches} mismatches",
                   steps=steps, mismatches=mismatches)


# ------------------------------------------------------- offline-agreement

def offline_agreement(seed: int = 1, graphs: int = 200) -> SuiteReport:
    rng = random.Random(seed)
    bad = 0
    for _ in range(graphs):
        snap = random_graph(rng, rng.randint(1, 60), rng.choice((0.02, 0.05, 0.1)))
        t = tarjan_scc(snap)
        if not (t == kosaraju_scc(snap) == fwbw_scc(snap)):
            bad += 1
    return _report("offline-agreement", bad == 0, f"{graphs - bad}/{graphs} graphs agree across three algorithms",
                   graphs=graphs, mismatches=bad)


# --------------------------------------------------------------- acyclicity

class _Tally:
    """Records acyclic_add_edge outcomes per thread; forwards everything else."""

    def __init__(self, graph: AcyclicGraph):
        self._g = graph
        self.accepted: list = []
        self.rejected: list = []

    def acyclic_add_edge(self, u, v):
        ok = self._g.acyclic_add_edge(u, v)
        if ok:
            self.accepted.append((u, v))
        elif self._g.contains_vertex(u) and self._g.contains_vertex(v):
            self.rejected.append((u, v))
        return ok

    def __getattr__(self, name):
        return getattr(self._g, name)


def acyclicity(seed: int = 1, trials: int = 50, threads: int = 8, duration: float = 2.0,
               epoch: float = 0.25, n: int = 30) -> SuiteReport:
    """Serialized-mode workload in short epochs.

    Each epoch starts from a quiescent snapshot. A rejected insert (u, v)
    counts as confirmed when v reaches u in that snapshot plus the edges
    accepted during the epoch, the largest graph the insert could have seen.
    """
    rng = random.Random(seed)
    mix = preset_workload("acyclic")
    cyclic = unconfirmed = rejections = 0
    for _ in range(trials):
        g = AcyclicGraph("serialized")
        cfg = BenchConfig(variant="acyclic-serialized", threads=threads, duration=duration,
                          key_range=(1, 2 * n), initial_vertices=n, seed=rng.getrandbits(63))
        for u in range(1, n + 1):
            g.add_vertex(u)
        for u in range(1, n + 1):
            for v in range(u + 1, n + 1):
                g.inner.add_edge(u, v)
        tallies = []
        workers = []
        for t in range(threads):
            tally = _Tally(g)
            tallies.append(tally)
            workers.append(_Worker(t, tally, cfg, mix, range(1, n + 1), random.Random(rng.getrandbits(64))))
        spent = 0.0
        while spent < duration:
            pre = g.snapshot()
            for tally in tallies:
                tally.accepted.clear()
                tally.rejected.clear()
            start = threading.Barrier(threads + 1)
            stop = threading.Event()
            ts = [threading.Thread(target=w.run, args=(start, stop), daemon=True) for w in workers]
            for th in ts:
                th.start()
            start.wait()
            stop.wait(epoch)
            stop.set()
            for th in ts:
                th.join()
            spent += epoch
            accepted = [e for tl in tallies for e in tl.accepted]
            if accepted or any(tl.rejected for tl in tallies):
                verts = set(pre.vertices) | {k for e in accepted for k in e}
                grown = GraphSnapshot.build(verts, set(pre.edges) | set(accepted))
                for tl in tallies:
                    for u, v in tl.rejected:
                        rejections += 1
                        if not path_exists(grown, v, u):
                            unconfirmed += 1
            for w in workers:
                w.reconcile()
        if not g.verify_acyclic():
            cyclic += 1
    ok = cyclic == 0 and unconfirmed == 0
    return _report("acyclicity", ok,
                   f"{trials - cyclic}/{trials} trials acyclic at quiescence; "
                   f"{rejections - unconfirmed}/{rejections} rejections confirmed cycle-closing",
                   trials=trials, cyclic=cyclic, rejections=rejections, unconfirmed=unconfirmed)


# ----------------------------------------------------------- deadlock-stress

def deadlock_stress(seed: int = 1, reps: int = 10, duration: float = 10.0, watchdog: float = 60.0,
                    threads: int | None = None) -> SuiteReport:
    threads = threads or 2 * hardware_threads()
    rng = random.Random(seed)
    mix = preset_workload("update-dominated")
    hung = violations = 0
    acquisitions = 0
    ops = 0
    worst = 0.0
    for rep in range(reps):
        variant = ("fine-die", "fine", "scc-die")[rep % 3]
        cfg = BenchConfig(variant=variant, threads=threads, duration=duration, key_range=(1, 2000),
                          initial_vertices=200, seed=rng.getrandbits(63))
        box = {}
        with instrument.recording() as rec:
            t0 = time.perf_counter()
            runner = threading.Thread(target=lambda: box.setdefault("r", run_benchmark(cfg, mix)), daemon=True)
            runner.start()
            runner.join(watchdog)
            worst = max(worst, time.perf_counter() - t0)
        if runner.is_alive() or "r" not in box:
            hung += 1
            continue
        ops += box["r"].total_ops
        violations += len(rec.violations)
        acquisitions += rec.acquisitions
    ok = hung == 0 and violations == 0
    return _report("deadlock-stress", ok,
                   f"{reps - hung}/{reps} runs finished under the {watchdog:.0f}s watchdog "
                   f"(slowest {worst:.1f}s); {violations} lock-order violations in {acquisitions} acquisitions",
                   reps=reps, hung=hung, violations=violations, acquisitions=acquisitions, operations=ops,
                   threads=threads)


# ------------------------------------------------------------ waitfree-bound

def waitfree_bound(seed: int = 1, sizes=(0, 1, 10, 1000, 100_000)) -> SuiteReport:
    rng = random.Random(seed)
    worst = {}
    ok = True
    for n in sizes:
        g = ConcurrentGraph()
        for k in range(2 * n, 0, -2):  # descending, so every insert lands at the head
            g.add_vertex(k)
        probe = instrument.VisitProbe()
        g.vertices.probe = probe
        targets = {1, 2, 2 * n, 2 * n + 1, 2**62}
        targets |= {rng.randint(1, 2 * n + 1) for _ in range(50)}
        peak = 0
        for k in targets:
            g.contains_vertex(k)
            peak = max(peak, probe.last)
        worst[n] = peak
        ok &= peak <= n + 2
    return _report("waitfree-bound", ok,
                   "max visits " + ", ".join(f"n={n}: {v} (bound {n + 2})" for n, v in worst.items()),
                   visits={str(k): v for k, v in worst.items()})


# ---------------------------------------------------------------- throughput

def throughput(seed: int = 1, duration: float = 3.0, min_threads: int = 8) -> SuiteReport:
    hw = hardware_threads()
    mix = preset_workload("contains-dominated")

    def rate(variant, threads):
        cfg = BenchConfig(variant=variant, threads=threads, duration=duration, key_range=(1, 2000),
                          initial_vertices=500, seed=seed)
        return run_benchmark(cfg, mix).ops_per_sec

    fine_max = rate("fine", hw)
    coarse_max = rate("coarse", hw)
    fine_one = rate("fine", 1)
    ratio = fine_max / coarse_max if coarse_max else float("inf")
    met = ratio >= 1.5 and fine_max >= fine_one
    detail = (f"{hw} hardware threads; fine {fine_max:.0f} ops/s vs coarse {coarse_max:.0f} ops/s "
              f"(ratio {ratio:.2f}); fine at 1 thread {fine_one:.0f} ops/s")
    metrics = dict(hardware_threads=hw, fine_ops=fine_max, coarse_ops=coarse_max, ratio=ratio, fine_single=fine_one)
    if hw < min_threads:
        return SuiteReport("throughput", "warn", f"precondition unmet ({hw} < {min_threads} threads); " + detail,
                           metrics)
    return SuiteReport("throughput", "pass" if met else "warn", detail, metrics)


SUITES = {
    "lin-histories": lin_histories,
    "seq-conformance": seq_conformance,
    "scc-oracle": scc_oracle,
    "scc-sequential-exhaustive": scc_sequential_exhaustive,
    "offline-agreement": offline_agreement,
    "acyclicity": acyclicity,
    "deadlock-stress": deadlock_stress,
    "waitfree-bound": waitfree_bound,
    "throughput": throughput,
}

# Reduced sizes for smoke runs (``accept --quick``).
QUICK = {
    "lin-histories": dict(count=50),
    "seq-conformance": dict(count=2000),
    "scc-oracle": dict(trials=4, duration=0.5),
    "scc-sequential-exhaustive": dict(graphs=2, n=12),
    "offline-agreement": dict(graphs=20),
    "acyclicity": dict(trials=2, duration=0.5),
    "deadlock-stress": dict(reps=2, duration=1.0, watchdog=30.0),
    "waitfree-bound": dict(sizes=(0, 1, 10, 1000)),
    "throughput": dict(duration=0.5),
}


def run_suite(name: str, seed: int = 1, quick: bool = False, **overrides) -> SuiteReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; known: {', '.join(SUITES)}") from None
    kwargs = dict(QUICK[name]) if quick else {}
    kwargs.update(overrides)
    t0 = time.perf_counter()
    rep = fn(seed=seed, **kwargs)
    rep.elapsed = time.perf_counter() - t0
    return rep

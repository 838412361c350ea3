"""Fixed-duration throughput harness over every graph variant.

Each worker thread owns a seeded RNG and a shadow list of keys it believes
are live. Fresh vertex keys are striped across threads and never handed out
twice, so a removed key is never re-added. The shadow list drifts as other
threads remove keys; every ``RECONCILE_EVERY`` operations each worker drops
the keys that are no longer present.
"""

from __future__ import annotations

import bisect
import csv
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable

from .acyclic import AcyclicGraph
from .graph import OPERATIONS as GRAPH_OPS
from .graph import CoarseGraph, ConcurrentGraph, SequentialGraph
from .oracle import ARITY
from .scc import OPERATIONS as SCC_OPS
from .scc import SccGraph

ALL_OPS = tuple(ARITY)
RECONCILE_EVERY = 1024

VARIANTS = {
    "fine": lambda: ConcurrentGraph(die=False),
    "fine-die": lambda: ConcurrentGraph(die=True),
    "coarse": lambda: CoarseGraph(die=True),
    "seq": lambda: SequentialGraph(die=True),
    "scc": lambda: SccGraph(die=False, auto_compact=True),
    "scc-die": lambda: SccGraph(die=True, auto_compact=True),
    "acyclic-serialized": lambda: AcyclicGraph("serialized"),
    "acyclic-optimistic": lambda: AcyclicGraph("optimistic"),
}

SUPPORTED = {
    "fine": GRAPH_OPS, "fine-die": GRAPH_OPS, "coarse": GRAPH_OPS, "seq": GRAPH_OPS,
    "scc": SCC_OPS, "scc-die": SCC_OPS,
    "acyclic-serialized": GRAPH_OPS + ("acyclicAddEdge",),
    "acyclic-optimistic": GRAPH_OPS + ("acyclicAddEdge",),
}


class UnsupportedError(ValueError):
    pass


@dataclass(frozen=True)
class WorkloadMix:
    name: str
    percent: dict

    def __post_init__(self):
        unknown = set(self.percent) - set(ALL_OPS)
        if unknown:
            raise ValueError(f"unknown operations in mix: {sorted(unknown)}")
        if any(p < 0 for p in self.percent.values()):
            raise ValueError("mix percentages must be nonnegative")
        total = sum(self.percent.values())
        if abs(total - 100) > 1e-9:
            raise ValueError(f"mix '{self.name}' sums to {total}, not 100")

    def ops(self) -> list[str]:
        return [op for op in ALL_OPS if self.percent.get(op, 0) > 0]

    def fraction(self, op: str) -> float:
        return self.percent.get(op, 0) / 100.0


def _mix(name, **pct):
    return WorkloadMix(name, pct)


PRESETS = {
    "update-dominated": _mix("update-dominated", addVertex=25, addEdge=25, removeVertex=10,
                             removeEdge=10, containsVertex=15, containsEdge=15),
    "contains-dominated": _mix("contains-dominated", addVertex=7, removeVertex=3, addEdge=7,
                               removeEdge=3, containsVertex=40, containsEdge=40),
    "edge-churn": _mix("edge-churn", addEdge=50, removeEdge=50),
    "scc-5050": _mix("scc-5050", addVertex=25, addEdge=25, removeVertex=25, removeEdge=25),
    "scc-9010": _mix("scc-9010", addVertex=45, addEdge=45, removeVertex=5, removeEdge=5),
    "scc-1090": _mix("scc-1090", addVertex=5, addEdge=5, removeVertex=45, removeEdge=45),
    "incremental": _mix("incremental", addVertex=50, addEdge=50),
    "decremental": _mix("decremental", removeVertex=50, removeEdge=50),
    "community": _mix("community", checkScc=40, belongsTo=40, addVertex=5, addEdge=5,
                      removeVertex=5, removeEdge=5),
    "acyclic": _mix("acyclic", addVertex=25, acyclicAddEdge=25, removeVertex=10,
                    removeEdge=10, containsVertex=15, containsEdge=15),
}


def preset_workload(name: str) -> WorkloadMix:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown workload {name!r}; known: {', '.join(PRESETS)}") from None


def hardware_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def thread_sweep(limit: int | None = None) -> list[int]:
    limit = limit or hardware_threads()
    out, t = [], 1
    while t < limit:
        out.append(t)
        t *= 2
    out.append(limit)
    return out


@dataclass
class BenchConfig:
    variant: str = "fine"
    threads: int = 1
    duration: float = 20.0
    key_range: tuple[int, int] = (1, 100_000)
    initial_vertices: int = 100
    initial_edges: int | None = None
    seed: int = 0
    max_ops: int | None = None  # per thread; stops early when reached
    trace: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; known: {', '.join(VARIANTS)}")
        if self.variant == "seq":
            self.threads = 1
        lo, hi = self.key_range
        if lo < 1 or hi < lo:
            raise ValueError(f"bad key range {lo}:{hi}")
        if self.initial_vertices > hi - lo + 1:
            raise ValueError("initial vertices exceed the key range")
        if self.threads < 1:
            raise ValueError("need at least one thread")


@dataclass
class BenchResult:
    variant: str
    workload: str
    threads: int
    duration_s: float
    total_ops: int
    op_counts: dict
    thread_counts: list
    seed: int
    initial_vertices: int
    initial_edges: int
    config: BenchConfig | None = None
    traces: list = field(default_factory=list)
    final_snapshot: object = None
    graph: object = None

    @property
    def ops_per_sec(self) -> float:
        return self.total_ops / self.duration_s if self.duration_s > 0 else 0.0

    def per_op_rate(self) -> dict:
        return {op: n / self.duration_s for op, n in self.op_counts.items()} if self.duration_s > 0 else {}


def _seed_graph(graph, cfg: BenchConfig, rng: random.Random) -> tuple[list[int], int]:
    lo = cfg.key_range[0]
    keys = list(range(lo, lo + cfg.initial_vertices))
    for k in keys:
        graph.add_vertex(k)
    n = len(keys)
    if isinstance(graph, AcyclicGraph):
        # a complete DAG in key order is acyclic by construction, so skip the checks
        for i in range(n):
            for j in range(i + 1, n):
                graph.inner.add_edge(keys[i], keys[j])
        return keys, n * (n - 1) // 2
    want = 2 * n if cfg.initial_edges is None else cfg.initial_edges
    want = min(want, n * (n - 1))
    edges = set()
    while len(edges) < want:
        u, v = rng.sample(keys, 2)
        edges.add((u, v))
    for u, v in sorted(edges):
        graph.add_edge(u, v)
    return keys, len(edges)


class _Worker:
    def __init__(self, tid, graph, cfg, mix, live, rng):
        self.tid = tid
        self.graph = graph
        self.cfg = cfg
        self.rng = rng
        self.live = list(live)
        self.ops = mix.ops()
        cum, acc = [], 0.0
        for op in self.ops:
            acc += mix.percent[op]
            cum.append(acc)
        self.cum = cum
        self.total = acc
        self.counts = dict.fromkeys(self.ops, 0)
        lo, hi = cfg.key_range
        self.next_fresh = lo + cfg.initial_vertices + tid
        self.stride = cfg.threads
        self.hi = hi
        self.lo = lo
        self.trace = [] if cfg.trace else None

    def _pick(self):
        return self.live[self.rng.randrange(len(self.live))] if self.live else self.lo

    def _pair(self):
        if len(self.live) < 2:
            return self.lo, self.lo + 1
        u, v = self.rng.sample(self.live, 2)
        return u, v

    def step(self):
        rng, g = self.rng, self.graph
        op = self.ops[bisect.bisect_right(self.cum, rng.random() * self.total)]
        self.counts[op] += 1
        if op == "addVertex":
            # past the top of the range the stripe simply keeps counting up
            u = self.next_fresh
            self.next_fresh += self.stride
            g.add_vertex(u)
            self.live.append(u)
            args = (u,)
        elif op == "removeVertex":
            if self.live:
                i = rng.randrange(len(self.live))
                u = self.live[i]
                self.live[i] = self.live[-1]
                self.live.pop()
            else:
                u = self.lo
            g.remove_vertex(u)
            args = (u,)
        elif op == "containsVertex":
            u = rng.randint(self.lo, self.hi)
            g.contains_vertex(u)
            args = (u,)
        elif op == "belongsTo":
            u = self._pick()
            g.belongs_to(u)
            args = (u,)
        else:
            u, v = self._pair()
            if op == "addEdge":
                g.add_edge(u, v)
            elif op == "removeEdge":
                g.remove_edge(u, v)
            elif op == "containsEdge":
                g.contains_edge(u, v)
            elif op == "checkScc":
                g.check_scc(u, v)
            else:
                g.acyclic_add_edge(u, v)
            args = (u, v)
        if self.trace is not None:
            self.trace.append((op, args))

    def reconcile(self):
        self.live = [k for k in self.live if self.graph.contains_vertex(k)]

    def run(self, start: threading.Barrier, stop: threading.Event):
        start.wait()
        limit = self.cfg.max_ops
        done = 0
        while not stop.is_set() and (limit is None or done < limit):
            self.step()
            done += 1
            if done % RECONCILE_EVERY == 0:
                self.reconcile()
        self.done = done


def run_benchmark(cfg: BenchConfig, mix: WorkloadMix, graph_factory=None) -> BenchResult:
    """Run one fixed-duration trial. ``graph_factory`` overrides the variant's constructor."""
    unsupported = [op for op in mix.ops() if op not in SUPPORTED[cfg.variant]]
    if unsupported:
        raise UnsupportedError(f"variant {cfg.variant} does not support {', '.join(unsupported)}")
    graph = (graph_factory or VARIANTS[cfg.variant])()
    master = random.Random(cfg.seed)
    live, n_edges = _seed_graph(graph, cfg, random.Random(master.getrandbits(64)))
    workers = [_Worker(t, graph, cfg, mix, live, random.Random(master.getrandbits(64)))
               for t in range(cfg.threads)]
    start = threading.Barrier(cfg.threads + 1)
    stop = threading.Event()
    threads = [threading.Thread(target=w.run, args=(start, stop), name=f"bench-{w.tid}", daemon=True)
               for w in workers]
    for t in threads:
        t.start()
    start.wait()
    t0 = time.perf_counter()
    if cfg.max_ops is None:
        stop.wait(cfg.duration)
    else:
        deadline = t0 + cfg.duration
        while any(t.is_alive() for t in threads) and time.perf_counter() < deadline:
            threads[0].join(0.01)
    stop.set()
    for t in threads:
        t.join()
    elapsed = time.perf_counter() - t0
    counts = dict.fromkeys(ALL_OPS, 0)
    for w in workers:
        for op, n in w.counts.items():
            counts[op] += n
    if isinstance(graph, SccGraph) and graph.auto_compact:
        graph.compact_empty_components()
    return BenchResult(
        variant=cfg.variant, workload=mix.name, threads=cfg.threads, duration_s=elapsed,
        total_ops=sum(counts.values()), op_counts=counts, thread_counts=[w.done for w in workers],
        seed=cfg.seed, initial_vertices=cfg.initial_vertices, initial_edges=n_edges, config=cfg,
        traces=[w.trace for w in workers] if cfg.trace else [], final_snapshot=graph.snapshot(), graph=graph,
    )


CSV_FIXED = ["variant", "workload", "threads", "duration_s", "total_ops", "ops_per_sec"]
CSV_TRAILER = ["seed", "initial_vertices", "initial_edges"]
CSV_COLUMNS = CSV_FIXED + [f"count_{op}" for op in ALL_OPS] + CSV_TRAILER


def _row(r: BenchResult) -> list:
    return ([r.variant, r.workload, r.threads, f"{r.duration_s:.6f}", r.total_ops, f"{r.ops_per_sec:.3f}"]
            + [r.op_counts.get(op, 0) for op in ALL_OPS]
            + [r.seed, r.initial_vertices, r.initial_edges])


def emit_csv(results: Iterable[BenchResult], destination) -> None:
    results = list(results)
    if not results:
        raise ValueError("no results to write")
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", newline="") as fp:
            emit_csv(results, fp)
        return
    w = csv.writer(destination)
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow(_row(r))


def read_csv(source) -> list[dict]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fp:
            return read_csv(fp)
    rows = []
    for rec in csv.DictReader(source):
        out = {}
        for k, v in rec.items():
            if k in ("variant", "workload"):
                out[k] = v
            elif k in ("duration_s", "ops_per_sec"):
                out[k] = float(v)
            else:
                out[k] = int(v)
        rows.append(out)
    return rows

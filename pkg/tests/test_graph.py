import random
import threading

import pytest

from congraph import instrument
from congraph.graph import CoarseGraph, ConcurrentGraph, QuiescenceError, SequentialGraph
from congraph.oracle import SequentialGraphModel
from congraph.ordered_set import DomainError
from congraph.snapshot import GraphSnapshot

ALL = [lambda: ConcurrentGraph(), lambda: ConcurrentGraph(die=True), SequentialGraph, CoarseGraph]


@pytest.fixture(params=range(len(ALL)), ids=["fine", "fine-die", "seq", "coarse"])
def graph(request):
    return ALL[request.param]()


def test_add_vertex_idempotent(graph):
    assert graph.add_vertex(5)
    assert graph.contains_vertex(5)
    assert graph.add_vertex(5)
    assert graph.snapshot().vertices == {5}


def test_remove_vertex(graph):
    assert not graph.remove_vertex(5)
    graph.add_vertex(5)
    assert graph.remove_vertex(5)
    assert not graph.contains_vertex(5)


def test_edge_results(graph):
    graph.add_vertex(5)
    assert not graph.add_edge(5, 7)
    graph.add_vertex(7)
    assert graph.add_edge(5, 7)
    assert graph.contains_edge(5, 7)
    assert graph.add_edge(5, 7)
    assert graph.snapshot().edges == {(5, 7)}
    assert graph.remove_edge(5, 7)
    assert not graph.contains_edge(5, 7)
    assert graph.remove_edge(5, 7)  # vertices present, edge absent
    assert not graph.remove_edge(9, 7)
    assert not graph.contains_edge(7, 5)


def test_self_loops_rejected(graph):
    graph.add_vertex(1)
    with pytest.raises(DomainError):
        graph.add_edge(1, 1)
    with pytest.raises(DomainError):
        graph.remove_edge(1, 1)
    assert not graph.contains_edge(1, 1)


def test_marked_vertex_is_absent():
    g = ConcurrentGraph()
    g.add_vertex(3)
    g.vertices.find(3).marked = True  # logically removed, not yet unlinked
    assert not g.contains_vertex(3)
    assert not g.add_edge(3, 4)


def test_die_purges_incoming_edges():
    g = ConcurrentGraph(die=True)
    for k in (1, 2, 5):
        g.add_vertex(k)
    g.add_edge(1, 5)
    g.add_edge(2, 5)
    g.remove_vertex(5)
    assert all(5 not in c.payload.keys() for c in g.vertices.cells())
    assert not g.contains_edge(1, 5)


def test_no_die_leaves_cells_but_not_edges():
    g = ConcurrentGraph(die=False)
    for k in (1, 5):
        g.add_vertex(k)
    g.add_edge(1, 5)
    g.remove_vertex(5)
    assert g.vertices.find(1).payload.keys() == [5]
    assert g.snapshot().edges == frozenset()
    assert not g.contains_edge(1, 5)


def test_snapshot_text_golden():
    g = ConcurrentGraph()
    assert g.snapshot() == GraphSnapshot()
    for k in (2, 1, 10):
        g.add_vertex(k)
    g.add_edge(1, 2)
    g.add_edge(10, 1)
    g.add_edge(2, 10)
    assert g.export_text() == "V 1\nV 2\nV 10\nE 1 2\nE 2 10\nE 10 1\n"
    assert GraphSnapshot.from_text(g.export_text()) == g.snapshot()


def test_debug_snapshot_requires_quiescence():
    g = ConcurrentGraph(debug=True)
    g.add_vertex(1)
    g._in_flight += 1
    with pytest.raises(QuiescenceError):
        g.snapshot()
    g._in_flight -= 1
    assert g.snapshot().vertices == {1}


def _random_ops(rng, n, keys=(1, 2, 3, 4, 5, 6)):
    out = []
    for _ in range(n):
        op = rng.choice(["addVertex", "removeVertex", "addEdge", "removeEdge", "containsVertex", "containsEdge"])
        if op in ("addVertex", "removeVertex", "containsVertex"):
            out.append((op, (rng.choice(keys),)))
        else:
            out.append((op, tuple(rng.sample(keys, 2))))
    return out


@pytest.mark.parametrize("make", [lambda: ConcurrentGraph(die=True), lambda: SequentialGraph(die=True),
                                  lambda: CoarseGraph(die=True)])
def test_sequential_replay_matches_model(make):
    rng = random.Random(11)
    for _ in range(300):
        g, m = make(), SequentialGraphModel()
        for op, args in _random_ops(rng, 20):
            want, m = m.apply(op, args)
            assert g.apply(op, *args) == want, (op, args)
        assert g.snapshot() == m.snapshot()


def test_no_die_matches_model_without_key_reuse():
    rng = random.Random(12)
    for _ in range(300):
        g, m = ConcurrentGraph(die=False), SequentialGraphModel()
        removed = set()
        for op, args in _random_ops(rng, 20):
            if op == "addVertex" and args[0] in removed:
                continue
            want, m = m.apply(op, args)
            assert g.apply(op, *args) == want
            if op == "removeVertex":
                removed.add(args[0])
        assert g.snapshot() == m.snapshot()


def test_many_threads_add_distinct_vertices():
    g = ConcurrentGraph()
    keys = random.Random(1).sample(range(1, 1000), 64)
    barrier = threading.Barrier(64)

    def go(k):
        barrier.wait()
        g.add_vertex(k)

    ts = [threading.Thread(target=go, args=(k,)) for k in keys]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert g.vertices.keys() == sorted(keys)


def test_reads_take_no_locks():
    g = ConcurrentGraph(die=True)
    for k in range(1, 20):
        g.add_vertex(k)
    for k in range(1, 19):
        g.add_edge(k, k + 1)
    with instrument.recording() as rec:
        for k in range(0, 22):
            g.contains_vertex(k)
            g.contains_edge(k, k + 1)
    assert rec.acquisitions == 0


def test_concurrent_stress_quiescent_invariants():
    g = ConcurrentGraph(die=True)
    stop = threading.Event()

    def churn(seed):
        rng = random.Random(seed)
        while not stop.is_set():
            for op, args in _random_ops(rng, 10, keys=range(1, 15)):
                g.apply(op, *args)

    with instrument.recording() as rec:
        ts = [threading.Thread(target=churn, args=(s,)) for s in range(4)]
        for t in ts:
            t.start()
        stop.wait(1.0)
        stop.set()
        for t in ts:
            t.join()
    assert rec.violations == []
    snap = g.snapshot()
    assert all(u in snap.vertices and v in snap.vertices for u, v in snap.edges)
    # DIE: no edge cell anywhere names a removed vertex
    live = set(g.vertices.keys())
    assert all(set(c.payload.keys()) <= live for c in g.vertices.cells())
    keys = g.vertices.keys()
    assert keys == sorted(set(keys))

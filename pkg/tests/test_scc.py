import itertools
import random
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congraph import instrument
from congraph.oracle import kosaraju_scc, tarjan_scc
from congraph.ordered_set import CheckedCell, DomainError
from congraph.scc import SccGraph
from congraph.snapshot import partition_from_text

# Reconstruction of the three-component example: vertex 10 sits in the
# {8, 9, 10} component with edges -9 and +8.
FIG_EDGES = [(1, 2), (2, 3), (3, 1), (3, 4),
             (4, 5), (5, 6), (6, 7), (7, 4), (7, 9),
             (8, 9), (9, 10), (10, 8)]


def build(vertices, edges, **kw):
    g = SccGraph(**kw)
    for v in vertices:
        g.add_vertex(v)
    for u, v in edges:
        assert g.add_edge(u, v)
    return g


def parts(*groups):
    return frozenset(frozenset(g) for g in groups)


def assert_matches_oracle(g):
    g.compact_empty_components()
    assert g.partition() == tarjan_scc(g.snapshot())
    assert g.cc_count.value == g.component_count()


def test_figure_layout():
    g = build(range(1, 11), FIG_EDGES)
    assert g.partition() == parts({1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10})
    assert g.edge_lists()[10] == [-9, 8]
    comp = g.belongs_to(10)
    assert comp is not None and comp == g.belongs_to(8) == g.belongs_to(9)
    assert comp not in (g.belongs_to(1), g.belongs_to(4))


def test_figure_merge_on_8_3():
    g = build(range(1, 11), FIG_EDGES)
    g.compact_empty_components()
    assert g.component_count() == 3
    assert g.add_edge(8, 3)
    assert g.partition() == parts(range(1, 11))
    assert len({g.belongs_to(k) for k in range(1, 11)}) == 1
    # the merged component is fresh, so all three old ones are left empty
    assert g.compact_empty_components() == 3
    assert_matches_oracle(g)


def test_figure_split_on_8_7():
    g = build([7, 8, 9, 10], [(7, 9), (9, 10), (10, 8), (8, 9), (8, 7)])
    assert g.partition() == parts({7, 8, 9, 10})
    assert g.remove_edge(8, 7)
    assert g.partition() == parts({7}, {8, 9, 10})
    assert_matches_oracle(g)


def test_add_vertex_semantics():
    g = SccGraph()
    assert g.add_vertex(4)
    ccno = g.belongs_to(4)
    assert ccno is not None and g.cc_count.value == 1
    assert not g.add_vertex(4)
    for k in range(5, 15):
        g.add_vertex(k)
    assert g.cc_count.value == 11
    assert g.partition() == parts(*[{k} for k in range(4, 15)])


def test_key_domain():
    g = SccGraph()
    for bad in (0, -3, 2**63 - 1, True, "1"):
        with pytest.raises(DomainError):
            g.add_vertex(bad)
    g.add_vertex(1)
    with pytest.raises(DomainError):
        g.add_edge(1, 1)


def test_absent_endpoints():
    g = build([1], [])
    assert not g.add_edge(1, 2)
    assert not g.remove_edge(2, 1)
    assert not g.remove_vertex(2)
    assert g.belongs_to(2) is None
    assert not g.check_scc(1, 2)
    assert not g.check_scc(2, 2)


def test_three_cycle_merge_and_split():
    g = build([1, 2, 3], [(1, 2), (2, 3)])
    assert g.partition() == parts({1}, {2}, {3})
    g.add_edge(3, 1)
    assert g.belongs_to(1) == g.belongs_to(2) == g.belongs_to(3)
    assert g.check_scc(1, 3) and g.check_scc(3, 2)
    g.remove_edge(3, 1)
    assert g.partition() == parts({1}, {2}, {3})
    assert_matches_oracle(g)


def test_intact_component_keeps_ccno():
    g = build([1, 2, 3], [(1, 2), (2, 3), (3, 1), (1, 3)])
    ccno = g.belongs_to(1)
    g.remove_edge(1, 3)
    assert g.belongs_to(1) == g.belongs_to(3) == ccno


def test_cross_component_edge_changes_nothing():
    g = build([1, 2, 3], [(1, 2), (2, 1)])
    before = g.component_table()
    g.add_edge(2, 3)
    g.remove_edge(2, 3)
    assert g.component_table() == before


def test_remove_vertex_cases():
    g = build([1], [])
    assert g.remove_vertex(1)
    assert g.partition() == frozenset()
    assert g.compact_empty_components() == 1
    assert g.cc_count.value == 0

    g = build([1, 2, 3], [(1, 2), (2, 3)])
    g.remove_vertex(2)
    assert g.partition() == parts({1}, {3})

    g = build([1, 2, 3], [(1, 2), (2, 3), (3, 1)])
    g.remove_vertex(2)
    assert g.partition() == parts({1}, {3})
    assert_matches_oracle(g)


def test_is_reachable_chain():
    g = build([1, 2, 3], [(1, 2), (2, 3)])
    comp = {k: c for c in g.components() for k in c.payload.keys()}
    assert g.is_reachable(comp[1], comp[3])
    assert not g.is_reachable(comp[3], comp[1])
    assert g.is_reachable(comp[2], comp[2])
    lone = build([1, 2], [])
    a, b = list(lone.components())
    assert not lone.is_reachable(a, b)


def test_merge_of_k_components_empties_all_k():
    k = 6
    g = build(range(1, k + 1), [(i, i + 1) for i in range(1, k)])
    assert g.compact_empty_components() == 0
    g.add_edge(k, 1)
    assert g.compact_empty_components() == k
    # k singletons emptied into one fresh component: net change k - 1
    assert g.component_count() == 1
    assert g.cc_count.value == 1


def test_ccids_never_reissued():
    g = build(range(1, 8), [(i, i % 7 + 1) for i in range(1, 8)])
    g.remove_edge(7, 1)
    g.add_edge(7, 1)
    assert g.reissued == []
    assert len(g.issued) == g.ccid.value - 1
    assert_matches_oracle(g)


def test_edge_symmetry_and_export():
    rng = random.Random(4)
    edges = [(u, v) for u in range(1, 9) for v in range(1, 9) if u != v and rng.random() < 0.3]
    g = build(range(1, 9), edges, die=True)
    for u, v in edges[::3]:
        g.remove_edge(u, v)
    g.remove_vertex(4)
    lists = g.edge_lists()
    for u, keys in lists.items():
        for k in keys:
            if k > 0:
                assert -u in lists[k]
            else:
                assert u in lists[-k]
    rows = partition_from_text(g.export_partition())
    assert frozenset(frozenset(m) for _, m in rows) == g.partition()
    firsts = [m[0] for _, m in rows]
    assert firsts == sorted(firsts)


graphs = st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda e: e[0] != e[1]),
                         max_size=20)))


@settings(max_examples=150, deadline=None)
@given(graphs, st.randoms())
def test_check_scc_is_an_equivalence(case, rnd):
    n, edges = case
    g = build(range(1, n + 1), [])
    for u, v in edges:
        g.add_edge(u, v)
    for u, v in rnd.sample(edges, len(edges) // 2):
        g.remove_edge(u, v)
    keys = range(1, n + 1)
    rel = {(u, v): g.check_scc(u, v) for u in keys for v in keys}
    for u in keys:
        assert rel[u, u]
    for u, v in itertools.product(keys, keys):
        assert rel[u, v] == rel[v, u]
    for u, v, w in itertools.product(keys, keys, keys):
        if rel[u, v] and rel[v, w]:
            assert rel[u, w]
    assert g.partition() == kosaraju_scc(g.snapshot())


def test_seqlock_reader_retries_during_restructure():
    g = build([1, 2], [(1, 2), (2, 1)])
    g._version += 1  # pretend a restructure is running
    box = []
    t = threading.Thread(target=lambda: box.append(g.check_scc(1, 2)))
    t.start()
    t.join(0.2)
    assert t.is_alive() and not box
    g._version += 1
    t.join(5)
    assert box == [True]


@pytest.mark.parametrize("die", [False, True])
def test_concurrent_workload_matches_oracle(die):
    rng = random.Random(die)
    n = 40
    g = build(range(1, n + 1), [tuple(rng.sample(range(1, n + 1), 2)) for _ in range(2 * n)],
              die=die, cell_type=CheckedCell)
    fresh = itertools.count(n + 1)
    stop = threading.Event()

    def worker(seed):
        r = random.Random(seed)
        mine = list(range(1, n + 1))
        while not stop.is_set():
            x = r.random()
            u, v = r.sample(mine, 2)
            if x < 0.4:
                g.add_edge(u, v)
            elif x < 0.65:
                g.remove_edge(u, v)
            elif x < 0.75:
                k = next(fresh)
                g.add_vertex(k)
                mine.append(k)
            elif x < 0.8:
                g.remove_vertex(u)
            else:
                g.check_scc(u, v)
                g.belongs_to(u)

    with instrument.recording() as rec:
        ts = [threading.Thread(target=worker, args=(s,)) for s in range(4)]
        for t in ts:
            t.start()
        stop.wait(1.5)
        stop.set()
        for t in ts:
            t.join()
    assert rec.violations == []
    assert g.restructures > 0
    assert_matches_oracle(g)
    assert g.reissued == []
    snap = g.snapshot()
    tables = [set(keys) for _, keys in g.component_table()]
    assert sum(len(t) for t in tables) == len(snap.vertices) == len(set().union(*tables))

"""Reference semantics: the sequential graph model and offline SCC algorithms.

All three SCC routines are iterative so they survive long paths, and all
return the same shape: a frozenset of frozensets of vertex keys.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .snapshot import GraphSnapshot, canonical_partition


class CodecError(ValueError):
    """Malformed operation name or arity."""


ARITY = {
    "addVertex": 1,
    "removeVertex": 1,
    "addEdge": 2,
    "removeEdge": 2,
    "containsVertex": 1,
    "containsEdge": 2,
    "checkScc": 2,
    "belongsTo": 1,
    "acyclicAddEdge": 2,
}


# ---------------------------------------------------------------- graph search

def _adjacency(vertices, edges):
    succ = {v: [] for v in vertices}
    pred = {v: [] for v in vertices}
    for u, v in edges:
        succ[u].append(v)
        pred[v].append(u)
    for lst in succ.values():
        lst.sort()
    for lst in pred.values():
        lst.sort()
    return succ, pred


def _reach(adj, start, allowed=None) -> set:
    seen = {start}
    todo = [start]
    while todo:
        x = todo.pop()
        for y in adj[x]:
            if y not in seen and (allowed is None or y in allowed):
                seen.add(y)
                todo.append(y)
    return seen


def path_exists(snapshot: GraphSnapshot, u: int, v: int) -> bool:
    """Directed path from ``u`` to ``v`` (zero-length when ``u == v``)."""
    if u not in snapshot.vertices or v not in snapshot.vertices:
        return False
    if u == v:
        return True
    succ, _ = _adjacency(snapshot.vertices, snapshot.edges)
    return v in _reach(succ, u)


def tarjan_scc(snapshot: GraphSnapshot) -> frozenset:
    succ, _ = _adjacency(snapshot.vertices, snapshot.edges)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out = []
    counter = 0
    for root in sorted(snapshot.vertices):
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ[root]))]
        while work:
            x, it = work[-1]
            advanced = False
            for y in it:
                if y not in index:
                    index[y] = low[y] = counter
                    counter += 1
                    stack.append(y)
                    on_stack.add(y)
                    work.append((y, iter(succ[y])))
                    advanced = True
                    break
                if y in on_stack and index[y] < low[x]:
                    low[x] = index[y]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[x] < low[parent]:
                    low[parent] = low[x]
            if low[x] == index[x]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == x:
                        break
                out.append(comp)
    return canonical_partition(out)


def kosaraju_scc(snapshot: GraphSnapshot) -> frozenset:
    succ, pred = _adjacency(snapshot.vertices, snapshot.edges)
    order: list[int] = []
    seen: set[int] = set()
    for root in sorted(snapshot.vertices):
        if root in seen:
            continue
        seen.add(root)
        work = [(root, iter(succ[root]))]
        while work:
            x, it = work[-1]
            for y in it:
                if y not in seen:
                    seen.add(y)
                    work.append((y, iter(succ[y])))
                    break
            else:
                work.pop()
                order.append(x)
    assigned: set[int] = set()
    out = []
    for root in reversed(order):
        if root in assigned:
            continue
        comp = [root]
        assigned.add(root)
        todo = [root]
        while todo:
            x = todo.pop()
            for y in pred[x]:
                if y not in assigned:
                    assigned.add(y)
                    comp.append(y)
                    todo.append(y)
        out.append(comp)
    return canonical_partition(out)


def fwbw_scc(snapshot: GraphSnapshot) -> frozenset:
    succ, pred = _adjacency(snapshot.vertices, snapshot.edges)

    def bfs(adj, start, allowed):
        seen = {start}
        q = deque([start])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y in allowed and y not in seen:
                    seen.add(y)
                    q.append(y)
        return seen

    out = []
    pending = [frozenset(snapshot.vertices)]
    while pending:
        part = pending.pop()
        if not part:
            continue
        pivot = min(part)
        desc = bfs(succ, pivot, part)
        anc = bfs(pred, pivot, part)
        scc = desc & anc
        out.append(scc)
        pending.append(frozenset(desc - scc))
        pending.append(frozenset(anc - scc))
        pending.append(frozenset(part - (desc | anc)))
    return canonical_partition(out)


ALGORITHMS = {"tarjan": tarjan_scc, "kosaraju": kosaraju_scc, "fwbw": fwbw_scc}


def offline_scc(snapshot: GraphSnapshot, algorithm: str = "tarjan") -> frozenset:
    try:
        fn = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown SCC algorithm {algorithm!r}") from None
    return fn(snapshot)


def is_acyclic(snapshot: GraphSnapshot) -> bool:
    """Kahn's algorithm consumes every vertex iff the graph has no cycle."""
    indeg = {v: 0 for v in snapshot.vertices}
    succ, _ = _adjacency(snapshot.vertices, snapshot.edges)
    for _, v in snapshot.edges:
        indeg[v] += 1
    ready = [v for v, d in indeg.items() if d == 0]
    consumed = 0
    while ready:
        x = ready.pop()
        consumed += 1
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                ready.append(y)
    return consumed == len(indeg)


# ------------------------------------------------------------- sequential model

@dataclass(frozen=True)
class SequentialGraphModel:
    """Abstract graph state; ``apply`` returns ``(result, new_model)``.

    ``belongsTo`` yields the member set of the vertex's SCC (or ``None``) since
    component ids of a concurrent run are not comparable with the model's.
    """

    vertices: frozenset = field(default_factory=frozenset)
    edges: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_snapshot(cls, snap: GraphSnapshot) -> "SequentialGraphModel":
        return cls(snap.vertices, snap.edges)

    @classmethod
    def build(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()) -> "SequentialGraphModel":
        s = GraphSnapshot.build(vertices, edges)
        return cls(s.vertices, s.edges)

    def snapshot(self) -> GraphSnapshot:
        return GraphSnapshot(self.vertices, self.edges)

    def key(self):
        return (self.vertices, self.edges)

    def scc_partition(self) -> frozenset:
        return tarjan_scc(self.snapshot())

    def apply(self, op: str, args) -> tuple[object, "SequentialGraphModel"]:
        args = tuple(args)
        if ARITY.get(op) != len(args):
            raise CodecError(f"malformed operation {op}{args}")
        V, E = self.vertices, self.edges
        if op == "addVertex":
            (u,) = args
            return True, (self if u in V else SequentialGraphModel(V | {u}, E))
        if op == "removeVertex":
            (u,) = args
            if u not in V:
                return False, self
            return True, SequentialGraphModel(V - {u}, frozenset(e for e in E if u not in e))
        if op == "containsVertex":
            return args[0] in V, self
        if op == "belongsTo":
            (u,) = args
            if u not in V:
                return None, self
            for comp in self.scc_partition():
                if u in comp:
                    return comp, self
        u, v = args
        if u == v:
            if op == "checkScc":
                return u in V, self
            if op == "containsEdge":
                return False, self
            raise CodecError(f"self-loop in {op}{args}")
        present = u in V and v in V
        if op == "addEdge":
            if not present:
                return False, self
            return True, (self if (u, v) in E else SequentialGraphModel(V, E | {(u, v)}))
        if op == "removeEdge":
            if not present:
                return False, self
            return True, (SequentialGraphModel(V, E - {(u, v)}) if (u, v) in E else self)
        if op == "containsEdge":
            return (u, v) in E, self
        if op == "checkScc":
            if not present:
                return False, self
            succ = _adjacency(V, E)[0]
            return v in _reach(succ, u) and u in _reach(succ, v), self
        if op == "acyclicAddEdge":
            if not present:
                return False, self
            if (u, v) in E:
                return True, self
            if u in _reach(_adjacency(V, E)[0], v):
                return False, self
            return True, SequentialGraphModel(V, E | {(u, v)})
        raise CodecError(f"unknown operation {op!r}")


def results_match(op: str, expected, actual) -> bool:
    if op == "belongsTo":
        return (expected is None) == (actual is None)
    return expected == actual

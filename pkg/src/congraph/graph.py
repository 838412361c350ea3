"""Concurrent directed graph: a lazy list of vertices, each owning a lazy list of
outgoing edges.

``ConcurrentGraph`` is the fine-grained structure. ``SequentialGraph`` and
``CoarseGraph`` keep the same linked layout without per-cell locking and serve
as the single-thread and global-lock baselines for the benchmark.
"""

from __future__ import annotations

import functools
import threading

from .instrument import EDGE, VERTEX
from .ordered_set import MAX_SENTINEL, MIN_SENTINEL, DomainError, LazyList, ListCell, check_key
from .snapshot import GraphSnapshot

OPERATIONS = ("addVertex", "removeVertex", "addEdge", "removeEdge", "containsVertex", "containsEdge")


class QuiescenceError(RuntimeError):
    """Raised by debug builds when a snapshot is taken while operations are in flight."""


def _check_edge(u: int, v: int) -> None:
    check_key(u)
    check_key(v)
    if u == v:
        raise DomainError(f"self-loop ({u}, {u}) is not supported")


class ConcurrentGraph:
    """Fine-grained concurrent graph.

    With ``die=True`` a successful ``remove_vertex`` also sweeps every other
    vertex's edge list and deletes edges pointing at the removed key.
    ``debug=True`` counts in-flight operations so ``snapshot`` can detect
    being called without quiescence.
    """

    def __init__(self, die: bool = False, cell_type: type[ListCell] = ListCell, debug: bool = False):
        self.die = die
        self.cell_type = cell_type
        self.vertices = LazyList(cell_type, level=VERTEX)
        self._in_flight = 0
        self._flight_lock = threading.Lock()
        self.debug = debug
        if debug:
            for name in ("add_vertex", "remove_vertex", "add_edge", "remove_edge",
                         "contains_vertex", "contains_edge"):
                setattr(self, name, self._tracked(getattr(self, name)))

    def _tracked(self, method):
        @functools.wraps(method)
        def wrapper(*args):
            with self._flight_lock:
                self._in_flight += 1
            try:
                return method(*args)
            finally:
                with self._flight_lock:
                    self._in_flight -= 1
        return wrapper

    def _new_edge_list(self) -> LazyList:
        return LazyList(self.cell_type, level=EDGE)

    def add_vertex(self, u: int) -> bool:
        # Already-present keys leave the list untouched; the result is true either way.
        self.vertices.insert(u, payload_factory=self._new_edge_list)
        return True

    def remove_vertex(self, u: int) -> bool:
        if not self.vertices.remove(u):
            return False
        if self.die:
            self._remove_incoming(u)
        return True

    def _remove_incoming(self, u: int) -> None:
        cell = self.vertices.head.next
        while cell.key != MAX_SENTINEL:
            cell.payload.remove(u)
            cell = cell.next

    def _help_search(self, u: int, v: int):
        """Locate both endpoints without locks, starting from the smaller key."""
        vl = self.vertices
        if u < v:
            cu = vl.find(u)
            if cu.key != u or cu.marked:
                return None
            cv = vl.find(v, cu)
            if cv.key != v or cv.marked:
                return None
        else:
            cv = vl.find(v)
            if cv.key != v or cv.marked:
                return None
            cu = vl.find(u, cv)
            if cu.key != u or cu.marked:
                return None
        return cu, cv

    def add_edge(self, u: int, v: int) -> bool:
        _check_edge(u, v)
        found = self._help_search(u, v)
        if found is None:
            return False
        cu, cv = found
        if cu.marked or cv.marked:
            return False
        cu.payload.insert(v)
        if self.die and cv.marked:
            # the removal's sweep may have passed u already; undo what it would have purged
            cu.payload.remove(v)
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        _check_edge(u, v)
        found = self._help_search(u, v)
        if found is None:
            return False
        cu, cv = found
        if cu.marked or cv.marked:
            return False
        cu.payload.remove(v)
        return True

    def contains_vertex(self, u: int) -> bool:
        return self.vertices.contains(u)

    def contains_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        found = self._help_search(u, v)
        if found is None:
            return False
        return found[0].payload.contains(v)

    def snapshot(self) -> GraphSnapshot:
        if self.debug and self._in_flight:
            raise QuiescenceError(f"{self._in_flight} operations still in flight")
        cells = list(self.vertices.cells())
        keys = {c.key for c in cells}
        edges = [(c.key, e.key) for c in cells for e in c.payload.cells() if e.key in keys]
        return GraphSnapshot(frozenset(keys), frozenset(edges))

    def export_text(self) -> str:
        return self.snapshot().to_text()

    def apply(self, op: str, *args):
        return getattr(self, _METHOD[op])(*args)


_METHOD = {
    "addVertex": "add_vertex",
    "removeVertex": "remove_vertex",
    "addEdge": "add_edge",
    "removeEdge": "remove_edge",
    "containsVertex": "contains_vertex",
    "containsEdge": "contains_edge",
    "checkScc": "check_scc",
    "belongsTo": "belongs_to",
    "acyclicAddEdge": "acyclic_add_edge",
}


class _PlainList:
    """Sorted singly linked list without locks or marks."""

    __slots__ = ("head", "tail")

    def __init__(self):
        self.tail = ListCell(MAX_SENTINEL, locked=False)
        self.head = ListCell(MIN_SENTINEL, self.tail, locked=False)

    def _window(self, key):
        pred = self.head
        curr = pred.next
        while curr.key < key:
            pred = curr
            curr = curr.next
        return pred, curr

    def insert(self, key, payload=None) -> bool:
        pred, curr = self._window(key)
        if curr.key == key:
            return False
        pred.next = ListCell(key, curr, payload, locked=False)
        return True

    def remove(self, key) -> bool:
        pred, curr = self._window(key)
        if curr.key != key:
            return False
        pred.next = curr.next
        return True

    def find(self, key):
        curr = self.head
        while curr.key < key:
            curr = curr.next
        return curr if curr.key == key else None

    def cells(self):
        curr = self.head.next
        while curr is not self.tail:
            yield curr
            curr = curr.next


class SequentialGraph:
    """Same linked layout as ``ConcurrentGraph`` with no synchronization at all."""

    def __init__(self, die: bool = True):
        self.die = die
        self.vertices = _PlainList()

    def add_vertex(self, u: int) -> bool:
        check_key(u)
        pred, curr = self.vertices._window(u)
        if curr.key != u:
            pred.next = ListCell(u, curr, _PlainList(), locked=False)
        return True

    def remove_vertex(self, u: int) -> bool:
        check_key(u)
        if not self.vertices.remove(u):
            return False
        if self.die:
            for cell in self.vertices.cells():
                cell.payload.remove(u)
        return True

    def _endpoints(self, u, v):
        _check_edge(u, v)
        cu = self.vertices.find(u)
        if cu is None or self.vertices.find(v) is None:
            return None
        return cu

    def add_edge(self, u: int, v: int) -> bool:
        cu = self._endpoints(u, v)
        if cu is None:
            return False
        cu.payload.insert(v)
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        cu = self._endpoints(u, v)
        if cu is None:
            return False
        cu.payload.remove(v)
        return True

    def contains_vertex(self, u: int) -> bool:
        return self.vertices.find(u) is not None

    def contains_edge(self, u: int, v: int) -> bool:
        cu = self.vertices.find(u)
        if cu is None or u == v or self.vertices.find(v) is None:
            return False
        return cu.payload.find(v) is not None

    def snapshot(self) -> GraphSnapshot:
        cells = list(self.vertices.cells())
        keys = {c.key for c in cells}
        edges = [(c.key, e.key) for c in cells for e in c.payload.cells() if e.key in keys]
        return GraphSnapshot(frozenset(keys), frozenset(edges))

    def apply(self, op: str, *args):
        return getattr(self, _METHOD[op])(*args)


class CoarseGraph(SequentialGraph):
    """``SequentialGraph`` behind one global lock."""

    def __init__(self, die: bool = True):
        super().__init__(die)
        self._lock = threading.Lock()

    def add_vertex(self, u):
        with self._lock:
            return super().add_vertex(u)

    def remove_vertex(self, u):
        with self._lock:
            return super().remove_vertex(u)

    def add_edge(self, u, v):
        with self._lock:
            return super().add_edge(u, v)

    def remove_edge(self, u, v):
        with self._lock:
            return super().remove_edge(u, v)

    def contains_vertex(self, u):
        with self._lock:
            return super().contains_vertex(u)

    def contains_edge(self, u, v):
        with self._lock:
            return super().contains_edge(u, v)

    def snapshot(self):
        with self._lock:
            return super().snapshot()

"""Concurrent graph that keeps its strongly connected components up to date.

Layout is three lists deep: an unordered list of components, each holding a
sorted list of vertices, each holding a sorted list of signed edge keys
(``+d`` for an edge to ``d``, ``-s`` for an edge from ``s``).

Edge and vertex updates run concurrently under fine-grained cell locks.
Changing the partition (merging after an insertion closes a cycle, splitting
after a deletion) takes the registry's restructure lock exclusively; plain
updates hold it shared, so no update can slip an edge in while a pass is
walking the graph. Queries never lock. They read a version counter that is
odd while a restructure is running and retry if it moved.

Vertex keys must be positive so their negation is a distinct edge key.
"""

from __future__ import annotations

import threading
import time
from contextlib import contextmanager

from . import instrument
from .graph import _METHOD
from .instrument import COMPONENT, EDGE, VERTEX
from .ordered_set import MAX_SENTINEL, MIN_SENTINEL, DomainError, LazyList, ListCell, validate
from .snapshot import GraphSnapshot, canonical_partition, partition_to_text

OPERATIONS = ("addVertex", "removeVertex", "addEdge", "removeEdge",
              "containsVertex", "containsEdge", "checkScc", "belongsTo")

_STRIPES = 64


def check_vertex_key(key: int) -> int:
    if isinstance(key, bool) or not isinstance(key, int):
        raise DomainError(f"key must be an int, got {key!r}")
    if not 0 < key < MAX_SENTINEL:
        raise DomainError(f"vertex key {key} must be positive and below the sentinel")
    return key


def _check_edge(u, v):
    check_vertex_key(u)
    check_vertex_key(v)
    if u == v:
        raise DomainError(f"self-loop ({u}, {u}) is not supported")


class AtomicCounter:
    def __init__(self, start: int = 0):
        self._value = start
        self._lock = threading.Lock()

    def fetch_add(self, delta: int = 1) -> int:
        with self._lock:
            old = self._value
            self._value += delta
            return old

    @property
    def value(self) -> int:
        return self._value


class RestructureLock:
    """Shared/exclusive lock. Waiting writers block new readers."""

    def __init__(self):
        self._cond = threading.Condition(threading.Lock())
        self._readers = 0
        self._writer = False
        self._waiting = 0

    @contextmanager
    def shared(self):
        with self._cond:
            while self._writer or self._waiting:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if not self._readers:
                    self._cond.notify_all()

    @contextmanager
    def exclusive(self):
        with self._cond:
            self._waiting += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._waiting -= 1
            self._writer = True
        try:
            yield
        finally:
            with self._cond:
                self._writer = False
                self._cond.notify_all()


class ComponentRecord(ListCell):
    """Component cell: ``key`` is the ccno, ``payload`` the vertex list."""

    __slots__ = ()

    @property
    def ccno(self) -> int:
        return self.key

    @property
    def vertices(self) -> LazyList:
        return self.payload

    def __repr__(self) -> str:
        flag = "x" if self.marked else ""
        return f"<Component {self.key}{flag} {self.payload.keys() if self.payload else ''}>"


class SccGraph:
    """Directed graph with a maintained SCC partition.

    ``die=True`` makes vertex removal purge the removed key from every
    neighbour's edge list; otherwise only neighbours in the same component
    are cleaned and cross-component edge cells are left dangling (they
    name an absent vertex, so they are not part of the graph).

    ``auto_compact`` reaps emptied components at the end of every
    restructure instead of waiting for ``compact_empty_components``.
    """

    def __init__(self, die: bool = False, cell_type: type[ListCell] = ListCell, auto_compact: bool = False):
        self.die = die
        self.cell_type = cell_type
        self.auto_compact = auto_compact
        self.cc_tail = ComponentRecord(MAX_SENTINEL)
        self.cc_head = ComponentRecord(MIN_SENTINEL, self.cc_tail)
        self.ccid = AtomicCounter(1)
        self.cc_count = AtomicCounter(0)
        self.issued: set[int] = set()
        self.reissued: list[int] = []
        self._rw = RestructureLock()
        self._version = 0
        self._stripes = [threading.Lock() for _ in range(_STRIPES)]
        self.restructures = 0

    # ------------------------------------------------------------ components

    def _new_ccno(self) -> int:
        ccno = self.ccid.fetch_add(1)
        if ccno in self.issued:
            self.reissued.append(ccno)
        self.issued.add(ccno)
        return ccno

    def _create_component(self, key: int, edges: LazyList) -> ComponentRecord:
        """Link a new component holding one vertex at the head of the list."""
        vl = LazyList(self.cell_type, level=VERTEX)
        cell = self.cell_type(key, vl.tail, edges)
        vl.head.next = cell
        comp = ComponentRecord(self._new_ccno(), None, vl)
        while True:
            pred = self.cc_head
            curr = pred.next
            instrument.acquire_pair(pred, curr, self, COMPONENT)
            try:
                if validate(pred, curr):
                    comp.next = curr
                    pred.next = comp
                    self.cc_count.fetch_add(1)
                    return comp
            finally:
                instrument.release_pair(pred, curr)

    def components(self):
        """Unmarked component records, newest first (unlocked scan)."""
        c = self.cc_head.next
        while c is not self.cc_tail:
            if not c.marked:
                yield c
            c = c.next

    def _locate(self, key: int):
        """(component, vertex cell) holding ``key`` unmarked, or ``None``."""
        for comp in self.components():
            cell = comp.payload.find(key)
            if cell.key == key and not cell.marked:
                return comp, cell
        return None

    def _index(self) -> dict:
        return {cell.key: (comp, cell) for comp in self.components() for cell in comp.payload.cells()}

    @contextmanager
    def _restructuring(self):
        with self._rw.exclusive():
            self._version += 1
            try:
                yield
            finally:
                if self.auto_compact:
                    self._compact()
                self._version += 1

    def _read(self, fn):
        while True:
            v0 = self._version
            if v0 & 1:
                time.sleep(0)
                continue
            result = fn()
            if self._version == v0:
                return result

    # --------------------------------------------------------------- updates

    def add_vertex(self, u: int) -> bool:
        check_vertex_key(u)
        with self._rw.shared(), self._stripes[u % _STRIPES]:
            if self._locate(u) is not None:
                return False
            self._create_component(u, LazyList(self.cell_type, level=EDGE))
            return True

    def add_edge(self, u: int, v: int) -> bool:
        _check_edge(u, v)
        with self._rw.shared():
            fu = self._locate(u)
            fv = self._locate(v)
            fu = fu and self._locate(u)
            if fu is None or fv is None:
                return False
            (cu_comp, cu), (cv_comp, cv) = fu, fv
            added = cu.payload.insert(v)
            cv.payload.insert(-u)
            if cu.marked or cv.marked:
                # an endpoint went away meanwhile; its cleanup may already have run
                cu.payload.remove(v)
                cv.payload.remove(-u)
                return True
            if not added or cu_comp is cv_comp:
                return True
        with self._restructuring():
            idx = self._index()
            if u in idx and v in idx and idx[u][0] is not idx[v][0]:
                if self.is_reachable(idx[v][0], idx[u][0], idx):
                    self.merge_affected(v, idx)
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        _check_edge(u, v)
        with self._rw.shared():
            fu = self._locate(u)
            fv = self._locate(v)
            if fu is None or fv is None:
                return False
            (cu_comp, cu), (cv_comp, cv) = fu, fv
            removed = cu.payload.remove(v)
            cv.payload.remove(-u)
            if not removed or cu_comp is not cv_comp:
                return True
        with self._restructuring():
            self._split_around(cu_comp, (u, v))
        return True

    def remove_vertex(self, u: int) -> bool:
        check_vertex_key(u)
        with self._rw.shared():
            found = self._locate(u)
            if found is None:
                return False
            comp, cell = found
            if not comp.payload.remove(u):
                return False
            peers = []
            for e in cell.payload.cells():
                w = abs(e.key)
                fw = self._locate(w)
                if fw is None:
                    continue
                if fw[0] is comp:
                    peers.append(w)
                elif not self.die:
                    continue
                fw[1].payload.remove(-u if e.key > 0 else u)
        if peers or comp.payload.head.next is not comp.payload.tail:
            with self._restructuring():
                self._split_around(comp, peers)
        return True

    # ------------------------------------------------------------- restructure

    def is_reachable(self, src: ComponentRecord, dst: ComponentRecord, index: dict | None = None) -> bool:
        """Some vertex of ``dst`` is reachable from a vertex of ``src`` over outgoing edges."""
        if src is dst:
            return True
        index = self._index() if index is None else index
        targets = set(dst.payload.keys())
        todo = src.payload.keys()
        seen = set(todo)
        while todo:
            x = todo.pop()
            if x in targets:
                return True
            entry = index.get(x)
            if entry is None:
                continue
            for e in entry[1].payload.cells():
                y = e.key
                if y > 0 and y not in seen and y in index:
                    seen.add(y)
                    todo.append(y)
        return False

    def _relocate(self, group: list[int], index: dict) -> ComponentRecord:
        """Move the vertices in ``group`` into one fresh component."""
        first = group[0]
        old_comp, old_cell = index[first]
        comp = self._create_component(first, old_cell.payload)
        old_comp.payload.remove(first)
        index[first] = (comp, comp.payload.head.next)
        for key in group[1:]:
            old_comp, old_cell = index[key]
            comp.payload.insert(key, old_cell.payload)
            old_comp.payload.remove(key)
            index[key] = (comp, comp.payload.find(key))
        return comp

    def _apply_sccs(self, sccs: list[list[int]], index: dict) -> int:
        moved = 0
        for scc in sccs:
            comp = index[scc[0]][0]
            if len(comp.payload) == len(scc) and all(index[k][0] is comp for k in scc):
                continue
            self._relocate(scc, index)
            moved += 1
        if moved:
            self.restructures += 1
        return moved

    def merge_affected(self, start: int, index: dict | None = None) -> bool:
        """Tarjan over everything reachable from ``start``; regroup the SCCs found.

        Must run inside a restructure. SCCs that already match a component
        exactly are left alone.
        """
        index = self._index() if index is None else index
        if start not in index:
            return False

        def succ(x):
            return [e.key for e in index[x][1].payload.cells() if e.key > 0 and e.key in index]

        order: dict[int, int] = {start: 0}
        low = {start: 0}
        stack = [start]
        on_stack = {start}
        work = [(start, iter(succ(start)))]
        sccs = []
        while work:
            x, it = work[-1]
            pushed = False
            for y in it:
                if y not in order:
                    order[y] = low[y] = len(order)
                    stack.append(y)
                    on_stack.add(y)
                    work.append((y, iter(succ(y))))
                    pushed = True
                    break
                if y in on_stack and order[y] < low[x]:
                    low[x] = order[y]
            if pushed:
                continue
            work.pop()
            if work and low[x] < low[work[-1][0]]:
                low[work[-1][0]] = low[x]
            if low[x] == order[x]:
                scc = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.append(w)
                    if w == x:
                        break
                sccs.append(scc)
        self._apply_sccs(sccs, index)
        return True

    def split_affected(self, comp: ComponentRecord, index: dict | None = None) -> bool:
        """Kosaraju restricted to ``comp``'s members; one new component per SCC.

        Must run inside a restructure. If the component is still strongly
        connected nothing moves and it keeps its ccno.
        """
        if comp.marked:
            return False
        index = self._index() if index is None else index
        members = comp.payload.keys()
        if len(members) <= 1:
            return True
        inside = set(members)

        def neighbours(x, sign):
            return [sign * e.key for e in index[x][1].payload.cells() if sign * e.key in inside]

        finished: list[int] = []
        seen: set[int] = set()
        for root in members:
            if root in seen:
                continue
            seen.add(root)
            work = [(root, iter(neighbours(root, 1)))]
            while work:
                x, it = work[-1]
                for y in it:
                    if y not in seen:
                        seen.add(y)
                        work.append((y, iter(neighbours(y, 1))))
                        break
                else:
                    work.pop()
                    finished.append(x)
        label: dict[int, int] = {}
        sccs = []
        for root in reversed(finished):
            if root in label:
                continue
            label[root] = len(sccs)
            scc = [root]
            todo = [root]
            while todo:
                x = todo.pop()
                for y in neighbours(x, -1):
                    if y not in label:
                        label[y] = len(sccs)
                        scc.append(y)
                        todo.append(y)
            sccs.append(scc)
        if len(sccs) > 1:
            self._apply_sccs(sccs, index)
        return True

    def _split_around(self, comp: ComponentRecord, keys) -> None:
        # Another restructure may have moved some of these vertices since the
        # shared phase, so split wherever they live now as well.
        index = self._index()
        targets = [comp]
        for k in keys:
            if k in index and index[k][0] not in targets:
                targets.append(index[k][0])
        for c in targets:
            self.split_affected(c, index)

    def _compact(self) -> int:
        reaped = 0
        pred = self.cc_head
        curr = pred.next
        while curr is not self.cc_tail:
            nxt = curr.next
            unlinked = False
            if not curr.marked and curr.payload.head.next is curr.payload.tail:
                instrument.acquire_pair(pred, curr, self, COMPONENT)
                try:
                    if validate(pred, curr) and curr.payload.head.next is curr.payload.tail:
                        curr.marked = True
                        pred.next = curr.next
                        self.cc_count.fetch_add(-1)
                        reaped += 1
                        unlinked = True
                finally:
                    instrument.release_pair(pred, curr)
            if not unlinked:
                pred = curr
            curr = nxt
        return reaped

    def compact_empty_components(self) -> int:
        with self._rw.exclusive():
            self._version += 1
            try:
                return self._compact()
            finally:
                self._version += 1

    # --------------------------------------------------------------- queries

    def contains_vertex(self, u: int) -> bool:
        return self._read(lambda: self._locate(u) is not None)

    def contains_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False

        def probe():
            fu, fv = self._locate(u), self._locate(v)
            return fu is not None and fv is not None and fu[1].payload.contains(v)
        return self._read(probe)

    def check_scc(self, u: int, v: int) -> bool:
        def probe():
            fu = self._locate(u)
            if fu is None:
                return False
            if u == v:
                return True
            fv = self._locate(v)
            return fv is not None and fu[0] is fv[0]
        return self._read(probe)

    def belongs_to(self, u: int) -> int | None:
        def probe():
            found = self._locate(u)
            return None if found is None else found[0].ccno
        return self._read(probe)

    def apply(self, op: str, *args):
        return getattr(self, _METHOD[op])(*args)

    # ------------------------------------------------------- quiescent views

    def snapshot(self) -> GraphSnapshot:
        cells = [cell for comp in self.components() for cell in comp.payload.cells()]
        keys = {c.key for c in cells}
        edges = [(c.key, e.key) for c in cells for e in c.payload.cells() if e.key > 0 and e.key in keys]
        return GraphSnapshot(frozenset(keys), frozenset(edges))

    def edge_lists(self) -> dict[int, list[int]]:
        """Raw signed edge keys per present vertex."""
        return {cell.key: cell.payload.keys() for comp in self.components() for cell in comp.payload.cells()}

    def component_table(self) -> list[tuple[int, list[int]]]:
        return [(comp.ccno, comp.payload.keys()) for comp in self.components()]

    def partition(self) -> frozenset:
        return canonical_partition(keys for _, keys in self.component_table())

    def export_partition(self) -> str:
        return partition_to_text(self.component_table())

    def component_count(self) -> int:
        return sum(1 for _ in self.components())

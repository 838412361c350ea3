"""Acyclicity-preserving wrapper over ``ConcurrentGraph``.

``serialized`` mode holds one lock across the reachability check and the
insert in ``acyclic_add_edge``, so two insertions can never close a cycle
together. ``optimistic`` mode inserts first, checks afterwards and rolls back;
two racing inserts can both see no cycle, so it only guarantees acyclicity
for sequential use.
"""

from __future__ import annotations

import threading

from .graph import ConcurrentGraph, _check_edge, _METHOD
from .oracle import is_acyclic
from .ordered_set import ListCell

MODES = ("serialized", "optimistic")


class AcyclicGraph:
    def __init__(self, mode: str = "serialized", die: bool = True, cell_type: type[ListCell] = ListCell):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
        self.mode = mode
        self.inner = ConcurrentGraph(die=die, cell_type=cell_type)
        self.check_lock = threading.Lock()
        self.last_witness: list[int] | None = None

    def path(self, src: int, dst: int) -> list[int] | None:
        """A directed path ``src ... dst`` over unmarked cells, or ``None``."""
        start = self.inner.vertices.find(src)
        if start.key != src or start.marked:
            return None
        parent: dict[int, int | None] = {src: None}
        todo = [start]
        while todo:
            cell = todo.pop()
            if cell.key == dst:
                out = [dst]
                while parent[out[-1]] is not None:
                    out.append(parent[out[-1]])
                return out[::-1]
            for e in cell.payload.cells():
                if e.key in parent:
                    continue
                nxt = self.inner.vertices.find(e.key)
                if nxt.key != e.key or nxt.marked:
                    continue
                parent[e.key] = cell.key
                todo.append(nxt)
        return None

    def acyclic_add_edge(self, u: int, v: int) -> bool:
        _check_edge(u, v)
        if self.mode == "serialized":
            with self.check_lock:
                witness = self.path(v, u)
                if witness is not None:
                    self.last_witness = witness
                    return False
                return self.inner.add_edge(u, v)
        existed = self.inner.contains_edge(u, v)
        if not self.inner.add_edge(u, v):
            return False
        if existed:
            return True
        witness = self.path(v, u)
        if witness is None:
            return True
        self.inner.remove_edge(u, v)
        self.last_witness = witness
        return False

    # deletions and vertex inserts cannot create a cycle
    def add_vertex(self, u: int) -> bool:
        return self.inner.add_vertex(u)

    def remove_vertex(self, u: int) -> bool:
        return self.inner.remove_vertex(u)

    def remove_edge(self, u: int, v: int) -> bool:
        return self.inner.remove_edge(u, v)

    def contains_vertex(self, u: int) -> bool:
        return self.inner.contains_vertex(u)

    def contains_edge(self, u: int, v: int) -> bool:
        return self.inner.contains_edge(u, v)

    def snapshot(self):
        return self.inner.snapshot()

    def export_text(self) -> str:
        return self.inner.export_text()

    def verify_acyclic(self) -> bool:
        return is_acyclic(self.snapshot())

    def apply(self, op: str, *args):
        return getattr(self, _METHOD[op])(*args)

"""Lazy-list sorted set: the building block for vertex, edge and component lists.

Removal is two-phase: a cell is first marked (logically removed), then the
predecessor is redirected past it (physically removed). Updates lock only the
two-cell window they modify and validate it after locking; membership scans
take no locks at all. Removed cells are never recycled, so a scan that is
standing on an unlinked cell can always keep walking forward.
"""

from __future__ import annotations

import threading
from typing import Callable, Iterator

from . import instrument
from .instrument import EDGE

MIN_SENTINEL = -(2**63)
MAX_SENTINEL = 2**63 - 1


class DomainError(ValueError):
    """Raised for keys outside the open sentinel interval or malformed arguments."""


def check_key(key: int) -> int:
    if isinstance(key, bool) or not isinstance(key, int):
        raise DomainError(f"key must be an int, got {key!r}")
    if not MIN_SENTINEL < key < MAX_SENTINEL:
        raise DomainError(f"key {key} is outside the open sentinel range")
    return key


class ListCell:
    __slots__ = ("key", "marked", "next", "lock", "payload")

    def __init__(self, key: int, next: "ListCell | None" = None, payload=None, locked: bool = True):
        self.key = key
        self.marked = False
        self.next = next
        self.lock = threading.Lock() if locked else None
        self.payload = payload

    def __repr__(self) -> str:
        flag = "x" if self.marked else ""
        return f"<{type(self).__name__} {self.key}{flag}>"


class CheckedCell(ListCell):
    """ListCell that refuses to ever be unmarked. Used by the debug test builds."""

    __slots__ = ()

    @property
    def marked(self) -> bool:
        return ListCell.marked.__get__(self)

    @marked.setter
    def marked(self, value: bool) -> None:
        try:
            current = ListCell.marked.__get__(self)
        except AttributeError:
            current = False
        if current and not value:
            raise AssertionError(f"cell {self.key} was unmarked after removal")
        ListCell.marked.__set__(self, value)


def validate(pred: ListCell, curr: ListCell) -> bool:
    return not pred.marked and not curr.marked and pred.next is curr


class LazyList:
    """Sorted set of integer keys with fine-grained locking.

    ``level`` only matters for the lock-order recorder; it tags which layer
    of the graph this list belongs to.
    """

    def __init__(self, cell_type: type[ListCell] = ListCell, level: int = EDGE):
        self.cell_type = cell_type
        self.level = level
        self.tail = cell_type(MAX_SENTINEL)
        self.head = cell_type(MIN_SENTINEL, self.tail)
        self.probe: instrument.VisitProbe | None = None

    def locate(self, key: int) -> tuple[ListCell, ListCell]:
        """Return a validated window ``(pred, curr)`` with both locks held."""
        while True:
            pred = self.head
            curr = pred.next
            while curr.key < key:
                pred = curr
                curr = curr.next
            instrument.acquire_pair(pred, curr, self, self.level)
            if validate(pred, curr):
                return pred, curr
            instrument.release_pair(pred, curr)

    def unlock(self, pred: ListCell, curr: ListCell) -> None:
        instrument.release_pair(pred, curr)

    def insert(self, key: int, payload=None, payload_factory: Callable | None = None) -> bool:
        check_key(key)
        pred, curr = self.locate(key)
        try:
            if curr.key == key:
                return False
            if payload_factory is not None:
                payload = payload_factory()
            cell = self.cell_type(key, curr, payload)
            pred.next = cell
            return True
        finally:
            self.unlock(pred, curr)

    def remove(self, key: int) -> bool:
        check_key(key)
        pred, curr = self.locate(key)
        try:
            if curr.key != key:
                return False
            curr.marked = True
            pred.next = curr.next
            return True
        finally:
            self.unlock(pred, curr)

    def find(self, key: int, start: ListCell | None = None) -> ListCell:
        """First cell with ``cell.key >= key``, scanning without locks."""
        curr = self.head if start is None else start
        while curr.key < key:
            curr = curr.next
        return curr

    def contains(self, key: int) -> bool:
        probe = self.probe
        curr = self.head
        if probe is None:
            while curr.key < key:
                curr = curr.next
        else:
            visits = 1
            while curr.key < key:
                curr = curr.next
                visits += 1
            probe.visits += visits
            probe.scans += 1
            probe.last = visits
        return curr.key == key and not curr.marked

    def cells(self) -> Iterator[ListCell]:
        """Unmarked non-sentinel cells in key order (unlocked scan)."""
        curr = self.head.next
        while curr is not self.tail:
            if not curr.marked:
                yield curr
            curr = curr.next

    def keys(self) -> list[int]:
        return [c.key for c in self.cells()]

    def __iter__(self) -> Iterator[int]:
        return iter(self.keys())

    def __len__(self) -> int:
        return sum(1 for _ in self.cells())

    def __contains__(self, key: int) -> bool:
        return self.contains(key)

    def __repr__(self) -> str:
        return f"LazyList({self.keys()})"

"""Debug instrumentation for the lock-based lists.

Nothing here is active by default. ``install_recorder`` switches every
cell-lock acquisition in the package over to a checked path that records
per-thread lock sets and flags ordering violations.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field

# Lock levels, acquired only in non-decreasing order by any thread.
COMPONENT = 0
VERTEX = 1
EDGE = 2

_LEVEL_NAMES = {COMPONENT: "component", VERTEX: "vertex", EDGE: "edge"}


@dataclass
class Violation:
    thread: str
    message: str


@dataclass
class LockOrderRecorder:
    """Tracks locks held per thread and reports out-of-order acquisitions.

    Two rules are checked:

    * inside one sorted list (vertex or edge list) a thread only acquires a
      cell whose key is larger than every key it already holds in that list;
    * a thread never acquires a lock of a lower level (component < vertex <
      edge) than one it already holds.

    The component list is unordered by id, so only the level rule applies
    to it.
    """

    violations: list = field(default_factory=list)
    acquisitions: int = 0
    _local: threading.local = field(default_factory=threading.local)
    _mutex: threading.Lock = field(default_factory=threading.Lock)

    def _held(self) -> list:
        held = getattr(self._local, "held", None)
        if held is None:
            held = self._local.held = []
        return held

    def thread_acquisitions(self) -> int:
        return getattr(self._local, "count", 0)

    def _report(self, message: str) -> None:
        with self._mutex:
            self.violations.append(Violation(threading.current_thread().name, message))

    def acquire(self, cell, domain, level: int) -> None:
        held = self._held()
        for h_cell, h_domain, h_level in held:
            if h_level > level:
                self._report(
                    f"{_LEVEL_NAMES[level]} lock on key {cell.key} requested while "
                    f"holding {_LEVEL_NAMES[h_level]} lock on key {h_cell.key}"
                )
            elif h_domain is domain and level != COMPONENT and h_cell.key >= cell.key:
                self._report(
                    f"descending acquisition in one {_LEVEL_NAMES[level]} list: "
                    f"key {cell.key} after {h_cell.key}"
                )
        cell.lock.acquire()
        held.append((cell, domain, level))
        self._local.count = getattr(self._local, "count", 0) + 1
        with self._mutex:
            self.acquisitions += 1

    def release(self, cell) -> None:
        held = self._held()
        for i in range(len(held) - 1, -1, -1):
            if held[i][0] is cell:
                del held[i]
                break
        else:
            self._report(f"release of key {cell.key} that this thread does not hold")
        cell.lock.release()


active_recorder: LockOrderRecorder | None = None


def install_recorder(recorder: LockOrderRecorder | None) -> None:
    global active_recorder
    active_recorder = recorder


@contextmanager
def recording():
    """Install a fresh recorder for the duration of the block."""
    rec = LockOrderRecorder()
    previous = active_recorder
    install_recorder(rec)
    try:
        yield rec
    finally:
        install_recorder(previous)


def acquire_pair(a, b, domain, level: int) -> None:
    rec = active_recorder
    if rec is None:
        a.lock.acquire()
        b.lock.acquire()
    else:
        rec.acquire(a, domain, level)
        rec.acquire(b, domain, level)


def release_pair(a, b) -> None:
    rec = active_recorder
    if rec is None:
        b.lock.release()
        a.lock.release()
    else:
        rec.release(b)
        rec.release(a)


@dataclass
class VisitProbe:
    """Counts the cells touched by unlocked membership scans."""

    visits: int = 0
    scans: int = 0
    last: int = 0

    def reset(self) -> None:
        self.visits = self.scans = self.last = 0

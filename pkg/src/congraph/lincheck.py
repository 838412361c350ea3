"""History recording and brute-force linearizability checking.

A history is a list of invoke/response events. The checker searches for a
sequential order of the completed operations (plus any pending ones whose
effect it needs) that respects real-time precedence and reproduces every
recorded return value when replayed through ``SequentialGraphModel``.
States already shown to be dead ends are memoized by (done-set, model).
"""

from __future__ import annotations

import itertools
import json
import threading
import time
from dataclasses import dataclass, field
from typing import IO, Iterable

from .oracle import ARITY, CodecError, SequentialGraphModel, results_match

MAX_COMPLETED_OPS = 20


class RecorderError(RuntimeError):
    pass


class CapacityError(ValueError):
    pass


class HistoryError(ValueError):
    pass


@dataclass
class Event:
    seq: int
    tid: int
    op: str
    args: tuple
    kind: str
    ret: object = None
    t: int = 0

    def to_json(self) -> str:
        rec = {"seq": self.seq, "tid": self.tid, "op": self.op, "args": list(self.args), "kind": self.kind}
        if self.kind == "response":
            rec["ret"] = _encode_ret(self.ret)
        rec["t"] = self.t
        return json.dumps(rec, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Event":
        try:
            rec = json.loads(line)
            kind = rec["kind"]
            if kind not in ("invoke", "response"):
                raise CodecError(f"bad event kind {kind!r}")
            op = rec["op"]
            args = tuple(int(a) for a in rec["args"])
            if ARITY.get(op) != len(args):
                raise CodecError(f"malformed operation {op}{args}")
            return cls(int(rec["seq"]), int(rec["tid"]), op, args, kind,
                       _decode_ret(rec.get("ret")) if kind == "response" else None, int(rec.get("t", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CodecError):
                raise
            raise CodecError(f"cannot decode event {line!r}: {exc}") from None


def _encode_ret(ret):
    if isinstance(ret, (set, frozenset)):
        return sorted(ret)
    return ret


def _decode_ret(ret):
    if isinstance(ret, list):
        return frozenset(ret)
    return ret


@dataclass
class History:
    events: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.events)

    def dump(self, fp: IO[str]) -> None:
        for ev in self.events:
            fp.write(ev.to_json() + "\n")

    def dumps(self) -> str:
        return "".join(ev.to_json() + "\n" for ev in self.events)

    @classmethod
    def loads(cls, text: str) -> "History":
        return cls([Event.from_json(line) for line in text.splitlines() if line.strip()])

    @classmethod
    def load(cls, fp: IO[str]) -> "History":
        return cls.loads(fp.read())

    def operations(self) -> list["Operation"]:
        """Pair invokes with responses; raises ``HistoryError`` if ill-formed."""
        pending: dict[int, tuple[Event, int]] = {}
        ops: list[Operation] = []
        for ev in sorted(self.events, key=lambda e: e.seq):
            if ev.kind == "invoke":
                if ev.tid in pending:
                    raise HistoryError(f"thread {ev.tid} invoked twice without a response")
                pending[ev.tid] = (ev, len(ops))
                ops.append(Operation(len(ops), ev.tid, ev.op, ev.args, ev.seq))
            else:
                if ev.tid not in pending:
                    raise HistoryError(f"thread {ev.tid} responded with nothing pending")
                inv, idx = pending.pop(ev.tid)
                if (inv.op, inv.args) != (ev.op, ev.args):
                    raise HistoryError(f"response {ev.op}{ev.args} does not match {inv.op}{inv.args}")
                ops[idx].ret = ev.ret
                ops[idx].resp = ev.seq
        return ops


@dataclass
class Operation:
    ident: int
    tid: int
    op: str
    args: tuple
    inv: int
    resp: int | None = None
    ret: object = None

    @property
    def complete(self) -> bool:
        return self.resp is not None

    def __str__(self) -> str:
        args = ", ".join(map(str, self.args))
        ret = self.ret if self.complete else "?"
        return f"T{self.tid}.{self.op}({args}) -> {ret}"


class Recorder:
    """Thread-safe event log. Sequence numbers give the real-time order.

    The sequence number and timestamp are assigned under one mutex, so an
    operation whose response seq is below another's invoke seq really did
    finish first.
    """

    def __init__(self):
        self._mutex = threading.Lock()
        self._seq = itertools.count()
        self._open: dict[int, Event] = {}
        self.history = History()

    def invoke(self, tid: int, op: str, args: Iterable[int]) -> Event:
        args = tuple(args)
        with self._mutex:
            if tid in self._open:
                raise RecorderError(f"thread {tid} already has {self._open[tid].op} pending")
            ev = Event(next(self._seq), tid, op, args, "invoke", None, time.monotonic_ns())
            self._open[tid] = ev
            self.history.events.append(ev)
        return ev

    def respond(self, tid: int, ret) -> Event:
        with self._mutex:
            inv = self._open.pop(tid, None)
            if inv is None:
                raise RecorderError(f"thread {tid} has no pending invocation")
            ev = Event(next(self._seq), tid, inv.op, inv.args, "response", ret, time.monotonic_ns())
            self.history.events.append(ev)
        return ev

    def record(self, event: Event) -> None:
        """Append a pre-built event, enforcing per-thread alternation."""
        with self._mutex:
            if event.kind == "invoke":
                if event.tid in self._open:
                    raise RecorderError(f"thread {event.tid} already has an operation pending")
                self._open[event.tid] = event
            else:
                if event.tid not in self._open:
                    raise RecorderError(f"thread {event.tid} has no pending invocation")
                del self._open[event.tid]
            self.history.events.append(event)

    def call(self, tid: int, op: str, fn, *args):
        self.invoke(tid, op, args)
        ret = fn(*args)
        self.respond(tid, ret)
        return ret


@dataclass
class Verdict:
    linearizable: bool
    witness: list | None
    explored: int

    def __bool__(self) -> bool:
        return self.linearizable


def check_linearizable(history: History | list, initial: SequentialGraphModel | None = None) -> Verdict:
    ops = history.operations() if isinstance(history, History) else list(history)
    initial = initial or SequentialGraphModel()
    completed = [o for o in ops if o.complete]
    if len(completed) > MAX_COMPLETED_OPS:
        raise CapacityError(f"{len(completed)} completed operations exceed the bound of {MAX_COMPLETED_OPS}")

    n = len(ops)
    ops = sorted(ops, key=lambda o: o.inv)
    complete_mask = 0
    for i, o in enumerate(ops):
        if o.complete:
            complete_mask |= 1 << i
    # must_precede[i]: completed ops that finished before op i was invoked
    must_precede = [0] * n
    for i, o in enumerate(ops):
        for j, p in enumerate(ops):
            if p.complete and p.resp < o.inv:
                must_precede[i] |= 1 << j

    dead: set = set()
    explored = 0
    order: list[int] = []

    def search(done: int, model: SequentialGraphModel) -> bool:
        nonlocal explored
        if done & complete_mask == complete_mask:
            return True
        key = (done, model.key())
        if key in dead:
            return False
        explored += 1
        for i in range(n):
            bit = 1 << i
            if done & bit or must_precede[i] & ~done:
                continue
            o = ops[i]
            ret, nxt = model.apply(o.op, o.args)
            if o.complete and not results_match(o.op, ret, o.ret):
                continue
            order.append(i)
            if search(done | bit, nxt):
                return True
            order.pop()
        dead.add(key)
        return False

    if search(0, initial):
        return Verdict(True, [ops[i] for i in order], explored)
    return Verdict(False, None, explored)


def replay(witness: list, initial: SequentialGraphModel | None = None) -> bool:
    """Re-run a witness order through the model and confirm every completed result."""
    model = initial or SequentialGraphModel()
    for o in witness:
        ret, model = model.apply(o.op, o.args)
        if o.complete and not results_match(o.op, ret, o.ret):
            return False
    return True

"""Quiescent graph snapshots and the two plain-text exchange formats.

Snapshot format, keys ascending::

    V 1
    V 2
    E 1 2

Partition format, one component per line, members ascending, lines ordered
by smallest member::

    C 7: 1 2 3
    C 4: 5
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class GraphSnapshot:
    vertices: frozenset = field(default_factory=frozenset)
    edges: frozenset = field(default_factory=frozenset)

    @classmethod
    def build(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> "GraphSnapshot":
        vs = frozenset(vertices)
        es = frozenset((u, v) for u, v in edges if u in vs and v in vs)
        return cls(vs, es)

    def successors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in sorted(self.vertices)}
        for u, v in sorted(self.edges):
            adj[u].append(v)
        return adj

    def predecessors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in sorted(self.vertices)}
        for u, v in sorted(self.edges):
            adj[v].append(u)
        return adj

    def to_text(self) -> str:
        lines = [f"V {v}" for v in sorted(self.vertices)]
        lines += [f"E {u} {v}" for u, v in sorted(self.edges)]
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_text(cls, text: str) -> "GraphSnapshot":
        vertices, edges = set(), set()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "V" and len(parts) == 2:
                    vertices.add(int(parts[1]))
                elif parts[0] == "E" and len(parts) == 3:
                    edges.add((int(parts[1]), int(parts[2])))
                else:
                    raise ValueError
            except ValueError:
                raise FormatError(f"line {lineno}: cannot parse {raw!r}") from None
        dangling = [e for e in edges if e[0] not in vertices or e[1] not in vertices]
        if dangling:
            raise FormatError(f"edges reference unknown vertices: {sorted(dangling)[:5]}")
        return cls(frozenset(vertices), frozenset(edges))


def canonical_partition(groups: Iterable[Iterable[int]]) -> frozenset:
    """Partition as a frozenset of frozensets; empty groups are dropped."""
    return frozenset(frozenset(g) for g in groups if g)


def partition_to_text(components: Iterable[tuple[int, Iterable[int]]]) -> str:
    rows = []
    for ccno, members in components:
        keys = sorted(members)
        if keys:
            rows.append((keys[0], ccno, keys))
    rows.sort()
    return "".join(f"C {ccno}: {' '.join(map(str, keys))}\n" for _, ccno, keys in rows)


def partition_from_text(text: str) -> list[tuple[int, list[int]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        parts = head.split()
        if not sep or len(parts) != 2 or parts[0] != "C":
            raise FormatError(f"line {lineno}: cannot parse {raw!r}")
        try:
            out.append((int(parts[1]), [int(k) for k in rest.split()]))
        except ValueError:
            raise FormatError(f"line {lineno}: cannot parse {raw!r}") from None
    return out

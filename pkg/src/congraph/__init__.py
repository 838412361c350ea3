"""Concurrent directed graphs built from lazy lists, with SCC maintenance,
an acyclic variant, offline oracles and a linearizability checker."""

from .acyclic import AcyclicGraph
from .graph import CoarseGraph, ConcurrentGraph, QuiescenceError, SequentialGraph
from .lincheck import CapacityError, Event, History, Recorder, RecorderError, check_linearizable
from .oracle import (CodecError, SequentialGraphModel, fwbw_scc, is_acyclic, kosaraju_scc, offline_scc,
                     path_exists, tarjan_scc)
from .ordered_set import MAX_SENTINEL, MIN_SENTINEL, CheckedCell, DomainError, LazyList, ListCell
from .scc import SccGraph
from .snapshot import GraphSnapshot

__all__ = [
    "AcyclicGraph", "CapacityError", "CheckedCell", "CoarseGraph", "CodecError", "ConcurrentGraph",
    "DomainError", "Event", "GraphSnapshot", "History", "LazyList", "ListCell", "MAX_SENTINEL",
    "MIN_SENTINEL", "QuiescenceError", "Recorder", "RecorderError", "SccGraph", "SequentialGraph",
    "SequentialGraphModel", "check_linearizable", "fwbw_scc", "is_acyclic", "kosaraju_scc",
    "offline_scc", "path_exists", "tarjan_scc",
]

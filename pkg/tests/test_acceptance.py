"""Acceptance criteria at full size, one suite run per criterion.

Each test prints a single PASS/FAIL (or WARN for the hardware-dependent
throughput check) line, which is also repeated in the terminal summary.
"""

import functools

import pytest

from congraph.acceptance import run_suite

from conftest import CRITERIA_LINES


@functools.lru_cache(maxsize=None)
def suite(name):
    return run_suite(name, seed=1)


def report(number, title, ok, rep, status=None):
    status = status or ("PASS" if ok else "FAIL")
    line = f"criterion {number:>2} [{status}] {title}: {rep.detail} ({rep.elapsed:.1f}s)"
    CRITERIA_LINES.append(line)
    print(line)
    return ok


def test_criterion_01_linearizability():
    rep = suite("lin-histories")
    m = rep.metrics
    ok = m["total"] == 1000 and m["accepted"] == 1000 and rep.elapsed < 300
    assert report(1, "linearizable histories", ok, rep)


def test_criterion_02_sequential_conformance():
    rep = suite("seq-conformance")
    m = rep.metrics
    ok = m["sequences"] == 100_000 and m["mismatches"] == 0 and rep.elapsed < 60
    assert report(2, "sequential conformance", ok, rep)


def test_criterion_03_scc_quiescent_oracle():
    rep = suite("scc-oracle")
    m = rep.metrics
    ok = m["trials"] == 200 and m["mismatches"] == 0 and rep.elapsed < 600
    assert report(3, "SCC quiescent oracle", ok, rep)


def test_criterion_04_scc_single_edge_exactness():
    rep = suite("scc-sequential-exhaustive")
    # 20 graphs of 30 vertices, each with all 870 ordered pairs toggled
    ok = rep.metrics["mismatches"] == 0 and rep.metrics["steps"] >= 20 * 30 * 29 and rep.elapsed < 300
    assert report(4, "SCC single-edge exactness", ok, rep)


def test_criterion_05_offline_agreement():
    rep = suite("offline-agreement")
    ok = rep.metrics["graphs"] == 200 and rep.metrics["mismatches"] == 0 and rep.elapsed < 60
    assert report(5, "offline algorithm agreement", ok, rep)


def test_criterion_06_acyclicity():
    rep = suite("acyclicity")
    m = rep.metrics
    ok = m["trials"] == 50 and m["cyclic"] == 0 and m["unconfirmed"] == 0 and m["rejections"] > 0 \
        and rep.elapsed < 600
    assert report(6, "acyclicity", ok, rep)


def test_criterion_07_deadlock_freedom():
    rep = suite("deadlock-stress")
    m = rep.metrics
    ok = m["reps"] == 10 and m["hung"] == 0 and m["violations"] == 0 and m["acquisitions"] > 0
    assert report(7, "deadlock freedom and lock order", ok, rep)


def test_criterion_08_waitfree_read_bound():
    rep = suite("waitfree-bound")
    visits = {int(n): v for n, v in rep.metrics["visits"].items()}
    ok = set(visits) == {0, 1, 10, 1000, 100_000} and all(v <= n + 2 for n, v in visits.items())
    assert report(8, "wait-free read bound", ok, rep)


def test_criterion_09_throughput_soft():
    rep = suite("throughput")
    m = rep.metrics
    if m["hardware_threads"] < 8:
        report(9, "throughput (soft)", True, rep, status="WARN")
        pytest.skip(f"needs >= 8 hardware threads, have {m['hardware_threads']}")
    ok = m["ratio"] >= 1.5 and m["fine_ops"] >= m["fine_single"]
    report(9, "throughput (soft)", ok, rep, status=None if ok else "WARN")
    if not ok:
        pytest.xfail("throughput below the soft threshold")


def test_criterion_10_counter_consistency():
    rep = suite("scc-oracle")
    m = rep.metrics
    ok = m["trials"] == 200 and m["counter_errors"] == 0 and m["reissued"] == 0
    assert report(10, "component counter consistency", ok, rep)

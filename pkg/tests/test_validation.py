#!/usr/bin/env python3
"""Test the acceptance battery at a reduced level.

Run: python3 tests/test_validation.py
"""

import json
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

import validation
from validation import (
    CriterionResult,
    SuiteLevel,
    SuiteReport,
    check_engineering,
    check_gw,
    check_inequalities,
    check_monotone_coupling,
    check_rate_trend,
    check_rgg,
    check_supermultiplicativity,
    validate_suite,
)

TINY = SuiteLevel("tiny", 200, 200, 100, 4, 400, 50, 50, 5, 2)


def test_cheap_criteria():
    print("=" * 60)
    print("TEST: Deterministic criteria at a tiny level")
    print("=" * 60)

    for check in (check_rate_trend, check_monotone_coupling, check_supermultiplicativity, check_gw):
        result = check(TINY)
        assert result.ok, f"{result.name}: {result.detail} {result.measured}"
        print(f"  ✓ {result.name}")

    trend = check_rate_trend(TINY).measured
    assert trend["n"] == [4, 6, 8, 10, 12]
    incs = trend["increments"]
    assert all(a > b for a, b in zip(incs, incs[1:]))
    assert incs[-1] < 0.15
    print("  ✓ relative increments of log E / n shrink along P4, P6, .., P12")

    limits = check_gw(TINY).measured["limits"]
    assert limits["n"] == 6 and limits["samples"] == TINY.gw_trees
    assert limits["volume_ratio_limit"] == pytest.approx(0.2)
    print("  ✓ generation limits reported with the tree checks")

    rgg = check_rgg(TINY)
    assert rgg.ok, rgg.measured
    assert 0.0 <= rgg.measured["spanning_frequency"] <= 1.0
    assert "small_others_frequency" in rgg.measured
    print("  ✓ geometric graph component report alongside the MST degrees")


def test_inequalities_cover_zoo():
    print("=" * 60)
    print("TEST: Uniform and tail bounds on every exact instance")
    print("=" * 60)

    result = check_inequalities(TINY)
    assert result.ok, result.detail
    tails = [k for k in result.measured if k.startswith("tail_")]
    assert len(tails) == 12
    assert "tail_S4_lambda0.5" in tails and "tail_C4_lambda2.0" in tails
    assert all(len(result.measured[k]["rows"]) == 10 for k in tails)
    print(f"  ✓ tail bound checked on {len(tails)} graph and rate pairs")


def test_engineering():
    print("=" * 60)
    print("TEST: Worker and resume invariance inside the battery")
    print("=" * 60)

    result = check_engineering(TINY)
    assert result.ok, result.measured
    assert result.measured["resume_recomputed"] == 0
    print("  ✓ identical outputs, resume recomputes nothing")


def test_suite_report():
    print("=" * 60)
    print("TEST: Suite report and raising criteria")
    print("=" * 60)

    def boom(level):
        raise RuntimeError("sampler exploded")

    def fine(level):
        return CriterionResult(True, "fine", {"x": 1})

    saved = validation.CRITERIA
    validation.CRITERIA = [fine, boom]
    try:
        report = validate_suite("quick")
    finally:
        validation.CRITERIA = saved
    assert not report.ok
    assert [c.ok for c in report.criteria] == [True, False]
    assert report.criteria[1].name == "boom"
    assert "sampler exploded" in report.criteria[1].detail
    print("  ✓ an exception becomes a failed criterion")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "report.json")
        SuiteReport("quick", [CriterionResult(True, "fine", {"x": 1.5})]).write(path)
        with open(path) as f:
            data = json.load(f)
    assert data["ok"] and data["criteria"][0]["measured"]["x"] == 1.5
    print("  ✓ JSON report written")

    with pytest.raises(ValueError):
        validate_suite("medium")


def main():
    tests = [test_cheap_criteria, test_inequalities_cover_zoo, test_engineering, test_suite_report]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError as e:
            failed += 1
            print(f"  ❌ {t.__name__} failed: {e}")
        print()
    print("=" * 60)
    print(f"{len(tests) - failed}/{len(tests)} passed")
    print("=" * 60)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance gate: the eleven verification criteria at full sampling level.

Each test runs one criterion from the shared suite result and prints its
pass/fail line; the assertion message carries the measured values so a
failure is diagnosable from the test log alone.
"""

import pytest

from coamoeba_atlas import checks
from coamoeba_atlas.plane import DEFAULT_CONFIG


@pytest.fixture(scope="module")
def suite():
    results = checks.run_all(DEFAULT_CONFIG, level="full")
    return {r.criterion: r for r in results}


def _check(suite, criterion):
    r = suite[criterion]
    print(r.line())
    assert r.passed, f"{r.name}: measured={r.measured} tol={r.tolerances}"
    return r


def test_criterion_01_criticality_oracle(suite):
    r = _check(suite, 1)
    assert r.measured["points"] == 10_000
    assert r.measured["sign_mismatches"] == 0
    assert r.measured["max_zero_gap"] < 1e-8
    assert r.measured["within_runtime_bound"]


def test_criterion_02_birational_inversion(suite):
    r = _check(suite, 2)
    assert r.measured["points"] == 1000
    assert r.measured["max_roundtrip"] < 1e-9
    assert r.measured["max_route_disagreement"] < 1e-8


def test_criterion_03_concurrency(suite):
    r = _check(suite, 3)
    assert r.measured["points"] == 1000
    assert r.measured["not_concurrent_events"] == 0
    assert r.measured["max_min_singular_value"] < 1e-6


def test_criterion_04_pencil(suite):
    r = _check(suite, 4)
    assert r.measured["span_ratio"] < 1e-8
    assert max(r.measured["base_point_gaps"]) < 1e-6


def test_criterion_05_sections_coincidences(suite):
    r = _check(suite, 5)
    assert r.measured["min_distinct_marked"] == 5
    assert r.measured["loci"] == 10
    assert r.measured["all_single_closed"]
    assert r.measured["triple_intersections"] == 0


def test_criterion_06_covering_monodromy(suite):
    r = _check(suite, 6)
    assert r.measured["generic_arc_counts"] == {"5": 1000}
    assert r.measured["transitive"]
    assert r.measured["boundary_circles_closed"] == 10


def test_criterion_07_euler_characteristics(suite):
    r = _check(suite, 7)
    assert r.measured["euler"] == 1
    assert r.measured["chi_base"] == -3
    assert r.measured["chi_cover"] == -15 == 1 - 16
    assert r.measured["antipodal_free"]


def test_criterion_08_interval_fibers(suite):
    r = _check(suite, 8)
    assert r.measured["multiple_arc_events"] == 0
    assert r.measured["not_attained_events"] == 0
    counts = r.measured["stratum_arc_counts"]
    assert set(counts["generic"]) == {"5"}
    assert set(counts["on_locus"]) == {"4"}
    assert set(counts["at_crossing"]) == {"3"}


def test_criterion_09_sixteen_fold(suite):
    r = _check(suite, 9)
    assert r.measured["values"] == 1000
    assert r.measured["non_unique_lift_events"] == 0


def test_criterion_10_gradient_floor(suite):
    r = _check(suite, 10)
    assert r.measured["points"] == 1000
    assert r.measured["min_rescaled_gradient"] > 1e-4


def test_criterion_11_determinism(suite):
    r = _check(suite, 11)
    assert r.measured["report_bytes_stable"]
    assert r.measured["figure_bytes_stable"]
    assert r.measured["figure_kinds"] == 5

"""Concurrency points, the homothety gauge, the pencil, and point d."""

import numpy as np
import pytest

from coamoeba_atlas.plane import DEFAULT_CONFIG, sample_critical_points
from coamoeba_atlas.fibers import RolledValue
from coamoeba_atlas.critical import (
    AFFINE_PAIRS,
    _affine_value_raw,
    coincidence_defect,
    concurrency_lines_point,
    conic_for_l,
    d_circles_check,
    exceptional_value,
    pencil_model,
    point_d_direct,
)
from coamoeba_atlas.projective import (RP1Dir, circle_center_radius,
                                        circumcircle)

CFG = DEFAULT_CONFIG

# fourth base point for the default (a, k); circumcircle route agrees below
D_FROZEN = 0.2236515367392707 + 0.7811113372684977j


def test_point_d_frozen_value():
    assert abs(point_d_direct(CFG) - D_FROZEN) < 1e-9


def test_point_d_on_three_circumcircles():
    """Independent construction: d is the second common point of the
    circumcircles of (0, 1, k), (1, a, (k-a)/(k-1)) and (0, a, a/k)."""
    rep = d_circles_check(CFG)
    assert max(rep["residuals"]) < 1e-10
    assert rep["common_point_candidates"] >= 1
    # direct evaluation, bypassing d_circles_check's own bookkeeping
    k, a = CFG.k, CFG.a
    for triple in [(0.0, 1.0, k), (1.0, a, (k - a) / (k - 1.0)),
                   (0.0, a, a / k)]:
        assert abs(circumcircle(*triple).eval_affine(point_d_direct(CFG))) < 1e-10


def test_affine_pairs_inventory():
    assert len(AFFINE_PAIRS) == 6
    assert ("z1", "inf") in AFFINE_PAIRS
    assert ("z3", "z4") in AFFINE_PAIRS


def test_concurrency_point_inverts_value():
    """p -> value -> concurrency point is the identity off the base points."""
    rng = np.random.default_rng(51)
    base = np.array([0.0, 1.0, CFG.a, point_d_direct(CFG)])
    n = 0
    while n < 120:
        p = complex(*rng.uniform(-4.0, 4.0, size=2))
        if np.min(np.abs(p - base)) < 1e-2:
            continue
        c = _affine_value_raw(p, CFG)
        q = concurrency_lines_point(c, CFG, tol=1e-6)
        assert abs(q.affine - p) < 1e-6
        n += 1


def test_concurrency_on_sampled_critical_values():
    for pt in sample_critical_points(60, CFG, seed=52):
        c = RolledValue.from_point(pt, CFG)
        q = concurrency_lines_point(c, CFG, tol=1e-6)
        # the recovered point reproduces the value
        assert _affine_value_raw(q.affine, CFG).dist(c) < 1e-6


def test_gauge_vanishing_at_k():
    """Closed form: at p = k the z4/inf weight vanishes identically and the
    other two weights coincide, so p = k is a crossing of two loci."""
    k = CFG.k
    sa = coincidence_defect(("z4", "inf"), np.array([k]), CFG)[0]
    s01 = coincidence_defect(("z1", "z3"), np.array([k]), CFG)[0]
    assert abs(sa) < 1e-12
    assert abs(s01) < 1e-12


def test_exceptional_value_is_affine_limit():
    """exceptional_value(q, psi) is the radial limit of the affine chart."""
    for q in (0.0, 1.0, CFG.a):
        for psi in (0.3, 1.7, 2.9, 4.4):
            lim = exceptional_value(q, psi, CFG)
            v1 = _affine_value_raw(q + 1e-4 * np.exp(1j * psi), CFG)
            v2 = _affine_value_raw(q + 1e-6 * np.exp(1j * psi), CFG)
            assert v2.dist(lim) < 1e-4
            assert v2.dist(lim) < 0.5 * v1.dist(lim) + 1e-9


def test_pencil_model_two_dimensional_span():
    pm = pencil_model(CFG)
    assert pm.span_ratio < 1e-12
    assert pm.max_fit_residual < 1e-8
    assert pm.cross_ratio_dev < 1e-10
    affine = sorted(
        (b.affine for b in pm.base_points if not b.is_infinite()),
        key=lambda z: (z.real, z.imag),
    )
    assert len(affine) == 4
    targets = sorted([0.0 + 0.0j, 1.0 + 0.0j, CFG.a, point_d_direct(CFG)],
                     key=lambda z: (z.real, z.imag))
    for got, want in zip(affine, targets):
        assert abs(got - want) < 1e-6


def test_conic_for_l_contains_base_points():
    rng = np.random.default_rng(53)
    d = point_d_direct(CFG)
    for _ in range(6):
        t = rng.uniform(0.0, np.pi)
        conic, resid = conic_for_l(RP1Dir.from_pair(np.cos(t), np.sin(t)), CFG)
        assert resid < 1e-8
        for z in (0.0, 1.0, CFG.a, d):
            assert abs(conic.eval_affine(z)) < 1e-8


def test_coincidence_defect_vanishes_on_circle_loci():
    """The z1/inf coincidence circle is the circumcircle of (1, a, d)."""
    d = point_d_direct(CFG)
    C = circumcircle(1.0, CFG.a, d)
    center, radius = circle_center_radius(C)
    ts = np.linspace(0.0, 2 * np.pi, 48, endpoint=False)
    pts = center + radius * np.exp(1j * ts)
    vals = coincidence_defect(("z1", "inf"), pts, CFG)
    assert float(np.max(np.abs(vals))) < 1e-10


def test_coincidence_defect_unknown_pair():
    with pytest.raises(ValueError):
        coincidence_defect(("z2", "nope"), np.array([0.5 + 0.5j]), CFG)

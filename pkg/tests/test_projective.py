"""Projective primitives: RP^1 directions, RP^2 points, lines, conics."""

import numpy as np
import pytest
from hypothesis import given, assume, settings, strategies as st

from coamoeba_atlas.projective import (
    CollinearPoints,
    Conic,
    RP1Dir,
    RP2Point,
    ZeroInput,
    affine_line_through_direction,
    circle_center_radius,
    circumcircle,
    fit_conic,
    intersect_conics,
    line_through,
    two_arg,
)

finite = st.floats(min_value=-50.0, max_value=50.0,
                   allow_nan=False, allow_infinity=False)


@given(finite, finite)
@settings(max_examples=200, deadline=None)
def test_two_arg_sign_and_scale_invariance(re, im):
    assume(np.hypot(re, im) > 1e-6)
    z = complex(re, im)
    d = two_arg(z)
    assert d.chordal(two_arg(-z)) < 1e-12
    for t in (0.5, -3.0, 17.0):
        assert d.chordal(two_arg(t * z)) < 1e-12


def test_two_arg_zero_raises():
    with pytest.raises(ZeroInput):
        two_arg(0.0)
    with pytest.raises(ZeroInput):
        two_arg(1e-16 + 1e-16j)


def test_rp1dir_theta_and_rep():
    rng = np.random.default_rng(11)
    for _ in range(300):
        t = rng.uniform(0.0, np.pi)
        d = RP1Dir.from_pair(np.cos(t), np.sin(t))
        assert 0.0 <= d.theta < np.pi
        assert abs(d.theta - t) < 1e-12 or abs(d.theta - t + np.pi) < 1e-12
        assert abs(abs(d.rep) - 1.0) < 1e-12


def test_chordal_metric_basics():
    rng = np.random.default_rng(12)
    for _ in range(200):
        t1, t2 = rng.uniform(0.0, np.pi, size=2)
        d1 = RP1Dir.from_pair(np.cos(t1), np.sin(t1))
        d2 = RP1Dir.from_pair(np.cos(t2), np.sin(t2))
        c12 = d1.chordal(d2)
        assert abs(c12 - d2.chordal(d1)) < 1e-14
        assert -1e-14 <= c12 <= 1.0 + 1e-14
        assert abs(c12 - abs(np.sin(t1 - t2))) < 1e-10
    d = RP1Dir.from_pair(0.3, -1.2)
    assert d.chordal(d) == 0.0


def test_rp2point_affine_roundtrip():
    rng = np.random.default_rng(13)
    for _ in range(100):
        z = complex(*rng.uniform(-5, 5, size=2))
        p = RP2Point.from_affine(z)
        assert not p.is_infinite()
        assert abs(p.affine - z) < 1e-12
    q = RP2Point.at_infinity(RP1Dir.from_pair(1.0, 2.0))
    assert q.is_infinite()
    with pytest.raises(ZeroInput):
        q.affine


def test_rp2point_projective_identification():
    p1 = RP2Point.from_triple(2.0, -4.0, 6.0)
    p2 = RP2Point.from_triple(-1.0, 2.0, -3.0)
    assert p1.dist(p2) < 1e-14


def test_line_through_incidence():
    rng = np.random.default_rng(14)
    for _ in range(150):
        z1 = complex(*rng.uniform(-4, 4, size=2))
        z2 = complex(*rng.uniform(-4, 4, size=2))
        if abs(z1 - z2) < 1e-3:
            continue
        p1, p2 = RP2Point.from_affine(z1), RP2Point.from_affine(z2)
        L = line_through(p1, p2)
        assert abs(L.vec @ p1.vec) < 1e-12
        assert abs(L.vec @ p2.vec) < 1e-12


def test_affine_line_through_direction_incidence():
    rng = np.random.default_rng(15)
    for _ in range(100):
        z0 = complex(*rng.uniform(-3, 3, size=2))
        t = rng.uniform(0, np.pi)
        d = RP1Dir.from_pair(np.cos(t), np.sin(t))
        L = affine_line_through_direction(z0, d)
        for s in (-2.0, 0.0, 0.7, 5.0):
            z = z0 + s * d.rep
            assert abs(L.vec @ RP2Point.from_affine(z).vec) < 1e-10


def test_circumcircle_known_value():
    # circle through 0, 1 and the default k = 0.45 + 0.85j
    C = circumcircle(0.0, 1.0, 0.45 + 0.85j)
    center, radius = circle_center_radius(C)
    assert abs(center - (0.5 + 0.27941176470588225j)) < 1e-12
    assert abs(radius - 0.5727747674750131) < 1e-12
    for z in (0.0, 1.0, 0.45 + 0.85j):
        assert abs(C.eval_affine(z)) < 1e-12


def test_circumcircle_collinear_raises():
    with pytest.raises(CollinearPoints):
        circumcircle(0.0, 1.0, 2.5)


def test_fit_conic_recovers_circle():
    center, radius = -0.7 + 0.4j, 1.9
    ts = np.linspace(0.0, 2 * np.pi, 40, endpoint=False)
    pts = [RP2Point.from_affine(center + radius * np.exp(1j * t)) for t in ts]
    conic, resid = fit_conic(pts)
    assert resid < 1e-12
    c2, r2 = circle_center_radius(conic)
    assert abs(c2 - center) < 1e-10
    assert abs(r2 - radius) < 1e-10


def test_intersect_conics_two_unit_circles():
    # |z| = 1 and |z - 1| = 1 meet at 1/2 +- i sqrt(3)/2
    C1 = Conic.from_coeffs([1.0, 0.0, 1.0, 0.0, 0.0, -1.0])
    C2 = Conic.from_coeffs([1.0, 0.0, 1.0, -2.0, 0.0, 0.0])
    pts = intersect_conics(C1, C2)
    got = [p.affine for p in pts if not p.is_infinite()]
    expected = [0.5 - 0.8660254037844386j, 0.5 + 0.8660254037844386j]
    assert len(got) >= 2
    hits = [min(abs(g - e) for g in got) for e in expected]
    assert max(hits) < 1e-9


def test_intersect_conics_four_points():
    # circle and axis-aligned ellipse with four real intersections
    C1 = Conic.from_coeffs([1.0, 0.0, 1.0, 0.0, 0.0, -1.0])
    C2 = Conic.from_coeffs([1.0, 0.0, 4.0, 0.0, 0.0, -2.0])
    pts = [p for p in intersect_conics(C1, C2) if not p.is_infinite()]
    assert len(pts) == 4
    for p in pts:
        z = p.affine
        assert abs(C1.eval_affine(z)) < 1e-9
        assert abs(C2.eval_affine(z)) < 1e-9
        # closed form: x^2 = 2/3, y^2 = 1/3
        assert abs(z.real**2 - 2.0 / 3.0) < 1e-9
        assert abs(z.imag**2 - 1.0 / 3.0) < 1e-9

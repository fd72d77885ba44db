"""Implicit-curve tracing on synthetic level sets with known geometry."""

import numpy as np

from coamoeba_atlas.tracing import (
    exits_antipodally,
    newton_refine_2d,
    trace_zero_set,
)


def _circle_fn(center, radius):
    def f(p):
        return (p.real - center.real) ** 2 + (p.imag - center.imag) ** 2 \
            - radius * radius
    return f


def test_trace_circle_closed_and_accurate():
    f = _circle_fn(0.2 - 0.1j, 1.5)
    curves = trace_zero_set(f, center=0.0, radius=3.0, grid=301)
    assert len(curves) == 1
    c = curves[0]
    assert c.closed
    assert len(c) > 100
    r = np.abs(c.points - (0.2 - 0.1j))
    assert float(np.max(np.abs(r - 1.5))) < 1e-9


def test_trace_line_exits_antipodally():
    f = lambda p: p.imag - 0.3 * p.real  # noqa: E731
    curves = trace_zero_set(f, center=0.0, radius=2.0, grid=201)
    assert len(curves) == 1
    c = curves[0]
    assert not c.closed
    assert exits_antipodally(c)
    # endpoints roughly opposite: their midpoint is near the window center
    mid = abs(c.points[0] + c.points[-1])
    assert mid < 0.2 * abs(c.points[0] - c.points[-1])


def test_trace_two_components():
    f1 = _circle_fn(-1.2 + 0.0j, 0.5)
    f2 = _circle_fn(1.2 + 0.0j, 0.5)
    f = lambda p: f1(p) * f2(p)  # noqa: E731
    curves = trace_zero_set(f, center=0.0, radius=2.5, grid=301)
    assert len(curves) == 2
    assert all(c.closed for c in curves)
    centers = sorted(np.mean(c.points).real for c in curves)
    assert abs(centers[0] + 1.2) < 1e-2
    assert abs(centers[1] - 1.2) < 1e-2


def test_traced_points_satisfy_equation():
    f = _circle_fn(0.0, 1.0)
    (c,) = trace_zero_set(f, center=0.0, radius=2.0, grid=201)
    vals = np.array([f(p) for p in c.points])
    assert float(np.max(np.abs(vals))) < 1e-10


def test_newton_refine_2d_converges():
    # circle of radius 1 and the line y = x meet at +-(1/sqrt(2), 1/sqrt(2))
    def f2(p):
        return (p.real**2 + p.imag**2 - 1.0, p.imag - p.real)

    seeds = np.array([0.6 + 0.8j, -0.9 - 0.5j])
    out = newton_refine_2d(f2, seeds)
    s = 1.0 / np.sqrt(2.0)
    assert abs(out[0] - (s + 1j * s)) < 1e-10
    assert abs(out[1] - (-s - 1j * s)) < 1e-10

"""The global model of the critical-value surface, parametrized by p.

Every critical value of the rolled-argument map arises from a point
p in RP^2: the three lines through 0, 1, a with directions l0, l1, la meet
at p, and the remaining direction l is carried by a weight triple
(s0 : s1 : sa) solving one complex linear relation.  This module provides
that weight gauge, the chart formulas for the value as a function of p
(affine chart, line at infinity, and first-order blow-up charts at the four
base points 0, 1, a, d), the level-set-traced conics C_l with their pencil
structure, and two independent routes to the fourth base point d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .projective import (
    RP1Dir, RP2Point, Conic, two_arg, canonicalize,
    affine_line_through_direction, concurrency_point, fit_conic,
    circumcircle,
)
from .plane import DEFAULT_CONFIG, PlaneConfig
from .fibers import RolledValue, classify_value, NotCritical
from .tracing import trace_zero_set


class NearBasePoint(ValueError):
    pass


class RankDeficient(ValueError):
    pass


class BasePointIndeterminate(ValueError):
    pass


class LimitInconsistent(RuntimeError):
    """First-order blow-up formula disagrees with the shrinking-radius limit."""


class NoSolution(RuntimeError):
    pass


class MultipleSolutions(RuntimeError):
    pass


class TraceFailed(RuntimeError):
    pass


class NotAPencil(RuntimeError):
    """Fitted conic coefficients failed to span a 2-dimensional space."""


def weight_row(p, cfg: PlaneConfig = DEFAULT_CONFIG):
    """The complex row (p(k-1), -k(p-1), p-a) of the weight relation."""
    p = np.asarray(p, dtype=complex)
    return np.stack([p * (cfg.k - 1.0), -cfg.k * (p - 1.0), p - cfg.a])


def gauge(p, cfg: PlaneConfig = DEFAULT_CONFIG):
    """Weight gauge (s0, s1, sa) as the cross product of Re/Im weight rows.

    Vectorized; each component is a real quadratic polynomial in
    (Re p, Im p), the triple satisfies the complex weight relation
    identically, and it vanishes (all three components) exactly at the
    fourth base point d.
    """
    r = weight_row(p, cfg)
    r0, r1, ra = r[0], r[1], r[2]
    s0 = np.imag(np.conj(r1) * ra)
    s1 = np.imag(np.conj(ra) * r0)
    sa = np.imag(np.conj(r0) * r1)
    return np.stack([s0, s1, sa])


def gauge_jacobian(p, cfg: PlaneConfig = DEFAULT_CONFIG):
    """d(s0, s1, sa)/d(Re p, Im p), analytically (3x2 per point)."""
    p = complex(p)
    k, a = cfg.k, cfg.a
    r = [p * (k - 1.0), -k * (p - 1.0), p - a]
    dr = [[(k - 1.0), 1j * (k - 1.0)], [-k, -1j * k], [1.0, 1j]]
    out = np.zeros((3, 2))
    combos = [(1, 2), (2, 0), (0, 1)]  # s_i = Im(conj(r_u) * r_v)
    for i, (u, v) in enumerate(combos):
        for j in range(2):
            out[i, j] = np.imag(np.conj(dr[u][j]) * r[v] + np.conj(r[u]) * dr[v][j])
    return out


def fiber_direction_field(p, cfg: PlaneConfig = DEFAULT_CONFIG):
    """The y-direction w(p) = s1*(p-1) - s0*p of the critical fiber.

    A complex-valued quadratic in (Re p, Im p); w vanishes exactly at the
    four base points 0, 1, a, d.
    """
    p = np.asarray(p, dtype=complex)
    s = gauge(p, cfg)
    return s[1] * (p - 1.0) - s[0] * p


# coincidence defects: the six pairs of sections that meet in the affine
# chart, as smooth polynomial level functions of p (zero exactly on the
# locus).  Sections are named by the coordinate that degenerates:
# z1 <-> x = 0, z3 <-> x+y = 1, z4 <-> x+k*y = a, inf <-> fiber infinity.
AFFINE_PAIRS = (
    ("z1", "inf"), ("z3", "inf"), ("z4", "inf"),
    ("z1", "z3"), ("z1", "z4"), ("z3", "z4"),
)
DIVISOR_PAIRS = {
    ("z1", "z2"): 0.0 + 0.0j,   # both x and y vanish over p = 0
    ("z2", "z3"): 1.0 + 0.0j,   # y = 0 and x + y = 1 over p = 1
    ("z2", "z4"): None,          # y = 0 and x + k*y = a over p = a (set below)
}
INFINITY_PAIR = ("z2", "inf")


def pair_key(n1: str, n2: str):
    return tuple(sorted((n1, n2)))


def coincidence_defect(pair, p, cfg: PlaneConfig = DEFAULT_CONFIG):
    """Level function of the marked-point coincidence locus of ``pair``.

    Vanishes exactly where the two named sections meet in the fiber over p:
    the fiber marked points sit at parameter -1/s0, 0 (for z2), -1/s1,
    -1/sa and infinity, so the affine coincidences are the circles
    {s_i = 0} and the lines {s_i = s_j}.  Vectorized over p.
    """
    pair = pair_key(*pair)
    s = gauge(p, cfg)
    comp = {"z1": s[0], "z3": s[1], "z4": s[2]}
    if pair == ("inf", "z1"):
        return comp["z1"]
    if pair == ("inf", "z3"):
        return comp["z3"]
    if pair == ("inf", "z4"):
        return comp["z4"]
    if pair == ("z1", "z3"):
        return comp["z1"] - comp["z3"]
    if pair == ("z1", "z4"):
        return comp["z1"] - comp["z4"]
    if pair == ("z3", "z4"):
        return comp["z3"] - comp["z4"]
    raise ValueError(f"pair {pair} has no affine coincidence defect")


@dataclass(frozen=True)
class HomothetyWeights:
    """Projective weight triple (s0 : s1 : sa), canonical-normalized."""

    s0: float
    s1: float
    sa: float

    @property
    def vec(self):
        return np.array([self.s0, self.s1, self.sa])


_D_CACHE: dict = {}


def homothety_weights(p, cfg: PlaneConfig = DEFAULT_CONFIG) -> HomothetyWeights:
    """The weight triple at an affine p off the base points.

    Raises NearBasePoint within the exclusion radius of 0, 1, a and
    RankDeficient near d (where the whole gauge vanishes and the weights
    become a one-parameter family).
    """
    p = complex(p)
    eps = cfg.tol.base_exclusion
    if min(abs(p), abs(p - 1.0), abs(p - cfg.a)) < eps:
        raise NearBasePoint("p within the exclusion radius of {0, 1, a}")
    d = point_d_direct(cfg)
    if abs(p - d) < eps:
        raise RankDeficient("p within the exclusion radius of d")
    s = gauge(p, cfg)
    v = canonicalize(s)
    return HomothetyWeights(float(v[0]), float(v[1]), float(v[2]))


def critical_value_from_p(p, cfg: PlaneConfig = DEFAULT_CONFIG) -> RolledValue:
    """The critical value over p (affine chart or line at infinity).

    Affine chart: l0, l1, la are the directions of p, p-1, p-a and l is the
    direction of the fiber field w(p).  Infinity chart (p an RP2Point with
    W = 0 or an RP1Dir direction e): l0 = l1 = la = [e] and
    l = two_arg(1 + delta*e) with delta = -Im((k-a) conj e)/Im k.
    """
    if isinstance(p, RP1Dir):
        return _infinity_value(p, cfg)
    if isinstance(p, RP2Point):
        if p.is_infinite():
            return _infinity_value(RP1Dir.from_pair(p.X, p.Y), cfg)
        p = p.affine
    p = complex(p)
    eps = cfg.tol.base_exclusion
    d = point_d_direct(cfg)
    if min(abs(p), abs(p - 1.0), abs(p - cfg.a), abs(p - d)) < eps:
        raise BasePointIndeterminate(
            "p within the exclusion radius of a base point; use a blow-up chart"
        )
    return _affine_value_raw(p, cfg)


def _affine_value_raw(p: complex, cfg: PlaneConfig) -> RolledValue:
    """The affine-chart formula with no exclusion-radius guard (seam tests)."""
    w = complex(fiber_direction_field(p, cfg))
    return RolledValue.from_dirs(
        two_arg(p), two_arg(w), two_arg(p - 1.0), two_arg(p - cfg.a)
    )


def _infinity_value(e: RP1Dir, cfg: PlaneConfig) -> RolledValue:
    ec = e.rep
    delta = -np.imag((cfg.k - cfg.a) * np.conj(ec)) / cfg.k.imag
    return RolledValue.from_dirs(
        e, two_arg(1.0 + delta * ec), e, e
    )


def _solve_real_pair(c1: complex, c2: complex, rhs: complex):
    """Solve t1*c1 + t2*c2 = rhs for real (t1, t2)."""
    A = np.array([[c1.real, c2.real], [c1.imag, c2.imag]])
    b = np.array([rhs.real, rhs.imag])
    return np.linalg.solve(A, b)


def exceptional_value(q, psi, cfg: PlaneConfig = DEFAULT_CONFIG,
                      check_limit: bool = True) -> RolledValue:
    """The critical value on the blow-up circle over q in {0, 1, a, d}.

    ``psi`` parametrizes the exceptional circle: for q in {0, 1, a} it is
    the approach direction u = e^{i psi}; for q = d it parametrizes the
    one-parameter family of weight triples in the gauge kernel.  The first
    three charts are guarded against the shrinking-radius limit of the
    affine chart (LimitInconsistent); all outputs classify critical.
    """
    k, a = cfg.k, cfg.a
    psi = float(psi)
    u = np.exp(1j * psi)
    qd = point_d_direct(cfg)
    if isinstance(q, str):
        q = {"0": 0.0, "1": 1.0, "a": a, "d": qd}[q]
    q = complex(q)
    if abs(q - qd) < 1e-9:
        val = _exceptional_at_d(psi, cfg)
    elif abs(q) < 1e-9:
        t1, ta = _solve_real_pair(k, -a, -u * (k - 1.0))
        val = RolledValue.from_dirs(
            two_arg(u), two_arg(-(t1 + u)), two_arg(1.0), two_arg(a)
        )
    elif abs(q - 1.0) < 1e-9:
        t0, ta = _solve_real_pair(k - 1.0, 1.0 - a, k * u)
        val = RolledValue.from_dirs(
            two_arg(1.0), two_arg(u - t0), two_arg(u), two_arg(1.0 - a)
        )
    elif abs(q - a) < 1e-9:
        t0, t1 = _solve_real_pair(a * (k - 1.0), -k * (a - 1.0), -u)
        val = RolledValue.from_dirs(
            two_arg(a), two_arg(t1 * (a - 1.0) - t0 * a),
            two_arg(a - 1.0), two_arg(u)
        )
    else:
        raise ValueError("q must be one of the base points 0, 1, a, d")
    if check_limit and abs(q - qd) >= 1e-9:
        v5 = _affine_value_raw(q + 1e-5 * u, cfg)
        v6 = _affine_value_raw(q + 1e-6 * u, cfg)
        d5 = val.dist(v5)
        d6 = val.dist(v6)
        if d6 > 1e-4 or d6 > d5 + 1e-9:
            raise LimitInconsistent(
                f"blow-up chart at {q}: limit disagreement {d6:.2e} at eps=1e-6"
            )
    return val


def _gauge_kernel_basis(cfg: PlaneConfig):
    """Orthonormal basis of the 2-dim kernel of the weight system at d."""
    d = point_d_direct(cfg)
    r = weight_row(d, cfg)
    M = np.stack([np.real(r), np.imag(r)])
    U, s, Vt = np.linalg.svd(M)
    if s[1] / s[0] > 1e-6:
        raise RankDeficient("weight system at d is not rank 1")
    return d, Vt[1], Vt[2]


def _exceptional_at_d(psi: float, cfg: PlaneConfig) -> RolledValue:
    d, v1, v2 = _gauge_kernel_basis(cfg)
    s = np.cos(psi) * v1 + np.sin(psi) * v2
    w = s[1] * (d - 1.0) - s[0] * d
    if abs(w) < 1e-12:
        raise LimitInconsistent("fiber direction degenerates on the d-divisor")
    return RolledValue.from_dirs(
        two_arg(d), two_arg(w), two_arg(d - 1.0), two_arg(d - cfg.a)
    )


def phi(c: RolledValue, cfg: PlaneConfig = DEFAULT_CONFIG, tol=1e-6) -> RP2Point:
    """The concurrency point of the lines through 0, 1, a with directions
    l0, l1, la.  Raises NotCritical on non-critical input and propagates
    NotConcurrent (which would falsify the concurrency property)."""
    cls = classify_value(c, cfg)
    if cls.kind != "critical":
        raise NotCritical(f"value classifies as {cls.kind}")
    return concurrency_lines_point(c, cfg, tol)


def concurrency_lines_point(c: RolledValue, cfg: PlaneConfig = DEFAULT_CONFIG,
                            tol=1e-6) -> RP2Point:
    """concurrency_point of closure(l0), closure(l1 + 1), closure(la + a),
    without the criticality precondition (used on sampled near-critical
    values)."""
    L0 = affine_line_through_direction(0.0, c.l0)
    L1 = affine_line_through_direction(1.0, c.l1)
    La = affine_line_through_direction(cfg.a, c.la)
    return concurrency_point(L0, L1, La, tol=tol)


def point_d_direct(cfg: PlaneConfig = DEFAULT_CONFIG) -> complex:
    """The fourth base point d: the unique p where the whole weight gauge
    vanishes (rank drop of the 2x3 weight system), off {0, 1, a}.

    Newton on (s1, sa) = (0, 0) from a 21x21 grid of starts; solutions are
    filtered to rank-1 points (s0 also vanishing) away from {0, 1, a}.
    Cached per (a, k).
    """
    key = (cfg.a, cfg.k)
    if key in _D_CACHE:
        return _D_CACHE[key]
    R = cfg.box_radius
    grid = np.linspace(-R, R, 21)
    seeds = [complex(x, y) for x in grid for y in grid]
    sols = []
    for p in seeds:
        p0 = p
        ok = False
        for _ in range(60):
            s = gauge(p0, cfg)
            f = np.array([s[1], s[2]])
            if np.max(np.abs(f)) < 1e-12 * max(1.0, abs(p0) ** 2):
                ok = True
                break
            J = gauge_jacobian(p0, cfg)[1:, :]
            try:
                step = np.linalg.solve(J, -f)
            except np.linalg.LinAlgError:
                break
            p0 = p0 + complex(step[0], step[1])
            if abs(p0) > 10.0 * R:
                break
        if not ok:
            continue
        if any(abs(p0 - q) < 1e-8 for q in sols):
            continue
        sols.append(p0)
    # filter: full gauge vanishes (rank 1) and p off {0, 1, a}
    survivors = []
    for p0 in sols:
        s = gauge(p0, cfg)
        if np.max(np.abs(s)) > 1e-8 * max(1.0, abs(p0) ** 2):
            continue
        if min(abs(p0), abs(p0 - 1.0), abs(p0 - cfg.a)) < 1e-6:
            continue
        survivors.append(p0)
    if not survivors:
        raise NoSolution("no rank-drop point found off {0, 1, a}")
    if len(survivors) > 1:
        raise MultipleSolutions(f"{len(survivors)} rank-drop candidates")
    d = complex(survivors[0])
    _D_CACHE[key] = d
    return d


def d_newton_condition(cfg: PlaneConfig = DEFAULT_CONFIG) -> float:
    """Condition number of the Newton Jacobian at d (simple-root witness)."""
    d = point_d_direct(cfg)
    J = gauge_jacobian(d, cfg)[1:, :]
    return float(np.linalg.cond(J))


def conic_for_l(l: RP1Dir, cfg: PlaneConfig = DEFAULT_CONFIG, grid: int = 801):
    """The conic C_l = closure of {p : direction of w(p) = l}, by tracing.

    Marches the signed chordal defect Im(w(p) conj e_l) over the sampling
    box (smooth across the direction wrap since w is polynomial), then fits
    a conic to the refined points.  Returns (conic, fit_residual).
    """
    el = l.rep

    def f(p):
        return np.imag(fiber_direction_field(p, cfg) * np.conj(el))

    curves = trace_zero_set(f, 0.0, cfg.box_radius, grid=grid)
    pts = [z for c in curves for z in c.points]
    if len(pts) < 24:
        raise TraceFailed(f"only {len(pts)} level-set points traced")
    sub = pts[:: max(1, len(pts) // 400)]
    conic, resid = fit_conic([RP2Point.from_affine(z) for z in sub])
    return conic, resid


@dataclass
class PencilModel:
    """Fitted conic family: coefficient span, basis, base points, residuals."""

    sample_dirs: list
    conics: list
    sing_vals: np.ndarray
    basis: tuple
    base_points: list
    cross_ratio_dev: float
    max_fit_residual: float

    @property
    def span_ratio(self) -> float:
        return float(self.sing_vals[2] / self.sing_vals[0])


def _cross_ratio(pairs):
    """Projective cross-ratio of four RP^1 elements given as (p, q) pairs."""
    def det(i, j):
        return pairs[i][0] * pairs[j][1] - pairs[j][0] * pairs[i][1]

    return (det(0, 2) * det(1, 3)) / (det(0, 3) * det(1, 2))


def pencil_model(cfg: PlaneConfig = DEFAULT_CONFIG, sample_count: int = 24,
                 grid: int = 801) -> PencilModel:
    """Fit C_l over ``sample_count`` directions and verify pencil structure.

    The stacked coefficient vectors must have 2-dimensional span
    (sigma3/sigma1 < 1e-8, else NotAPencil); the two top singular vectors
    give basis conics whose intersections are the base points; the map
    l -> span coordinates is checked projective-linear via cross-ratios.
    """
    from .projective import intersect_conics

    dirs = [RP1Dir.from_pair(np.cos(j * np.pi / sample_count),
                             np.sin(j * np.pi / sample_count))
            for j in range(sample_count)]
    conics = []
    max_resid = 0.0
    for l in dirs:
        conic, resid = conic_for_l(l, cfg, grid=grid)
        conics.append(conic)
        max_resid = max(max_resid, resid)
    M = np.stack([c.vec for c in conics])
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    if s[2] / s[0] >= 1e-8:
        raise NotAPencil(f"sigma3/sigma1 = {s[2] / s[0]:.2e}")
    Q0 = Conic.from_coeffs(Vt[0])
    Q1 = Conic.from_coeffs(Vt[1])
    base_pts = intersect_conics(Q0, Q1, tol=1e-6)
    # cross-ratio preservation on four samples
    idx = [0, sample_count // 4, sample_count // 2, (3 * sample_count) // 4]
    cr_l = _cross_ratio([(dirs[i].u, dirs[i].v) for i in idx])
    span_coords = []
    for i in idx:
        v = conics[i].vec
        span_coords.append((float(v @ Vt[0]), float(v @ Vt[1])))
    cr_s = _cross_ratio(span_coords)
    dev = abs(cr_l - cr_s) / (1.0 + abs(cr_l))
    return PencilModel(
        sample_dirs=dirs, conics=conics, sing_vals=s, basis=(Q0, Q1),
        base_points=base_pts, cross_ratio_dev=float(dev),
        max_fit_residual=max_resid,
    )


def d_circles_check(cfg: PlaneConfig = DEFAULT_CONFIG) -> dict:
    """Report-only: residuals of d against three reference circles.

    The circles are the circumcircles of (0, 1, k), (1, a, (k-a)/(k-1)) and
    (0, a, a/k); the report also clusters pairwise circle intersections to
    exhibit a common point near d.
    """
    k, a = cfg.k, cfg.a
    d = point_d_direct(cfg)
    triples = [
        (0.0, 1.0, k),
        (1.0, a, (k - a) / (k - 1.0)),
        (0.0, a, a / k),
    ]
    circles = [circumcircle(*t) for t in triples]
    residuals = [abs(c.eval_affine(d)) for c in circles]
    # pairwise intersections, clustered near d
    from .projective import intersect_conics

    candidates = []
    for i in range(3):
        for j in range(i + 1, 3):
            for pt in intersect_conics(circles[i], circles[j], tol=1e-6):
                if not pt.is_infinite():
                    candidates.append(pt.affine)
    near = [z for z in candidates if abs(z - d) < 1e-4]
    return {
        "d": d,
        "residuals": residuals,
        "common_point_candidates": len(near),
        "circles": circles,
    }

"""Everything about one rolled value c = (l0, l, l1, la).

A rolled value is a point of (RP^1)^4.  Its preimage on the plane is cut out
by four real-linear incidence conditions on (Re x, Im x, Re y, Im y); the
rank of that system classifies c as a regular value (one preimage), a
non-value, or a critical value whose preimage is an affine line of
configurations.  For critical values the compactified preimage line carries
five marked points (where one of the coordinates degenerates, or the
parameter runs to infinity) whose complementary arcs carry locally constant
argument labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .projective import RP1Dir, two_arg, DEFAULT_TOL
from .plane import TorusPoint, z_coords, DEFAULT_CONFIG

# Section names, by which coordinate degenerates there: z1 = x, z2 = y,
# z3 = x+y-1, z4 = x+k*y-a vanish at the first four; "inf" is the point at
# infinity of the fiber line (triangle degenerates at infinity).
SECTION_NAMES = ("z1", "z2", "z3", "z4", "inf")


class NotRegular(ValueError):
    pass


class NotCritical(ValueError):
    pass


class NotAttained(ValueError):
    pass


class MultipleArcs(RuntimeError):
    """More than one arc label matched an argument tuple (hard failure)."""


@dataclass(frozen=True)
class RolledValue:
    """A value (l0, l, l1, la) of the rolled-argument map, with unit reps.

    Stores one explicit unit-modulus complex representative per coordinate
    direction; all downstream projective outputs are invariant under sign
    flips of any representative.
    """

    e0: complex
    el: complex
    e1: complex
    ea: complex

    @property
    def reps(self):
        return np.array([self.e0, self.el, self.e1, self.ea])

    @property
    def dirs(self):
        return tuple(two_arg(e) for e in self.reps)

    @property
    def l0(self) -> RP1Dir:
        return two_arg(self.e0)

    @property
    def l(self) -> RP1Dir:
        return two_arg(self.el)

    @property
    def l1(self) -> RP1Dir:
        return two_arg(self.e1)

    @property
    def la(self) -> RP1Dir:
        return two_arg(self.ea)

    @staticmethod
    def from_reps(e0, e1, e2, e3) -> "RolledValue":
        es = [complex(e) for e in (e0, e1, e2, e3)]
        if any(abs(e) == 0.0 for e in es):
            raise ValueError("zero representative")
        es = [e / abs(e) for e in es]
        return RolledValue(*es)

    @staticmethod
    def from_dirs(l0: RP1Dir, l: RP1Dir, l1: RP1Dir, la: RP1Dir) -> "RolledValue":
        return RolledValue(l0.rep, l.rep, l1.rep, la.rep)

    @staticmethod
    def from_angles(angles) -> "RolledValue":
        """From four angles, reduced mod pi (canonical representatives)."""
        return RolledValue.from_dirs(
            *(two_arg(np.exp(1j * (t % np.pi))) for t in angles)
        )

    @staticmethod
    def from_point(pt: TorusPoint, cfg=DEFAULT_CONFIG) -> "RolledValue":
        z = z_coords(pt.x, pt.y, cfg)
        if np.min(np.abs(z)) <= cfg.tol.torus:
            raise ValueError("point off the torus")
        return RolledValue.from_dirs(*(two_arg(zj) for zj in z))

    def angles(self):
        """The four direction angles in [0, pi)."""
        return np.array([d.theta for d in self.dirs])

    def dist(self, other: "RolledValue") -> float:
        """Max chordal distance over the four RP^1 coordinates."""
        return max(a.chordal(b) for a, b in zip(self.dirs, other.dirs))


def fiber_system(c: RolledValue, cfg=DEFAULT_CONFIG):
    """The 4x4 real system A w = b on w = (Re x, Im x, Re y, Im y).

    Rows encode Im(x conj e0) = 0, Im(y conj el) = 0,
    Im((x+y-1) conj e1) = 0, Im((x+k*y-a) conj ea) = 0.  Every torus point
    with rolled value c satisfies the system to machine precision.
    """
    e0, el, e1, ea = c.reps

    def row_of(coef):
        # coefficients of Im((u1 + i u2) * coef) on (u1, u2)
        return np.array([coef.imag, coef.real])

    A = np.zeros((4, 4))
    b = np.zeros(4)
    A[0, :2] = row_of(np.conj(e0))
    A[1, 2:] = row_of(np.conj(el))
    A[2, :2] = row_of(np.conj(e1))
    A[2, 2:] = row_of(np.conj(e1))
    b[2] = -np.imag(e1)  # Im((x+y-1) conj e1) = 0  ->  moves the -1 term
    A[3, :2] = row_of(np.conj(ea))
    A[3, 2:] = row_of(cfg.k * np.conj(ea))
    b[3] = float(np.imag(cfg.a * np.conj(ea)))
    return A, b


@dataclass(frozen=True)
class FiberModel:
    """The affine solution line of a rank-3 fiber system, compactified.

    x(t), y(t) follow the base point w0 along the unit kernel direction u;
    each coordinate is a real affine function times its fixed unit direction:
    x(t) = (c0 + c1 t) e0 and so on.  ``coeffs`` maps section name ->
    (c0, c1); marked points are the projective roots [-c0 : c1] (the point
    at infinity is [1 : 0]).
    """

    value: RolledValue
    w0: np.ndarray
    u: np.ndarray
    coeffs: dict
    nongeneric: bool = False

    def point_at(self, t: float) -> TorusPoint:
        w = self.w0 + t * self.u
        return TorusPoint(complex(w[0], w[1]), complex(w[2], w[3]))

    def marked_points(self):
        """{section name: RP1Dir position on the fiber circle} (5 entries)."""
        out = {}
        for name in SECTION_NAMES[:4]:
            c0, c1 = self.coeffs[name]
            out[name] = RP1Dir.from_pair(-c0, c1)
        out["inf"] = RP1Dir.from_pair(1.0, 0.0)
        return out

    def coeff_sign_at(self, name: str, T: float, S: float) -> float:
        """Sign of the section-``name`` coefficient at fiber point [T : S].

        Homogenized as c0*S + c1*T; callers keep S >= 0 so the sign is the
        sign of the affine coefficient function at t = T/S.
        """
        if name == "inf":
            raise ValueError("the infinity slot has no coefficient function")
        c0, c1 = self.coeffs[name]
        return float(np.sign(c0 * S + c1 * T))


@dataclass(frozen=True)
class FiberClassification:
    kind: str  # "regular" | "non_value" | "critical"
    rank: int
    preimage: TorusPoint | None = None
    fiber: FiberModel | None = None
    nongeneric_stratum: bool = False


def _rank_from_singvals(s, rtol):
    return int(np.count_nonzero(s > rtol * s[0]))


def _is_real_stratum(c: RolledValue, tol=DEFAULT_TOL) -> bool:
    """True when l0, l, l1 are all the real-axis class."""
    return all(d.is_real_axis(tol) for d in (c.l0, c.l, c.l1))


def _build_fiber_model(c, cfg, A, b, U, s, Vt, prev_kernel=None):
    # min-norm particular solution from the rank-3 truncated SVD
    w0 = Vt[:3].T @ ((U[:, :3].T @ b) / s[:3])
    u = Vt[3]
    if prev_kernel is not None:
        if float(np.dot(u, prev_kernel)) < 0.0:
            u = -u
    else:
        # canonical sign for determinism
        for comp in u:
            if abs(comp) > 1e-13:
                if comp < 0.0:
                    u = -u
                break
    e0, el, e1, ea = c.reps
    x0 = complex(w0[0], w0[1])
    y0 = complex(w0[2], w0[3])
    ux = complex(u[0], u[1])
    uy = complex(u[2], u[3])
    pairs = {
        "z1": (x0, ux, e0),
        "z2": (y0, uy, el),
        "z3": (x0 + y0 - 1.0, ux + uy, e1),
        "z4": (x0 + cfg.k * y0 - cfg.a, ux + cfg.k * uy, ea),
    }
    coeffs = {}
    for name, (const, vel, e) in pairs.items():
        c0 = float(np.real(const * np.conj(e)))
        c1 = float(np.real(vel * np.conj(e)))
        if abs(c0) < 1e-12 and abs(c1) < 1e-12:
            raise NotCritical(f"section {name} degenerates along the whole fiber")
        coeffs[name] = (c0, c1)
    return FiberModel(
        value=c, w0=w0, u=u, coeffs=coeffs, nongeneric=_is_real_stratum(c)
    )


def classify_value(c: RolledValue, cfg=DEFAULT_CONFIG,
                   prev_kernel=None) -> FiberClassification:
    """Classify a rolled value as regular / non-value / critical.

    SVD rank of the 4x4 system decides: rank 4 gives a unique candidate
    preimage (regular iff it lies on the torus); rank 3 with consistent
    right-hand side gives a line of preimages (critical), inconsistent is a
    non-value.  The stratum with l0 = l = l1 = R is critical and flagged
    non-generic.
    """
    A, b = fiber_system(c, cfg)
    U, s, Vt = np.linalg.svd(A)
    rank = _rank_from_singvals(s, cfg.tol.rank_rtol)
    if rank == 4:
        w = Vt.T @ ((U.T @ b) / s)
        pt = TorusPoint(complex(w[0], w[1]), complex(w[2], w[3]))
        z = z_coords(pt.x, pt.y, cfg)
        if np.min(np.abs(z)) > cfg.tol.torus:
            return FiberClassification(kind="regular", rank=4, preimage=pt)
        return FiberClassification(kind="non_value", rank=4)
    # rank <= 3: consistency of b against the column space
    Ur = U[:, :rank]
    resid = float(np.linalg.norm(b - Ur @ (Ur.T @ b)))
    if resid >= cfg.tol.consistency * (1.0 + float(np.linalg.norm(b))):
        return FiberClassification(kind="non_value", rank=rank)
    if rank <= 2:
        # does not occur for validated parameters; flagged, no fiber model
        return FiberClassification(
            kind="critical", rank=rank, nongeneric_stratum=True
        )
    fiber = _build_fiber_model(c, cfg, A, b, U, s, Vt, prev_kernel=prev_kernel)
    return FiberClassification(
        kind="critical", rank=3, fiber=fiber,
        nongeneric_stratum=fiber.nongeneric,
    )


def invert_regular(c: RolledValue, cfg=DEFAULT_CONFIG) -> TorusPoint:
    """The unique preimage of a regular value (4x4 linear solve)."""
    cls = classify_value(c, cfg)
    if cls.kind != "regular":
        raise NotRegular(f"value classifies as {cls.kind}")
    return cls.preimage


@dataclass(frozen=True)
class LambdaLocus:
    """Locus of z = x + k*y over the line family of the inversion construction.

    kind is one of "empty", "point", "line"; a point locus stores the point,
    a line locus an anchor and a direction.  ``degenerate`` marks the
    all-real-directions case, where the construction collapses instead of
    producing a transverse line family.
    """

    kind: str
    point: complex | None = None
    anchor: complex | None = None
    direction: complex | None = None

    degenerate: bool = False

    def contains(self, z: complex, tol=1e-8) -> bool:
        if self.kind == "empty":
            return False
        if self.kind == "point":
            return abs(z - self.point) <= tol * (1.0 + abs(self.point))
        d = self.direction / abs(self.direction)
        return abs(np.imag((z - self.anchor) * np.conj(d))) <= tol * (
            1.0 + abs(z - self.anchor)
        )


def _cross(u: complex, v: complex) -> float:
    return float(np.imag(np.conj(u) * v))


def lambda_locus(l0: RP1Dir, l: RP1Dir, l1: RP1Dir, cfg=DEFAULT_CONFIG,
                 tol=1e-8) -> LambdaLocus:
    """Case analysis of the inversion construction's z-locus.

    For lines L parallel to l, set x(L) = L intersect l0 and
    x(L) + y(L) = L intersect (l1 + 1); the locus is swept by
    z(L) = x(L) + k y(L).  Generic directions give a line; l0 = l = l1
    off the real axis gives the empty locus; when the two base lines meet at
    a point p with vanishing sweep velocity the locus degenerates to {p}.
    """
    e0, el, e1 = l0.rep, l.rep, l1.rep
    k = cfg.k
    eq01 = l0.chordal(l1) <= tol
    eq0l = l0.chordal(l) <= tol
    eq1l = l1.chordal(l) <= tol
    if eq01 and eq0l:
        if l0.is_real_axis(tol):
            # fully real: the construction collapses onto the real axis
            return LambdaLocus(kind="line", anchor=0.0, direction=1.0,
                               degenerate=True)
        return LambdaLocus(kind="empty")
    if eq01:
        if l0.is_real_axis(tol):
            # both base lines are the real axis; x = x + y there, so y = 0
            # and z = x sweeps the real axis
            return LambdaLocus(kind="line", anchor=0.0, direction=1.0,
                               degenerate=True)
        # parallel distinct base lines: z moves parallel to l0
        zdot = (1.0 - k) * e0 / _cross(el, e0) + k * e1 / _cross(el, e1)
        z0 = _z_of_offset(0.0, e0, el, e1, k)
        return LambdaLocus(kind="line", anchor=z0, direction=zdot)
    if eq0l:
        # L sweeps onto l0 itself: x free along l0, the sum point is pinned
        u = _line_intersect(0.0, e0, 1.0, e1)
        return LambdaLocus(kind="line", anchor=k * u, direction=(1.0 - k) * e0)
    if eq1l:
        # the sum point is free along l1 + 1, x is pinned
        x = _line_intersect(0.0, e0, 1.0, e1)
        return LambdaLocus(kind="line", anchor=(1.0 - k) * x, direction=k * e1)
    # generic: z is affine-linear in the offset of L along the normal of l
    z0 = _z_of_offset(0.0, e0, el, e1, k)
    z1 = _z_of_offset(1.0, e0, el, e1, k)
    zdot = z1 - z0
    scale = abs((1.0 - k) * e0 / _cross(el, e0)) + abs(k * e1 / _cross(el, e1))
    if abs(zdot) <= tol * scale:
        p = _line_intersect(0.0, e0, 1.0, e1)
        return LambdaLocus(kind="point", point=p)
    return LambdaLocus(kind="line", anchor=z0, direction=zdot)


def _line_intersect(p1: complex, d1: complex, p2: complex, d2: complex) -> complex:
    den = _cross(d1, d2)
    if abs(den) < 1e-14:
        raise ZeroDivisionError("parallel lines in lambda construction")
    t = _cross(d2, p2 - p1) / _cross(d2, d1)
    return p1 + t * d1


def _z_of_offset(cc: float, e0: complex, el: complex, e1: complex,
                 k: complex) -> complex:
    """z(L) for the line L = {cc * i*el + t el}: x = L cap l0, u = L cap (l1+1)."""
    base = cc * 1j * el
    x = _line_intersect(base, el, 0.0, e0)
    u = _line_intersect(base, el, 1.0, e1)
    return (1.0 - k) * x + k * u


def invert_via_lambda(c: RolledValue, cfg=DEFAULT_CONFIG) -> TorusPoint:
    """Geometric inversion of a regular value through the line family.

    Independent of the linear-solve route: finds the offset of the line L
    (parallel to l) for which z(L) lands on la + a, then reads x and y off
    the two base-line intersections.  Requires generic direction data.
    """
    e0, el, e1, ea = c.reps
    k, a = cfg.k, cfg.a
    if min(c.l0.chordal(c.l), c.l1.chordal(c.l), c.l0.chordal(c.l1)) <= 1e-12:
        raise NotRegular("lambda construction degenerate for these directions")
    z0 = _z_of_offset(0.0, e0, el, e1, k)
    z1 = _z_of_offset(1.0, e0, el, e1, k)
    zdot = z1 - z0
    den = _cross(ea, zdot)
    if abs(den) < 1e-14:
        raise NotRegular("z-line parallel to la + a: no transverse hit")
    cc = _cross(ea, a - z0) / den
    base = cc * 1j * el
    x = _line_intersect(base, el, 0.0, e0)
    u = _line_intersect(base, el, 1.0, e1)
    return TorusPoint(x, u - x)


def fiber_model(c: RolledValue, cfg=DEFAULT_CONFIG,
                prev_kernel=None) -> FiberModel:
    cls = classify_value(c, cfg, prev_kernel=prev_kernel)
    if cls.kind != "critical" or cls.fiber is None:
        raise NotCritical(f"value classifies as {cls.kind} (rank {cls.rank})")
    return cls.fiber


@dataclass(frozen=True)
class Arc:
    """An open arc of the fiber circle between consecutive marked points.

    ``lo``/``hi`` are the section-name blocks bounding the arc (a block has
    more than one name exactly when sections coincide there); ``label`` is
    the argument 4-tuple carried by the whole arc, None for zero-length
    (degenerate) arcs.
    """

    lo: tuple
    hi: tuple
    angle_lo: float
    angle_hi: float
    rep_angle: float | None
    label: np.ndarray | None

    @property
    def degenerate(self) -> bool:
        return self.label is None

    @property
    def length(self) -> float:
        return (self.angle_hi - self.angle_lo) % np.pi


def _cluster_marked(marked, tol):
    """Group the five marked points by chordal proximity; sort by angle."""
    items = sorted(marked.items(), key=lambda kv: (kv[1].theta, kv[0]))
    clusters = []
    for name, d in items:
        if clusters:
            _, d0 = clusters[-1][0]
            if d.chordal(d0) <= tol:
                clusters[-1].append((name, d))
                continue
        clusters.append([(name, d)])
    # wrap-around merge (theta near 0 and near pi are close on RP^1)
    if len(clusters) > 1:
        first_d = clusters[0][0][1]
        last_d = clusters[-1][0][1]
        if first_d.chordal(last_d) <= tol:
            clusters[0] = clusters.pop() + clusters[0]
    return clusters


def arc_label(model: FiberModel, T: float, S: float):
    """Argument 4-tuple at the fiber point [T : S] (S > 0 side)."""
    label = np.empty(4)
    for j, name in enumerate(SECTION_NAMES[:4]):
        e = model.value.reps[j]
        sign = model.coeff_sign_at(name, T, S)
        ang = float(np.angle(e))
        if sign < 0.0:
            ang += np.pi
        label[j] = ang % (2.0 * np.pi)
    return label


def fiber_arcs(c_or_model, cfg=DEFAULT_CONFIG, include_degenerate=False):
    """The arcs of the fiber circle minus marked points, labeled.

    Consecutive distinct marked-point clusters bound one arc each (3 to 5 of
    them).  With ``include_degenerate`` every coinciding pair additionally
    contributes zero-length arcs so that the total count is always 5.
    """
    model = c_or_model if isinstance(c_or_model, FiberModel) else fiber_model(
        c_or_model, cfg
    )
    tol = cfg.tol.coincidence
    clusters = _cluster_marked(model.marked_points(), tol)
    m = len(clusters)
    arcs = []
    for i in range(m):
        lo_names = tuple(sorted(n for n, _ in clusters[i]))
        hi_cluster = clusters[(i + 1) % m]
        hi_names = tuple(sorted(n for n, _ in hi_cluster))
        a_lo = clusters[i][0][1].theta
        a_hi = hi_cluster[0][1].theta
        gap = (a_hi - a_lo) % np.pi
        if m == 1:
            gap = np.pi
        mid = (a_lo + 0.5 * gap) % np.pi
        T, S = np.cos(mid), np.sin(mid)
        if S < 0:
            T, S = -T, -S
        label = arc_label(model, T, S)
        arcs.append(
            Arc(lo=lo_names, hi=hi_names, angle_lo=a_lo, angle_hi=a_hi,
                rep_angle=mid, label=label)
        )
        if include_degenerate:
            for extra in range(len(clusters[i]) - 1):
                arcs.append(
                    Arc(lo=lo_names, hi=lo_names, angle_lo=a_lo,
                        angle_hi=a_lo, rep_angle=None, label=None)
                )
    return arcs


def coamoeba_fiber_interval(t_arg, cfg=DEFAULT_CONFIG, tol=1e-6) -> Arc:
    """The unique fiber arc whose label matches an argument 4-tuple.

    Reduces the tuple mod pi to a rolled value; if that value is critical,
    scans the (at most five) arc labels for an angular match.  Exactly one
    match is returned; none raises NotAttained, several raise MultipleArcs.
    """
    t_arg = np.asarray(t_arg, dtype=float) % (2.0 * np.pi)
    c = RolledValue.from_angles(t_arg % np.pi)
    cls = classify_value(c, cfg)
    if cls.kind != "critical" or cls.fiber is None:
        raise NotAttained(f"value classifies as {cls.kind}")
    arcs = fiber_arcs(cls.fiber, cfg)
    matches = []
    for arc in arcs:
        if arc.label is None:
            continue
        diff = np.abs((arc.label - t_arg + np.pi) % (2.0 * np.pi) - np.pi)
        if np.max(diff) <= tol:
            matches.append(arc)
    if not matches:
        raise NotAttained("no arc carries this argument tuple")
    if len(matches) > 1:
        raise MultipleArcs(f"{len(matches)} arcs match one argument tuple")
    return matches[0]


def sixteen_fold_check(c: RolledValue, cfg=DEFAULT_CONFIG, tol=1e-7):
    """For a regular value: exactly one of the 16 argument lifts is attained.

    The 16 lifts of c to angle 4-tuples differ by adding pi on a subset of
    coordinates; the unique preimage realizes exactly one of them.
    Returns (attained_index_tuple, arg_tuple).
    """
    cls = classify_value(c, cfg)
    if cls.kind != "regular":
        raise NotRegular(f"value classifies as {cls.kind}")
    pt = cls.preimage
    z = z_coords(pt.x, pt.y, cfg)
    actual = np.angle(z) % (2.0 * np.pi)
    base = np.array([float(np.angle(e)) % (2.0 * np.pi) for e in c.reps])
    hits = []
    for mask in range(16):
        eps = np.array([(mask >> j) & 1 for j in range(4)], dtype=float)
        lift = (base + np.pi * eps) % (2.0 * np.pi)
        diff = np.abs((lift - actual + np.pi) % (2.0 * np.pi) - np.pi)
        if np.max(diff) <= tol:
            hits.append(mask)
    if len(hits) != 1:
        raise RuntimeError(
            f"expected exactly 1 attained lift, found {len(hits)}"
        )
    return hits[0], actual

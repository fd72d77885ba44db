"""Numerically robust primitives for real projective geometry.

Directions in RP^1, points and lines in RP^2, conics, and the handful of
constructions (joins, concurrency, conic fitting / intersection,
circumcircles) used throughout the package.  Everything here is a pure
function of its inputs; all homogeneous data is kept unit-normalized with a
canonical sign so that objects can be hashed, compared and serialized
deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# A homogeneous coordinate is "nonzero" for sign-canonicalization purposes
# above this threshold; below it we fall through to the next coordinate.
SIGN_EPS = 1e-13
# Relative singular-value threshold for rank decisions.
RANK_RTOL = 1e-9
# Default geometric tolerance on unit-normalized data.
DEFAULT_TOL = 1e-8


class ZeroInput(ValueError):
    pass


class CoincidentPoints(ValueError):
    pass


class NotConcurrent(ValueError):
    pass


class Indeterminate(ValueError):
    pass


class RankDeficient(ValueError):
    pass


class IdenticalConics(ValueError):
    pass


class CollinearPoints(ValueError):
    pass


def canonicalize(v):
    """Unit-normalize a homogeneous coordinate vector with canonical sign.

    The first coordinate with |v_i| > SIGN_EPS (after unit normalization) is
    made positive.  Idempotent; raises ZeroInput on the zero vector.
    """
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n <= SIGN_EPS:
        raise ZeroInput("zero homogeneous vector")
    v = v / n
    for x in v:
        if abs(x) > SIGN_EPS:
            if x < 0.0:
                v = -v
            break
    return v


@dataclass(frozen=True)
class RP1Dir:
    """A direction in RP^1: homogeneous pair (u, v), canonical-normalized.

    The angular chart theta = atan2(v, u) mod pi lies in [0, pi).  The class
    of the real axis is (1, 0).
    """

    u: float
    v: float

    @staticmethod
    def from_pair(u, v) -> "RP1Dir":
        w = canonicalize([u, v])
        return RP1Dir(float(w[0]), float(w[1]))

    @property
    def theta(self) -> float:
        t = np.arctan2(self.v, self.u) % np.pi
        # atan2 can return pi exactly for (-1, 0)-ish input before the sign
        # canonicalization; fold the endpoint.
        if t >= np.pi - 1e-15:
            t = 0.0
        return float(t)

    @property
    def rep(self) -> complex:
        """The canonical unit complex representative u + iv."""
        return complex(self.u, self.v)

    def chordal(self, other: "RP1Dir") -> float:
        """Chordal distance on RP^1: |sin(theta1 - theta2)|."""
        c = self.u * other.u + self.v * other.v
        s = self.u * other.v - self.v * other.u
        return abs(s) / np.hypot(c, s)

    def is_real_axis(self, tol=DEFAULT_TOL) -> bool:
        return abs(self.v) <= tol


def two_arg(z, tol=SIGN_EPS) -> RP1Dir:
    """The class of a nonzero complex number in RP^1: [Re z : Im z].

    two_arg(z) == two_arg(-z) == two_arg(t*z) for all real t != 0.
    """
    z = complex(z)
    if abs(z) <= tol:
        raise ZeroInput("two_arg of (numerically) zero")
    return RP1Dir.from_pair(z.real, z.imag)


@dataclass(frozen=True)
class RP2Point:
    """A point of RP^2: homogeneous triple (X, Y, W), canonical-normalized.

    Affine points have W != 0 and affine image (X + iY)/W; W = 0 points lie
    on the line at infinity.
    """

    X: float
    Y: float
    W: float

    @staticmethod
    def from_triple(X, Y, W) -> "RP2Point":
        w = canonicalize([X, Y, W])
        return RP2Point(float(w[0]), float(w[1]), float(w[2]))

    @staticmethod
    def from_affine(z) -> "RP2Point":
        z = complex(z)
        return RP2Point.from_triple(z.real, z.imag, 1.0)

    @staticmethod
    def at_infinity(direction: RP1Dir) -> "RP2Point":
        return RP2Point.from_triple(direction.u, direction.v, 0.0)

    @property
    def vec(self):
        return np.array([self.X, self.Y, self.W])

    def is_infinite(self, tol=DEFAULT_TOL) -> bool:
        return abs(self.W) <= tol

    @property
    def affine(self) -> complex:
        if self.is_infinite():
            raise ZeroInput("point at infinity has no affine image")
        return complex(self.X / self.W, self.Y / self.W)

    def dist(self, other: "RP2Point") -> float:
        """Projective (chordal) distance: sin of the angle between lines."""
        c = np.cross(self.vec, other.vec)
        return float(np.linalg.norm(c))


@dataclass(frozen=True)
class ProjLine:
    """A line of RP^2: homogeneous triple (lam, mu, nu) with
    lam*X + mu*Y + nu*W = 0, canonical-normalized."""

    lam: float
    mu: float
    nu: float

    @staticmethod
    def from_triple(lam, mu, nu) -> "ProjLine":
        w = canonicalize([lam, mu, nu])
        return ProjLine(float(w[0]), float(w[1]), float(w[2]))

    @property
    def vec(self):
        return np.array([self.lam, self.mu, self.nu])

    def incident(self, p: RP2Point, tol=DEFAULT_TOL) -> bool:
        return abs(float(self.vec @ p.vec)) <= tol


def line_through(p: RP2Point, q: RP2Point) -> ProjLine:
    """Join of two distinct points (cross product)."""
    c = np.cross(p.vec, q.vec)
    if np.linalg.norm(c) <= DEFAULT_TOL:
        raise CoincidentPoints("projectively equal points have no unique join")
    return ProjLine.from_triple(*c)


def meet(L1: ProjLine, L2: ProjLine) -> RP2Point:
    """Intersection of two distinct lines (cross product)."""
    c = np.cross(L1.vec, L2.vec)
    if np.linalg.norm(c) <= DEFAULT_TOL:
        raise Indeterminate("projectively equal lines")
    return RP2Point.from_triple(*c)


def affine_line_through_direction(z0, direction: RP1Dir) -> ProjLine:
    """The projective closure of {z0 + t * rep(direction) : t real}."""
    return line_through(RP2Point.from_affine(z0), RP2Point.at_infinity(direction))


def concurrency_point(L1: ProjLine, L2: ProjLine, L3: ProjLine, tol=1e-6):
    """Common point of three lines, or raise NotConcurrent.

    Uses the SVD of the stacked 3x3 coefficient matrix: numerical rank <= 2
    plus agreement of the pairwise intersections within ``tol`` (chordal)
    certifies concurrency.  Three parallel lines meet at a W = 0 point.
    Invariant under permutation and rescaling of the arguments.
    """
    M = np.stack([L1.vec, L2.vec, L3.vec])
    U, s, Vt = np.linalg.svd(M)
    if s[0] <= SIGN_EPS:
        raise Indeterminate("all lines zero?")
    if s[2] / s[0] <= RANK_RTOL:
        if s[1] / s[0] <= RANK_RTOL:
            # rank 1: all three lines identical
            raise Indeterminate("all three lines identical")
        p = RP2Point.from_triple(*Vt[2])
        return p
    # Rank 3 but maybe only borderline: accept if the pairwise meets agree.
    pairs = []
    for A, B in ((L1, L2), (L1, L3), (L2, L3)):
        try:
            pairs.append(meet(A, B))
        except Indeterminate:
            continue
    if len(pairs) >= 2:
        d = max(p.dist(q) for i, p in enumerate(pairs) for q in pairs[i + 1:])
        if d <= tol:
            return pairs[0]
    raise NotConcurrent("three lines have no common point within tolerance")


@dataclass(frozen=True)
class Conic:
    """A conic A X^2 + B XY + C Y^2 + D XW + E YW + F W^2 = 0.

    Coefficients are unit-normalized with canonical sign.
    """

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    @staticmethod
    def from_coeffs(coeffs) -> "Conic":
        w = canonicalize(coeffs)
        return Conic(*(float(x) for x in w))

    @property
    def vec(self):
        return np.array([self.A, self.B, self.C, self.D, self.E, self.F])

    @property
    def matrix(self):
        """Symmetric 3x3 matrix M with q(p) = p^T M p."""
        A, B, C, D, E, F = self.vec
        return np.array(
            [
                [A, B / 2.0, D / 2.0],
                [B / 2.0, C, E / 2.0],
                [D / 2.0, E / 2.0, F],
            ]
        )

    def eval_point(self, p: RP2Point) -> float:
        v = p.vec
        return float(v @ self.matrix @ v)

    def eval_affine(self, z) -> float:
        z = complex(z)
        return self.eval_point(RP2Point.from_triple(z.real, z.imag, 1.0))

    @staticmethod
    def from_matrix(M) -> "Conic":
        M = 0.5 * (M + M.T)
        return Conic.from_coeffs(
            [M[0, 0], 2 * M[0, 1], M[1, 1], 2 * M[0, 2], 2 * M[1, 2], M[2, 2]]
        )


def _veronese(p: RP2Point):
    X, Y, W = p.vec
    return np.array([X * X, X * Y, Y * Y, X * W, Y * W, W * W])


def fit_conic(points, rank_rtol=RANK_RTOL):
    """Least-squares conic through >= 6 points (design-matrix null vector).

    Returns (conic, residual) where residual = max |q(p_i)| over the input
    after unit normalization.  Raises RankDeficient when the design matrix
    has rank < 5 (the conic would not be unique).
    """
    pts = list(points)
    if len(pts) < 6:
        raise RankDeficient("need at least 6 points to fit a conic")
    M = np.stack([_veronese(p) for p in pts])
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    if s[4] / s[0] <= rank_rtol:
        raise RankDeficient("points do not determine a unique conic")
    conic = Conic.from_coeffs(Vt[5])
    resid = max(abs(conic.eval_point(p)) for p in pts)
    return conic, resid


def _cubic_roots_real(c3, c2, c1, c0):
    """Real roots of c3 t^3 + c2 t^2 + c1 t + c0 via closed form + Newton.

    Deterministic (no iterative eigensolver): trigonometric/Cardano branches
    followed by one Newton polish per root.  Handles the degenerate-leading
    quadratic/linear cases.
    """
    if abs(c3) <= 1e-14 * max(1.0, abs(c2), abs(c1), abs(c0)):
        if abs(c2) <= 1e-14 * max(1.0, abs(c1), abs(c0)):
            if abs(c1) <= 1e-14 * max(1.0, abs(c0)):
                return []
            return [-c0 / c1]
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            return []
        r = np.sqrt(disc)
        # numerically stable quadratic
        q = -0.5 * (c1 + np.copysign(r, c1))
        roots = [q / c2]
        if abs(q) > 0:
            roots.append(c0 / q)
        else:
            roots.append(-c1 / c2 - roots[0])
        return roots
    # depressed cubic t = s - c2/(3 c3):  s^3 + p s + q
    a, b, c = c2 / c3, c1 / c3, c0 / c3
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    disc = -(4.0 * p**3 + 27.0 * q * q)
    roots = []
    if disc > 0.0:
        # three real roots, trigonometric branch
        m = 2.0 * np.sqrt(-p / 3.0)
        arg = np.clip(3.0 * q / (p * m), -1.0, 1.0)
        phi = np.arccos(arg) / 3.0
        for j in range(3):
            roots.append(m * np.cos(phi - 2.0 * np.pi * j / 3.0) + shift)
    else:
        # one real root, Cardano
        half_q = q / 2.0
        rad = np.sqrt(max(q * q / 4.0 + p**3 / 27.0, 0.0))
        u = np.cbrt(-half_q + rad)
        v = np.cbrt(-half_q - rad)
        roots.append(u + v + shift)
    # one Newton polish per root
    out = []
    for t in roots:
        f = ((c3 * t + c2) * t + c1) * t + c0
        df = (3.0 * c3 * t + 2.0 * c2) * t + c1
        if abs(df) > 1e-14:
            t = t - f / df
        out.append(float(t))
    return out


def _split_degenerate_conic(M):
    """Split a (numerically) rank-<=2 symmetric conic matrix into two lines.

    Uses the adjugate trick: for a rank-2 conic, B = -adj(M) = p p^T with p
    the singular (intersection) point; then M + [p]_x is rank 1 and its
    nonzero row/column pair give the two lines.  Rank-1 conics are a double
    line (returned twice).
    """
    M = 0.5 * (M + M.T)
    adj = np.array(
        [
            [
                M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1],
                -(M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0]),
                M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0],
            ],
            [
                -(M[0, 1] * M[2, 2] - M[0, 2] * M[2, 1]),
                M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0],
                -(M[0, 0] * M[2, 1] - M[0, 1] * M[2, 0]),
            ],
            [
                M[0, 1] * M[1, 2] - M[0, 2] * M[1, 1],
                -(M[0, 0] * M[1, 2] - M[0, 2] * M[1, 0]),
                M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0],
            ],
        ]
    ).T
    B = -adj
    # largest diagonal entry of B = p p^T (if rank 2)
    i = int(np.argmax(np.abs(np.diag(B))))
    bii = B[i, i]
    if bii > 1e-18:
        p = B[:, i] / np.sqrt(bii)
        Px = np.array(
            [[0.0, p[2], -p[1]], [-p[2], 0.0, p[0]], [p[1], -p[0], 0.0]]
        )
        C = M + Px
    else:
        # rank 1: M itself is +- l l^T
        C = M
    # nonzero entry of C gives the line pair: row -> one line, col -> other
    idx = np.unravel_index(np.argmax(np.abs(C)), C.shape)
    if abs(C[idx]) <= 1e-14:
        return None
    g = C[idx[0], :]
    h = C[:, idx[1]]
    try:
        return ProjLine.from_triple(*g), ProjLine.from_triple(*h)
    except ZeroInput:
        return None


def _intersect_line_conic(L: ProjLine, C: Conic):
    """Real intersection points of a line and a conic."""
    lv = L.vec
    # parametrize the line by two points: p0 (closest to origin rep) + t*p1
    i = int(np.argmax(np.abs(lv)))
    # pick two independent vectors orthogonal to lv
    basis = []
    for e in np.eye(3):
        w = e - (e @ lv) / (lv @ lv) * lv
        if np.linalg.norm(w) > 1e-10:
            basis.append(w / np.linalg.norm(w))
        if len(basis) == 2:
            break
    if len(basis) < 2:
        return []
    p0, p1 = basis
    M = C.matrix
    aa = float(p1 @ M @ p1)
    bb = 2.0 * float(p0 @ M @ p1)
    cc = float(p0 @ M @ p0)
    roots = _cubic_roots_real(0.0, aa, bb, cc)
    pts = []
    for t in roots:
        v = p0 + t * p1
        try:
            pts.append(RP2Point.from_triple(*v))
        except ZeroInput:
            continue
    # the parametrization misses the point "t = infinity" = p1 itself
    if abs(aa) <= 1e-12 * max(1.0, abs(bb), abs(cc)):
        pts.append(RP2Point.from_triple(*p1))
    return pts


def intersect_conics(C1: Conic, C2: Conic, tol=DEFAULT_TOL):
    """Real intersection points of two distinct conics (up to 4).

    Degenerate-member method: find t with det(M1 + t M2) = 0, split that
    member into two lines, intersect the lines with one of the conics, then
    keep points lying on both conics within ``tol`` (deduplicated).
    """
    if np.allclose(C1.vec, C2.vec, atol=1e-14) or np.allclose(
        C1.vec, -C2.vec, atol=1e-14
    ):
        raise IdenticalConics("conics are projectively equal")
    M1, M2 = C1.matrix, C2.matrix

    def _adj(M):
        return np.linalg.inv(M).T * np.linalg.det(M) if abs(
            np.linalg.det(M)
        ) > 1e-300 else _cof(M)

    def _cof(M):
        out = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                minor = np.delete(np.delete(M, i, axis=0), j, axis=1)
                out[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
        return out.T

    # det(M1 + t M2) = c0 + c1 t + c2 t^2 + c3 t^3
    c0 = np.linalg.det(M1)
    c3 = np.linalg.det(M2)
    c1 = float(np.trace(_cof(M1).T @ M2))
    c2 = float(np.trace(_cof(M2).T @ M1))
    roots = _cubic_roots_real(c3, c2, c1, c0)
    # also consider the member "t = infinity" = M2 itself
    candidates = [M1 + t * M2 for t in roots]
    candidates.append(M2.copy())
    pts = []
    for M in candidates:
        s = np.linalg.svd(M, compute_uv=False)
        if s[2] / s[0] > 1e-7:
            continue  # not degenerate enough to split reliably
        split = _split_degenerate_conic(M)
        if split is None:
            continue
        for L in split:
            # intersect with the conic whose matrix is better conditioned
            for C in (C1, C2):
                for p in _intersect_line_conic(L, C):
                    pts.append(p)
    # filter to points on both conics, dedupe projectively
    good = []
    for p in pts:
        if abs(C1.eval_point(p)) < tol and abs(C2.eval_point(p)) < tol:
            if all(p.dist(q) > 1e-7 for q in good):
                good.append(p)
    return good[:4]


def circumcircle(z1, z2, z3) -> Conic:
    """Circle through three non-collinear complex points, as a Conic.

    Solved from the 3x3 linear system for x^2 + y^2 + D x + E y + F = 0.
    """
    zs = [complex(z) for z in (z1, z2, z3)]
    area2 = abs(
        (zs[1] - zs[0]).real * (zs[2] - zs[0]).imag
        - (zs[1] - zs[0]).imag * (zs[2] - zs[0]).real
    )
    scale = max(abs(zs[1] - zs[0]), abs(zs[2] - zs[0]), abs(zs[2] - zs[1]))
    if area2 <= 1e-12 * scale * scale:
        raise CollinearPoints("circumcircle of collinear points")
    A = np.array([[z.real, z.imag, 1.0] for z in zs])
    b = np.array([-(z.real**2 + z.imag**2) for z in zs])
    D, E, F = np.linalg.solve(A, b)
    return Conic.from_coeffs([1.0, 0.0, 1.0, D, E, F])


def circle_center_radius(C: Conic):
    """Center and radius of a circle-type conic (A = C, B = 0 up to scale)."""
    A, B, Cc, D, E, F = C.vec
    if abs(B) > 1e-9 or abs(A - Cc) > 1e-9 or abs(A) < 1e-12:
        raise ValueError("conic is not a circle")
    cx = -D / (2 * A)
    cy = -E / (2 * A)
    r2 = cx * cx + cy * cy - F / A
    if r2 <= 0:
        raise ValueError("imaginary circle")
    return complex(cx, cy), float(np.sqrt(r2))

"""The affine plane (x, y) -> (x, y, x+y-1, x+k*y-a) and its argument maps.

Provides the parameter config with genericity validation, the log-modulus /
rolled-argument / argument maps, the closed-form criticality determinant
whose zero set is the common critical locus of those maps, an independent
finite-difference Jacobian oracle, the analytic gradient of the determinant,
and a deterministic sampler of the critical locus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from .projective import RP1Dir, two_arg


class OffTorus(ValueError):
    """A coordinate of the point lies (numerically) on a hyperplane z_j = 0."""


class BranchJump(ValueError):
    """Finite-difference step too large relative to |z_j|; angles unreliable."""


class InsufficientHits(RuntimeError):
    """The critical-locus sampler found fewer sign changes than requested."""


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds used across the package (all on normalized data)."""

    sign_eps: float = 1e-13        # canonical-sign nonzero threshold
    rank_rtol: float = 1e-9        # relative SVD rank threshold
    default: float = 1e-8          # generic geometric tolerance
    torus: float = 1e-10           # distance to coordinate hyperplanes
    consistency: float = 1e-8      # rank-3 RHS consistency (scale-aware)
    crit_zero: float = 1e-10       # |D| accepted as "on the critical locus"
    base_exclusion: float = 1e-4   # affine-chart exclusion radius at 0,1,a,d
    coincidence: float = 1e-7      # chordal tolerance for marked-point merges

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(d) -> "Tolerances":
        return Tolerances(**d)


@dataclass(frozen=True)
class PlaneConfig:
    """Parameters (a, k) of the plane, plus seed and tolerances.

    The default values are an arbitrary validated-generic baseline; every
    frozen number in the test-suite is reproducible from them.
    """

    a: complex = 1.6 + 1.2j
    k: complex = 0.45 + 0.85j
    seed: int = 0
    tol: Tolerances = field(default_factory=Tolerances)

    @property
    def box_radius(self) -> float:
        return 3.0 * max(abs(self.a), abs(self.k), 1.0)

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + salt)

    def to_json(self) -> str:
        d = {
            "a": [self.a.real, self.a.imag],
            "k": [self.k.real, self.k.imag],
            "seed": self.seed,
            "tol": self.tol.to_dict(),
        }
        return json.dumps(d, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "PlaneConfig":
        d = json.loads(text)
        tol = Tolerances.from_dict(d.get("tol", {})) if d.get("tol") else Tolerances()
        return PlaneConfig(
            a=complex(*d["a"]), k=complex(*d["k"]),
            seed=int(d.get("seed", 0)), tol=tol,
        )


DEFAULT_CONFIG = PlaneConfig()


def z_coords(x, y, cfg: PlaneConfig):
    """The four coordinates (x, y, x+y-1, x+k*y-a); vectorized."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    return np.stack([x, y, x + y - 1.0, x + cfg.k * y - cfg.a])


@dataclass(frozen=True)
class TorusPoint:
    """A point of the plane with all four coordinates off zero."""

    x: complex
    y: complex

    def zs(self, cfg: PlaneConfig):
        return np.array(
            [self.x, self.y, self.x + self.y - 1.0, self.x + cfg.k * self.y - cfg.a]
        )


def in_torus(x, y, cfg: PlaneConfig):
    """True where all four |z_j| exceed the torus tolerance; vectorized."""
    z = z_coords(x, y, cfg)
    return np.min(np.abs(z), axis=0) > cfg.tol.torus


def _require_torus(x, y, cfg):
    z = z_coords(x, y, cfg)
    if np.min(np.abs(z)) <= cfg.tol.torus:
        raise OffTorus("point has a coordinate on a hyperplane z_j = 0")
    return z


def maps(pt: TorusPoint, cfg: PlaneConfig = DEFAULT_CONFIG):
    """Log-modulus, rolled-argument and argument images of a torus point.

    Returns (amoeba, rolled, arg) with amoeba = (log|z_j|)_j in R^4,
    rolled = tuple of four RP1 directions [Re z_j : Im z_j], and
    arg = (arg z_j mod 2pi)_j; rolled equals arg reduced mod pi.
    """
    z = _require_torus(pt.x, pt.y, cfg)
    amoeba = np.log(np.abs(z))
    rolled = tuple(two_arg(zj) for zj in z)
    arg = np.angle(z) % (2.0 * np.pi)
    return amoeba, rolled, arg


def arg_tuple(pt: TorusPoint, cfg: PlaneConfig = DEFAULT_CONFIG):
    z = _require_torus(pt.x, pt.y, cfg)
    return np.angle(z) % (2.0 * np.pi)


def crit_det(x, y, cfg: PlaneConfig = DEFAULT_CONFIG):
    """Criticality determinant D(x, y); vectorized over arrays.

    D = Im(y*conj(z3))*Im(x*conj(z4)) - Im(x*conj(z3))*Im(k*y*conj(z4))
    with z3 = x+y-1 and z4 = x+k*y-a.  A torus point is critical for all
    three argument maps iff D = 0.  The sign convention matches the
    finite-difference Jacobian determinant of (x, y) -> (arg z_1..z_4) in
    coordinates (Re x, Im x, Re y, Im y); `jacobian_oracle` guards this.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    z3 = x + y - 1.0
    z4 = x + cfg.k * y - cfg.a
    ky = cfg.k * y
    return (
        (y * np.conj(z3)).imag * (x * np.conj(z4)).imag
        - (x * np.conj(z3)).imag * (ky * np.conj(z4)).imag
    )


def crit_det_point(pt: TorusPoint, cfg: PlaneConfig = DEFAULT_CONFIG) -> float:
    _require_torus(pt.x, pt.y, cfg)
    return float(crit_det(pt.x, pt.y, cfg))


def jacobian_oracle(pt: TorusPoint, cfg: PlaneConfig = DEFAULT_CONFIG,
                    h: float = 1e-5) -> float:
    """Central finite-difference determinant of the 4x4 argument Jacobian.

    Rows are arg z_1..z_4, columns (Re x, Im x, Re y, Im y).  Angle
    differences are taken branch-consistently via angle(z_plus/z_minus).
    Used as an independent check of `crit_det`: both vanish on the same set,
    and the FD determinant equals D / prod_j |z_j|^2 up to O(h^2).
    """
    if not (1e-7 <= h <= 1e-4):
        raise ValueError("h out of the supported range [1e-7, 1e-4]")
    z = _require_torus(pt.x, pt.y, cfg)
    if np.min(np.abs(z)) < 10.0 * h:
        raise BranchJump("|z_j| < 10h: finite differences unreliable")
    J = np.empty((4, 4))
    steps = [h, 1j * h, 0.0, 0.0]
    for col in range(4):
        dx = steps[col] if col < 2 else 0.0
        dy = steps[col - 2] if col >= 2 else 0.0
        zp = z_coords(pt.x + dx, pt.y + dy, cfg)
        zm = z_coords(pt.x - dx, pt.y - dy, cfg)
        J[:, col] = np.angle(zp / zm) / (2.0 * h)
    return float(np.linalg.det(J))


def jacobian_oracle_batch(x, y, cfg: PlaneConfig = DEFAULT_CONFIG, h: float = 1e-5):
    """Vectorized `jacobian_oracle` over arrays of torus points."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    J = np.empty((x.size, 4, 4))
    offs = [(h, 0.0), (1j * h, 0.0), (0.0, h), (0.0, 1j * h)]
    for col, (dx, dy) in enumerate(offs):
        zp = z_coords(x + dx, y + dy, cfg)
        zm = z_coords(x - dx, y - dy, cfg)
        J[:, :, col] = (np.angle(zp / zm) / (2.0 * h)).T
    return np.linalg.det(J)


def grad_crit_det(pt: TorusPoint, cfg: PlaneConfig = DEFAULT_CONFIG):
    """Analytic gradient of D in coordinates (Re x, Im x, Re y, Im y).

    D is a sum of products of terms Im(u * conj(v)) whose u, v are complex
    affine functions of the real coordinates, so the gradient follows from
    the product rule with constant complex partials.
    """
    _require_torus(pt.x, pt.y, cfg)
    x, y, k = pt.x, pt.y, cfg.k
    z3 = x + y - 1.0
    z4 = x + k * y - cfg.a
    # complex partials with respect to (Re x, Im x, Re y, Im y)
    dx = np.array([1.0, 1j, 0.0, 0.0])
    dy = np.array([0.0, 0.0, 1.0, 1j])
    dz3 = dx + dy
    dz4 = dx + k * dy

    def im_uv(u, v):
        return (u * np.conj(v)).imag

    def grad_im_uv(u, du, v, dv):
        return (du * np.conj(v)).imag + (u * np.conj(dv)).imag

    P, gP = im_uv(y, z3), grad_im_uv(y, dy, z3, dz3)
    Q, gQ = im_uv(x, z4), grad_im_uv(x, dx, z4, dz4)
    S, gS = im_uv(x, z3), grad_im_uv(x, dx, z3, dz3)
    T, gT = im_uv(k * y, z4), grad_im_uv(k * y, k * dy, z4, dz4)
    return Q * gP + P * gQ - T * gS - S * gT


def sample_critical_points(n: int, cfg: PlaneConfig = DEFAULT_CONFIG,
                           seed: int | None = None, max_batches: int = 40):
    """Sample ``n`` points of the critical locus {D = 0}, deterministically.

    Draws random segments inside the box of radius 3*max(|a|,|k|,1), keeps
    those whose endpoints give D a sign change, and bisects (vectorized) to
    |D| < tol.crit_zero.  Points too close to a coordinate hyperplane are
    rejected.  Raises InsufficientHits if the budget of segment batches is
    exhausted first (reporting the actual count).
    """
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    R = cfg.box_radius
    found_x, found_y = [], []
    total = 0
    for _ in range(max_batches):
        if total >= n:
            break
        m = max(2 * (n - total), 256)
        pts = rng.uniform(-R, R, size=(2, m, 4))
        x0 = pts[0, :, 0] + 1j * pts[0, :, 1]
        y0 = pts[0, :, 2] + 1j * pts[0, :, 3]
        x1 = pts[1, :, 0] + 1j * pts[1, :, 1]
        y1 = pts[1, :, 2] + 1j * pts[1, :, 3]
        f0 = crit_det(x0, y0, cfg)
        f1 = crit_det(x1, y1, cfg)
        keep = (f0 * f1) < 0.0
        if not np.any(keep):
            continue
        x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]
        f0 = f0[keep]
        lo = np.zeros(x0.size)
        hi = np.ones(x0.size)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            xm = x0 + mid * (x1 - x0)
            ym = y0 + mid * (y1 - y0)
            fm = crit_det(xm, ym, cfg)
            left = (f0 * fm) <= 0.0
            hi = np.where(left, mid, hi)
            lo = np.where(left, lo, mid)
            f0 = np.where(left, f0, fm)
        mid = 0.5 * (lo + hi)
        xm = x0 + mid * (x1 - x0)
        ym = y0 + mid * (y1 - y0)
        ok = (np.abs(crit_det(xm, ym, cfg)) < cfg.tol.crit_zero) & in_torus(xm, ym, cfg)
        found_x.append(xm[ok])
        found_y.append(ym[ok])
        total += int(np.count_nonzero(ok))
    if total < n:
        raise InsufficientHits(f"requested {n} critical points, found {total}")
    xs = np.concatenate(found_x)[:n]
    ys = np.concatenate(found_y)[:n]
    return [TorusPoint(complex(x), complex(y)) for x, y in zip(xs, ys)]


@dataclass
class GenericityReport:
    """Outcome of the parameter-genericity validator, one flag per condition."""

    checks: dict
    a: complex
    k: complex

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self):
        return [name for name, passed in self.checks.items() if not passed]


def validate_config(a, k, *, scan_grid: int = 0, tol: float = 1e-6) -> GenericityReport:
    """Check the genericity conditions on (a, k).

    Algebraic conditions: Im k != 0, Im a != 0, a not in {0, 1, k},
    k not in {0, 1}, Im(k * conj a) != 0.  Derived conditions: the fourth
    base point d exists, is unique, and is > 1e-6 away from {0, 1, a}; and
    (if ``scan_grid`` > 0) a coarse triple-coincidence scan over the traced
    loci comes back empty.
    """
    a, k = complex(a), complex(k)
    checks = {
        "Im k != 0": abs(k.imag) > tol,
        "Im a != 0": abs(a.imag) > tol,
        "a != 0": abs(a) > tol,
        "a != 1": abs(a - 1.0) > tol,
        "a != k": abs(a - k) > tol,
        "k != 0": abs(k) > tol,
        "k != 1": abs(k - 1.0) > tol,
        "Im(k conj a) != 0": abs((k * np.conj(a)).imag) > tol,
    }
    if all(checks.values()):
        from .critical import point_d_direct, NoSolution, MultipleSolutions

        cfg = PlaneConfig(a=a, k=k)
        try:
            d = point_d_direct(cfg)
            checks["d unique"] = True
            checks["d away from {0,1,a}"] = min(
                abs(d), abs(d - 1.0), abs(d - a)
            ) > 1e-6
        except (NoSolution, MultipleSolutions):
            checks["d unique"] = False
            checks["d away from {0,1,a}"] = False
        if scan_grid > 0 and checks["d unique"]:
            from .topology import triple_coincidence_scan, trace_coincidence_loci

            loci = trace_coincidence_loci(cfg, grid=scan_grid)
            scan = triple_coincidence_scan(cfg, loci=loci)
            checks["no triple coincidences (coarse)"] = len(scan.triples) == 0
    return GenericityReport(checks=checks, a=a, k=k)


def random_torus_points(n: int, cfg: PlaneConfig, rng=None, margin: float = 1e-3):
    """n random points of the box with all |z_j| > margin (vectorized)."""
    rng = cfg.rng() if rng is None else rng
    R = cfg.box_radius
    xs = np.empty(n, dtype=complex)
    ys = np.empty(n, dtype=complex)
    got = 0
    while got < n:
        m = max(2 * (n - got), 64)
        u = rng.uniform(-R, R, size=(m, 4))
        x = u[:, 0] + 1j * u[:, 1]
        y = u[:, 2] + 1j * u[:, 3]
        z = z_coords(x, y, cfg)
        ok = np.min(np.abs(z), axis=0) > margin
        take = min(int(np.count_nonzero(ok)), n - got)
        xs[got:got + take] = x[ok][:take]
        ys[got:got + take] = y[ok][:take]
        got += take
    return xs, ys

"""The numerical verification suite: eleven independent checks.

Each check returns a CheckResult with measured values and pinned
tolerances; ``run_all`` executes them in order (optionally a subset) and
``build_report`` assembles the machine-readable report emitted by the CLI.
All sampling is seeded from the config, so reports are reproducible
byte-for-byte; runtimes are measured but serialized as null by default to
keep the bytes stable.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .plane import (
    DEFAULT_CONFIG, PlaneConfig, TorusPoint, z_coords, crit_det,
    jacobian_oracle_batch, grad_crit_det, sample_critical_points,
    random_torus_points,
)
from .projective import NotConcurrent, affine_line_through_direction
from .fibers import (
    RolledValue, fiber_model, fiber_arcs, invert_regular, invert_via_lambda,
    coamoeba_fiber_interval, sixteen_fold_check, MultipleArcs, NotAttained,
)
from .critical import (
    point_d_direct, pencil_model, concurrency_lines_point, _affine_value_raw,
)
from . import topology


REPORT_SCHEMA = "coamoeba-atlas/1"

LEVEL_SAMPLES = {"quick": 100, "full": 1000}


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    measured: dict
    tolerances: dict
    runtime_s: float

    def to_dict(self, include_timings: bool = False) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "measured": self.measured,
            "tolerances": self.tolerances,
            "runtime_s": round(self.runtime_s, 3) if include_timings else None,
        }

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] criterion {self.criterion:2d} {self.name}"


class _Shared:
    """Lazily computed artifacts reused by several checks."""

    def __init__(self, cfg: PlaneConfig, n_samples: int):
        self.cfg = cfg
        self.n_samples = n_samples
        self._loci = None
        self._scan = None
        self._survey = None

    @property
    def loci(self):
        if self._loci is None:
            self._loci = topology.trace_coincidence_loci(self.cfg)
        return self._loci

    @property
    def scan(self):
        if self._scan is None:
            self._scan = topology.triple_coincidence_scan(self.cfg, loci=self.loci)
        return self._scan

    @property
    def survey(self):
        if self._survey is None:
            self._survey = topology.arc_count_survey(
                self.cfg, loci=self.loci, scan=self.scan,
                n_generic=self.n_samples,
            )
        return self._survey


def _rescaled_det(x, y, cfg):
    """crit_det divided by prod |z_j|^2: equals the FD Jacobian determinant."""
    z = z_coords(x, y, cfg)
    return crit_det(x, y, cfg) / np.prod(np.abs(z), axis=0) ** 2


def _random_generic_values(cfg: PlaneConfig, n: int, rng):
    """Critical values over n random concurrency points away from blow-ups."""
    d = point_d_direct(cfg)
    base = np.array([0.0, 1.0, cfg.a, d])
    R = cfg.box_radius
    out = []
    while len(out) < n:
        m = 2 * (n - len(out)) + 16
        p = rng.uniform(-R, R, size=m) + 1j * rng.uniform(-R, R, size=m)
        ok = np.min(np.abs(p[:, None] - base[None, :]), axis=1) > 1e-3
        for q in p[ok][: n - len(out)]:
            out.append(complex(q))
    return [_affine_value_raw(q, cfg) for q in out]


# ---------------------------------------------------------------------------


def check_criticality_oracle(cfg: PlaneConfig = DEFAULT_CONFIG,
                             level: str = "full") -> CheckResult:
    """1: sign(crit_det) matches the FD Jacobian; bisection zeros agree."""
    t0 = time.perf_counter()
    n = 10_000
    rng = cfg.rng(101)
    x, y = random_torus_points(n, cfg, rng, margin=1e-2)
    dres = _rescaled_det(x, y, cfg)
    mask = np.abs(dres) > 1e-6
    fd = jacobian_oracle_batch(x[mask], y[mask], cfg)
    mismatches = int(np.count_nonzero(np.sign(fd) != np.sign(dres[mask])))

    # bisection-zero agreement on random segments with a sign change
    x1, y1 = random_torus_points(n // 10, cfg, rng, margin=1e-2)
    x0, y0 = x[: n // 10], y[: n // 10]
    f0 = crit_det(x0, y0, cfg)
    f1 = crit_det(x1, y1, cfg)
    keep = (f0 * f1) < 0.0
    x0, y0, x1, y1 = x0[keep][:40], y0[keep][:40], x1[keep][:40], y1[keep][:40]

    def bisect(fn):
        lo = np.zeros(x0.size)
        hi = np.ones(x0.size)
        flo = fn(x0, y0)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = fn(x0 + mid * (x1 - x0), y0 + mid * (y1 - y0))
            left = (flo * fm) <= 0.0
            hi = np.where(left, mid, hi)
            lo = np.where(left, lo, mid)
            flo = np.where(left, flo, fm)
        return 0.5 * (lo + hi)

    t_crit = bisect(lambda xx, yy: crit_det(xx, yy, cfg))
    t_fd = bisect(lambda xx, yy: jacobian_oracle_batch(xx, yy, cfg))
    seg_len = np.maximum(np.abs(x1 - x0), np.abs(y1 - y0))
    zero_gap = float(np.max(np.abs(t_crit - t_fd) * seg_len)) if x0.size else 0.0

    runtime = time.perf_counter() - t0
    passed = mismatches == 0 and zero_gap < 1e-8 and runtime < 5.0
    return CheckResult(
        criterion=1, name="criticality-oracle", passed=passed,
        measured={
            "points": n, "sign_mismatches": mismatches,
            "segments": int(x0.size), "max_zero_gap": zero_gap,
            "within_runtime_bound": runtime < 5.0,
        },
        tolerances={"det_floor": 1e-6, "zero_gap": 1e-8, "runtime_s": 5.0},
        runtime_s=runtime,
    )


def check_birational_inversion(cfg: PlaneConfig = DEFAULT_CONFIG,
                               level: str = "full") -> CheckResult:
    """2: invert_regular roundtrips; lambda route agrees with linear solve."""
    t0 = time.perf_counter()
    n = LEVEL_SAMPLES[level]
    rng = cfg.rng(102)
    x, y = random_torus_points(12 * n, cfg, rng, margin=1e-2)
    dres = _rescaled_det(x, y, cfg)
    reg = np.abs(dres) > 1e-4
    x, y = x[reg][:n], y[reg][:n]
    max_round = 0.0
    max_route = 0.0
    for xi, yi in zip(x, y):
        pt = TorusPoint(complex(xi), complex(yi))
        c = RolledValue.from_point(pt, cfg)
        back = invert_regular(c, cfg)
        max_round = max(max_round, abs(back.x - pt.x), abs(back.y - pt.y))
        lam = invert_via_lambda(c, cfg)
        max_route = max(max_route, abs(lam.x - back.x), abs(lam.y - back.y))
    runtime = time.perf_counter() - t0
    passed = x.size == n and max_round < 1e-9 and max_route < 1e-8
    return CheckResult(
        criterion=2, name="birational-inversion", passed=passed,
        measured={"points": int(x.size), "max_roundtrip": float(max_round),
                  "max_route_disagreement": float(max_route)},
        tolerances={"roundtrip": 1e-9, "route": 1e-8},
        runtime_s=runtime,
    )


def check_concurrency(cfg: PlaneConfig = DEFAULT_CONFIG,
                      level: str = "full") -> CheckResult:
    """3: the three boundary lines of sampled critical values are concurrent."""
    t0 = time.perf_counter()
    n = LEVEL_SAMPLES[level]
    pts = sample_critical_points(n, cfg, seed=cfg.seed + 103)
    not_concurrent = 0
    max_sigma = 0.0
    for pt in pts:
        c = RolledValue.from_point(pt, cfg)
        L0 = affine_line_through_direction(0.0, c.l0)
        L1 = affine_line_through_direction(1.0, c.l1)
        La = affine_line_through_direction(cfg.a, c.la)
        M = np.stack([L.vec / np.linalg.norm(L.vec) for L in (L0, L1, La)])
        sigma = float(np.linalg.svd(M, compute_uv=False)[2])
        max_sigma = max(max_sigma, sigma)
        try:
            concurrency_lines_point(c, cfg, tol=1e-6)
        except NotConcurrent:
            not_concurrent += 1
    runtime = time.perf_counter() - t0
    passed = not_concurrent == 0 and max_sigma < 1e-6
    return CheckResult(
        criterion=3, name="concurrency", passed=passed,
        measured={"points": len(pts), "not_concurrent_events": not_concurrent,
                  "max_min_singular_value": max_sigma},
        tolerances={"concurrency": 1e-6},
        runtime_s=runtime,
    )


def check_pencil(cfg: PlaneConfig = DEFAULT_CONFIG,
                 level: str = "full") -> CheckResult:
    """4: fitted fiber conics form a pencil with base points {0, 1, a, d}."""
    t0 = time.perf_counter()
    pm = pencil_model(cfg)
    d = point_d_direct(cfg)
    targets = [0.0 + 0.0j, 1.0 + 0.0j, cfg.a, d]
    affine_base = [b.affine for b in pm.base_points if not b.is_infinite()]
    gaps = [min(abs(b - t) for b in affine_base) for t in targets]
    runtime = time.perf_counter() - t0
    passed = pm.span_ratio < 1e-8 and max(gaps) < 1e-6
    return CheckResult(
        criterion=4, name="pencil", passed=passed,
        measured={"span_ratio": float(pm.span_ratio),
                  "base_point_gaps": [float(g) for g in gaps],
                  "cross_ratio_deviation": float(pm.cross_ratio_dev)},
        tolerances={"span_ratio": 1e-8, "base_points": 1e-6},
        runtime_s=runtime,
    )


def check_sections_coincidences(cfg: PlaneConfig = DEFAULT_CONFIG,
                                level: str = "full",
                                shared: _Shared | None = None) -> CheckResult:
    """5: five distinct marked points generically; ten closed loci; no triples."""
    t0 = time.perf_counter()
    n = LEVEL_SAMPLES[level]
    shared = shared or _Shared(cfg, n)
    rng = cfg.rng(105)
    values = _random_generic_values(cfg, n, rng)
    tol = cfg.tol.coincidence
    min_distinct = 5
    for c in values:
        marked = fiber_model(c, cfg).marked_points()
        names = list(marked)
        distinct = 5
        for i in range(5):
            for j in range(i + 1, 5):
                if marked[names[i]].chordal(marked[names[j]]) <= tol:
                    distinct -= 1
        min_distinct = min(min_distinct, distinct)
    loci = shared.loci
    n_loci = len(loci)
    all_closed = all(
        loc.closed and loc.component_count == 1 for loc in loci.values()
    )
    scan = shared.scan
    runtime = time.perf_counter() - t0
    passed = (min_distinct == 5 and n_loci == 10 and all_closed
              and len(scan.triples) == 0)
    return CheckResult(
        criterion=5, name="sections-coincidences", passed=passed,
        measured={"values": n, "min_distinct_marked": min_distinct,
                  "loci": n_loci, "all_single_closed": all_closed,
                  "triple_intersections": len(scan.triples),
                  "disjoint_pair_crossings": len(scan.vertices)},
        tolerances={"coincidence": tol},
        runtime_s=runtime,
    )


def check_covering_monodromy(cfg: PlaneConfig = DEFAULT_CONFIG,
                             level: str = "full",
                             shared: _Shared | None = None) -> CheckResult:
    """6: degree five, transitive monodromy, ten boundary circles."""
    t0 = time.perf_counter()
    n = LEVEL_SAMPLES[level]
    shared = shared or _Shared(cfg, n)
    generic = shared.survey["generic"]
    degree_ok = set(generic) == {5}
    mono = topology.monodromy_report(cfg)
    laps = [
        topology.boundary_circle_lap(loc, cfg) for loc in shared.loci.values()
    ]
    n_closed = sum(1 for lap in laps if lap.closed_in_one_lap)
    runtime = time.perf_counter() - t0
    passed = degree_ok and mono.transitive and n_closed == 10
    return CheckResult(
        criterion=6, name="covering-monodromy", passed=passed,
        measured={"generic_arc_counts": {str(k): v for k, v in generic.items()},
                  "transitive": mono.transitive,
                  "orientation_reversing_generators":
                      int(sum(mono.orientation_reversing)),
                  "boundary_circles_closed": n_closed},
        tolerances={"boundary_pinch": 1e-5},
        runtime_s=runtime,
    )


def check_euler_characteristics(cfg: PlaneConfig = DEFAULT_CONFIG,
                                level: str = "full",
                                shared: _Shared | None = None) -> CheckResult:
    """7: V - E + F = 1; chi(base) = -3; chi(cover) = -15 = 1 - 16."""
    t0 = time.perf_counter()
    shared = shared or _Shared(cfg, LEVEL_SAMPLES[level])
    arr = topology.arrangement_euler(cfg, loci=shared.loci, scan=shared.scan)
    chi_base = 1 - 4
    chi_cover = 5 * chi_base
    runtime = time.perf_counter() - t0
    passed = (arr.euler == 1 and arr.sphere_check == 2 and arr.antipodal_free
              and chi_base == -3 and chi_cover == -15 and chi_cover == 1 - 16)
    return CheckResult(
        criterion=7, name="euler-characteristics", passed=passed,
        measured={"V": arr.V, "E": arr.E, "F": arr.F, "euler": arr.euler,
                  "sphere_check": arr.sphere_check,
                  "antipodal_free": arr.antipodal_free,
                  "chi_base": chi_base, "chi_cover": chi_cover},
        tolerances={},
        runtime_s=runtime,
    )


def check_interval_fibers(cfg: PlaneConfig = DEFAULT_CONFIG,
                          level: str = "full",
                          shared: _Shared | None = None) -> CheckResult:
    """8: every arc label resolves to exactly one arc; counts are {5, 4, 3}."""
    t0 = time.perf_counter()
    n = LEVEL_SAMPLES[level]
    shared = shared or _Shared(cfg, n)
    rng = cfg.rng(108)
    values = _random_generic_values(cfg, n, rng)
    multiple = 0
    missing = 0
    labels_checked = 0
    for c in values:
        for arc in fiber_arcs(c, cfg):
            if arc.label is None:
                continue
            labels_checked += 1
            try:
                coamoeba_fiber_interval(arc.label, cfg)
            except MultipleArcs:
                multiple += 1
            except NotAttained:
                missing += 1
    survey = shared.survey
    counts_ok = (set(survey["generic"]) == {5}
                 and set(survey["on_locus"]) == {4}
                 and set(survey["at_crossing"]) == {3})
    runtime = time.perf_counter() - t0
    passed = multiple == 0 and missing == 0 and counts_ok
    return CheckResult(
        criterion=8, name="interval-fibers", passed=passed,
        measured={"labels_checked": labels_checked,
                  "multiple_arc_events": multiple,
                  "not_attained_events": missing,
                  "stratum_arc_counts": {
                      k: {str(kk): vv for kk, vv in v.items()}
                      for k, v in survey.items()}},
        tolerances={"label_match": 1e-6},
        runtime_s=runtime,
    )


def check_sixteen_fold(cfg: PlaneConfig = DEFAULT_CONFIG,
                       level: str = "full") -> CheckResult:
    """9: exactly one of the sixteen argument lifts is attained."""
    t0 = time.perf_counter()
    n = LEVEL_SAMPLES[level]
    rng = cfg.rng(109)
    x, y = random_torus_points(12 * n, cfg, rng, margin=1e-2)
    reg = np.abs(_rescaled_det(x, y, cfg)) > 1e-4
    x, y = x[reg][:n], y[reg][:n]
    failures = 0
    for xi, yi in zip(x, y):
        pt = TorusPoint(complex(xi), complex(yi))
        c = RolledValue.from_point(pt, cfg)
        try:
            sixteen_fold_check(c, cfg)
        except RuntimeError:
            failures += 1
    runtime = time.perf_counter() - t0
    passed = failures == 0 and x.size == n
    return CheckResult(
        criterion=9, name="sixteen-fold", passed=passed,
        measured={"values": int(x.size), "non_unique_lift_events": failures},
        tolerances={"lift_match": 1e-7},
        runtime_s=runtime,
    )


def check_gradient_floor(cfg: PlaneConfig = DEFAULT_CONFIG,
                         level: str = "full") -> CheckResult:
    """10: the rescaled gradient of the determinant stays above 1e-4 on Z.

    Rescaling: the determinant is a degree-4 polynomial in the real
    coordinates, so on the sampling box of radius R the unit-box
    normalization D(R u)/R^4 has gradient (w.r.t. u) equal to grad D / R^3.
    A positive floor certifies the sampled level set is regular."""
    t0 = time.perf_counter()
    n = LEVEL_SAMPLES[level]
    pts = sample_critical_points(n, cfg, seed=cfg.seed + 110)
    scale = cfg.box_radius ** 3
    min_grad = np.inf
    for pt in pts:
        g = grad_crit_det(pt, cfg)
        min_grad = min(min_grad, float(np.linalg.norm(g)) / scale)
    runtime = time.perf_counter() - t0
    passed = min_grad > 1e-4
    return CheckResult(
        criterion=10, name="gradient-floor", passed=passed,
        measured={"points": len(pts), "min_rescaled_gradient": float(min_grad)},
        tolerances={"floor": 1e-4},
        runtime_s=runtime,
    )


def check_determinism(cfg: PlaneConfig = DEFAULT_CONFIG,
                      level: str = "full") -> CheckResult:
    """11: reports and figures are byte-identical across repeated runs."""
    t0 = time.perf_counter()
    from . import svg

    def mini_report_bytes():
        results = [
            check_birational_inversion(cfg, "quick"),
            check_gradient_floor(cfg, "quick"),
        ]
        payload = {
            "schema": REPORT_SCHEMA,
            "config": json.loads(cfg.to_json()),
            "checks": [r.to_dict() for r in results],
        }
        return json.dumps(payload, sort_keys=True).encode()

    report_stable = mini_report_bytes() == mini_report_bytes()
    figure_kinds = ("pencil", "coincidence", "cyclic-diagram",
                    "coamoeba-projection", "amoeba-projection")
    figures_stable = True
    for kind in figure_kinds:
        if svg.render_figure(cfg, kind) != svg.render_figure(cfg, kind):
            figures_stable = False
            break
    runtime = time.perf_counter() - t0
    passed = report_stable and figures_stable
    return CheckResult(
        criterion=11, name="determinism", passed=passed,
        measured={"report_bytes_stable": report_stable,
                  "figure_bytes_stable": figures_stable,
                  "figure_kinds": len(figure_kinds)},
        tolerances={},
        runtime_s=runtime,
    )


# ---------------------------------------------------------------------------

ALL_CHECKS = (
    check_criticality_oracle,
    check_birational_inversion,
    check_concurrency,
    check_pencil,
    check_sections_coincidences,
    check_covering_monodromy,
    check_euler_characteristics,
    check_interval_fibers,
    check_sixteen_fold,
    check_gradient_floor,
    check_determinism,
)

_SHARED_AWARE = {
    "check_sections_coincidences", "check_covering_monodromy",
    "check_euler_characteristics", "check_interval_fibers",
}


def run_all(cfg: PlaneConfig = DEFAULT_CONFIG, level: str = "full",
            criteria=None, max_workers: int = 1):
    """Run the verification suite; returns a list of CheckResult.

    ``criteria`` restricts to a subset of criterion numbers.  With
    ``max_workers`` > 1 the independent checks run in a thread pool (the
    results are identical either way; only wall time changes)."""
    if level not in LEVEL_SAMPLES:
        raise ValueError(f"level must be one of {sorted(LEVEL_SAMPLES)}")
    shared = _Shared(cfg, LEVEL_SAMPLES[level])
    todo = [
        fn for i, fn in enumerate(ALL_CHECKS, start=1)
        if criteria is None or i in criteria
    ]

    def run_one(fn):
        if fn.__name__ in _SHARED_AWARE:
            return fn(cfg, level, shared=shared)
        return fn(cfg, level)

    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        # warm the shared caches serially so threads do not race to build them
        if any(fn.__name__ in _SHARED_AWARE for fn in todo):
            shared.survey  # noqa: B018 -- builds loci and scan too
        with ThreadPoolExecutor(max_workers=max_workers) as ex:
            return list(ex.map(run_one, todo))
    return [run_one(fn) for fn in todo]


def build_report(cfg: PlaneConfig = DEFAULT_CONFIG, level: str = "full",
                 include_timings: bool = False, criteria=None,
                 max_workers: int = 1) -> dict:
    results = run_all(cfg, level, criteria=criteria, max_workers=max_workers)
    return {
        "schema": REPORT_SCHEMA,
        "level": level,
        "config": json.loads(cfg.to_json()),
        "checks": [r.to_dict(include_timings) for r in results],
        "passed": all(r.passed for r in results),
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"

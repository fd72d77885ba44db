"""Global topology of the critical-value surface and its five-fold cover.

Traces the ten section-coincidence loci (six affine curves, three
exceptional divisors, the line at infinity), scans for forbidden triple
coincidences, transports fiber arcs along loops to compute monodromy
permutations, tracks the pinched arc once around every coincidence circle,
and verifies the Euler characteristic bookkeeping via an explicit
decomposition of the traced curve arrangement on the projective plane
(computed on its orientable double cover).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .projective import (
    RP1Dir, RP2Point, ProjLine, Conic, two_arg, fit_conic, line_through,
    circle_center_radius,
)
from .plane import DEFAULT_CONFIG, PlaneConfig
from .fibers import RolledValue, fiber_model, FiberModel, classify_value
from .critical import (
    AFFINE_PAIRS, pair_key, coincidence_defect, gauge_jacobian, point_d_direct,
    critical_value_from_p, _affine_value_raw, _infinity_value,
    exceptional_value,
)
from .tracing import (
    trace_zero_set, exits_antipodally, newton_refine_2d, TracedCurve, OpenCurve,
)


class MissingPair(RuntimeError):
    pass


class AmbiguousTransport(RuntimeError):
    pass


class OpenLoop(ValueError):
    pass


# ---------------------------------------------------------------------------
# coincidence loci


@dataclass
class CoincidenceLocus:
    """One of the ten section-coincidence loci of the critical-value surface."""

    pair: tuple                    # sorted section names
    kind: str                      # "affine_trace" | "exceptional_divisor" | "line_at_infinity"
    curves: list | None = None     # TracedCurve list (affine kind only)
    divisor_point: complex | None = None
    component_count: int = 1
    closed: bool = True

    @property
    def is_structural(self) -> bool:
        return self.kind != "affine_trace"


def trace_coincidence_loci(cfg: PlaneConfig = DEFAULT_CONFIG, grid: int = 801):
    """Trace all ten coincidence loci; returns {pair: CoincidenceLocus}.

    The six affine pairs are marching-squares traces of their polynomial
    defect functions; a locus whose affine trace is one closed curve, or one
    open curve leaving the box antipodally (a projective line), counts as a
    single closed component.  The pairs involving the y = 0 section are
    structural: exceptional divisors over 0, 1, a and the line at infinity.
    """
    out = {}
    for pair in AFFINE_PAIRS:
        key = pair_key(*pair)

        def f(p, key=key):
            return coincidence_defect(key, p, cfg)

        curves = trace_zero_set(f, 0.0, cfg.box_radius, grid=grid)
        curves = [c for c in curves if len(c.points) >= 8]
        if not curves:
            raise MissingPair(f"no trace found for {key}")
        closed = False
        count = len(curves)
        if count == 1 and curves[0].closed:
            closed = True
        elif count == 1 and exits_antipodally(curves[0]):
            closed = True  # closes through the line at infinity
        out[key] = CoincidenceLocus(
            pair=key, kind="affine_trace", curves=curves,
            component_count=count, closed=closed,
        )
    out[pair_key("z1", "z2")] = CoincidenceLocus(
        pair=pair_key("z1", "z2"), kind="exceptional_divisor",
        divisor_point=0.0 + 0.0j,
    )
    out[pair_key("z2", "z3")] = CoincidenceLocus(
        pair=pair_key("z2", "z3"), kind="exceptional_divisor",
        divisor_point=1.0 + 0.0j,
    )
    out[pair_key("z2", "z4")] = CoincidenceLocus(
        pair=pair_key("z2", "z4"), kind="exceptional_divisor",
        divisor_point=cfg.a,
    )
    out[pair_key("z2", "inf")] = CoincidenceLocus(
        pair=pair_key("z2", "inf"), kind="line_at_infinity",
    )
    if len(out) != 10:
        raise MissingPair(f"expected 10 loci, built {len(out)}")
    return out


def _blowup_points(cfg: PlaneConfig):
    return [0.0 + 0.0j, 1.0 + 0.0j, cfg.a, point_d_direct(cfg)]


def newton_project_to_locus(pair, p: complex, cfg: PlaneConfig, iters=3):
    """Project p onto {defect = 0} by damped Newton along the gradient."""
    key = pair_key(*pair)
    h = 1e-7
    for _ in range(iters):
        f = float(coincidence_defect(key, np.array([p]), cfg)[0])
        fx = float(coincidence_defect(key, np.array([p + h]), cfg)[0])
        fy = float(coincidence_defect(key, np.array([p + 1j * h]), cfg)[0])
        gx, gy = (fx - f) / h, (fy - f) / h
        g2 = gx * gx + gy * gy
        if g2 < 1e-18:
            break
        p = p - f * complex(gx, gy) / g2
    return p


@dataclass
class CoincidenceScan:
    triples: list            # forbidden index-sharing intersections (expect [])
    vertices: list           # (p, pair1, pair2) disjoint-pair crossings
    tangent_report: dict     # q -> {"pairs": [...], "min_separation": float}


def triple_coincidence_scan(cfg: PlaneConfig = DEFAULT_CONFIG, loci=None,
                            grid: int = 801):
    """Scan pairwise intersections of the traced loci for triple coincidences.

    Intersections at the blow-up points 0, 1, a, d are excluded (the loci
    genuinely cross there in the p-chart but separate on the blow-up);
    instead the tangent directions of the loci through each blow-up point
    must be pairwise distinct, which is reported per point.  Returns
    (triples, vertices): ``triples`` (expected empty) are non-blow-up
    intersections of loci sharing a section index; ``vertices`` are the
    allowed disjoint-pair crossings.
    """
    if loci is None:
        loci = trace_coincidence_loci(cfg, grid=grid)
    affine = [key for key, loc in loci.items() if loc.kind == "affine_trace"]
    blowups = _blowup_points(cfg)
    triples = []
    vertices = []
    for i in range(len(affine)):
        for j in range(i + 1, len(affine)):
            k1, k2 = affine[i], affine[j]
            seeds = _proximity_seeds(loci[k1], loci[k2], cfg)

            def f2(p, k1=k1, k2=k2):
                return (coincidence_defect(k1, p, cfg),
                        coincidence_defect(k2, p, cfg))

            pts = newton_refine_2d(f2, seeds, tol=1e-10)
            for p in pts:
                if min(abs(p - q) for q in blowups) < 1e-5:
                    continue  # blow-up point: handled by the tangent report
                shared = set(k1) & set(k2)
                if shared:
                    triples.append((p, k1, k2))
                else:
                    vertices.append((p, k1, k2))
    # deduplicate vertices
    vertices_unique = []
    for v in vertices:
        if all(abs(v[0] - u[0]) > 1e-7 for u in vertices_unique):
            vertices_unique.append(v)
    tangent_report = {}
    for q in blowups:
        dirs = []
        for key in affine:
            fq = float(coincidence_defect(key, np.array([q]), cfg)[0])
            if abs(fq) > 1e-7:
                continue  # locus does not pass through q
            g = _defect_gradient(key, q, cfg)
            dirs.append((key, RP1Dir.from_pair(-g[1], g[0])))
        min_sep = np.pi
        for ii in range(len(dirs)):
            for jj in range(ii + 1, len(dirs)):
                min_sep = min(min_sep, dirs[ii][1].chordal(dirs[jj][1]))
        tangent_report[q] = {
            "pairs": [key for key, _ in dirs],
            "min_separation": float(min_sep) if len(dirs) > 1 else np.pi,
        }
    return CoincidenceScan(
        triples=triples, vertices=vertices_unique, tangent_report=tangent_report
    )


def _defect_gradient(key, p: complex, cfg: PlaneConfig):
    J = gauge_jacobian(p, cfg)  # rows: s0, s1, sa
    rowmap = {"z1": J[0], "z3": J[1], "z4": J[2]}
    a, b = pair_key(*key)
    if a == "inf" or b == "inf":
        name = b if a == "inf" else a
        return rowmap[name]
    return rowmap[a] - rowmap[b]


def _proximity_seeds(l1: CoincidenceLocus, l2: CoincidenceLocus,
                     cfg: PlaneConfig, cell=0.05):
    """Near-intersection seeds from two traced polylines (grid hashing)."""
    pts2 = np.concatenate([c.points for c in l2.curves])
    buckets = {}
    for z in pts2:
        k = (int(np.floor(z.real / cell)), int(np.floor(z.imag / cell)))
        buckets.setdefault(k, []).append(z)
    seeds = []
    for c in l1.curves:
        for z in c.points:
            k0 = (int(np.floor(z.real / cell)), int(np.floor(z.imag / cell)))
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for w in buckets.get((k0[0] + dx, k0[1] + dy), ()):
                        if abs(z - w) < cell:
                            seeds.append(0.5 * (z + w))
    # thin out
    out = []
    for s in seeds:
        if all(abs(s - t) > 2 * cell for t in out):
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# cyclic order of sections


def cyclic_order(c_or_model, cfg: PlaneConfig = DEFAULT_CONFIG):
    """Section names sorted by fiber-circle angle, as a cyclic word.

    Coinciding sections are emitted as one block (tuple).  The word starts
    at the block containing the lexicographically smallest name.
    """
    model = c_or_model if isinstance(c_or_model, FiberModel) else fiber_model(
        c_or_model, cfg
    )
    marked = model.marked_points()
    items = sorted(marked.items(), key=lambda kv: (kv[1].theta, kv[0]))
    tol = cfg.tol.coincidence
    blocks = []
    for name, d in items:
        if blocks and d.chordal(blocks[-1][1][0][1]) <= tol:
            blocks[-1][1].append((name, d))
        else:
            blocks.append((len(blocks), [(name, d)]))
    if len(blocks) > 1 and blocks[0][1][0][1].chordal(blocks[-1][1][0][1]) <= tol:
        first = blocks.pop(0)
        blocks[-1][1].extend(first[1])
    word = [tuple(sorted(n for n, _ in blk)) for _, blk in blocks]
    # canonical rotation: smallest name first
    start = min(range(len(word)), key=lambda i: word[i][0])
    return tuple(word[start:] + word[:start])


# ---------------------------------------------------------------------------
# transport of fiber arcs along paths of critical values


@dataclass
class TransportState:
    names: list          # 5 section names in fiber-circle order (positional)
    tokens: list         # token at gap i = between names[i] and names[i+1]
    model: FiberModel
    positions: dict      # name -> RP1Dir


def _marked_positions(model: FiberModel):
    return model.marked_points()


def _initial_state(model: FiberModel, cfg: PlaneConfig) -> TransportState:
    marked = _marked_positions(model)
    items = sorted(marked.items(), key=lambda kv: (kv[1].theta, kv[0]))
    names = [n for n, _ in items]
    tol = cfg.tol.coincidence
    for i in range(5):
        if marked[names[i]].chordal(marked[names[(i + 1) % 5]]) <= tol:
            raise AmbiguousTransport(
                "base fiber has coinciding sections; pick a generic base point"
            )
    return TransportState(
        names=names, tokens=list(range(5)), model=model, positions=marked
    )


def _observed_clusters(marked: dict, tol: float):
    items = sorted(marked.items(), key=lambda kv: (kv[1].theta, kv[0]))
    clusters = []
    for name, d in items:
        if clusters and d.chordal(clusters[-1][1]) <= tol:
            clusters[-1][0].append(name)
        else:
            clusters.append(([name], d))
    if len(clusters) > 1 and clusters[0][1].chordal(clusters[-1][1]) <= tol:
        first = clusters.pop(0)
        clusters[-1][0].extend(first[0])
    return [c[0] for c in clusters]


def _order_cluster_by(cluster, names):
    """Order the members of a merged cluster by their adjacency in ``names``.

    The members must occupy consecutive positions of the cyclic word (they
    merged without crossing anything else); returns them in that order or
    None when they are not consecutive (ambiguous step)."""
    if len(cluster) == 1:
        return list(cluster)
    n = len(names)
    idx = sorted(names.index(m) for m in cluster)
    for start in idx:
        run = [(start + j) % n for j in range(len(cluster))]
        if sorted(run) == idx or set(run) == set(idx):
            if all(names[i] in cluster for i in run):
                return [names[i] for i in run]
    return None


def _match_words(old: list, observed: list):
    """Match the observed cyclic word against the old positional word.

    Returns ("same", old) when a rotation of observed equals old;
    ("swap", i) when exactly one cyclic-adjacent transposition at positions
    (i, i+1) turns old into observed; None otherwise."""
    n = len(old)
    for r in range(n):
        rot = observed[r:] + observed[:r]
        if rot == old:
            return ("same", None)
    for r in range(n):
        rot = observed[r:] + observed[:r]
        diff = [i for i in range(n) if rot[i] != old[i]]
        if len(diff) == 2:
            i, j = diff
            if (j - i) % n == 1 or (i - j) % n == 1:
                lo = i if (j - i) % n == 1 else j
                hi = (lo + 1) % n
                if rot[lo] == old[hi] and rot[hi] == old[lo]:
                    return ("swap", lo)
    return None


def transport_along(path, cfg: PlaneConfig = DEFAULT_CONFIG,
                    state: TransportState | None = None,
                    init_step: float = 1.0 / 400.0, min_step: float = 1e-6,
                    delta: float = 0.02):
    """Transport the five arc tokens along a path of critical values.

    ``path``: callable s in [0, 1] -> RolledValue, every value critical.
    Adaptive stepping: a step is accepted only when every marked point moves
    less than ``delta`` in the RP^1 chordal metric and the cyclic word either
    matches or differs by a single adjacent transposition (arc pinch and
    reopen).  Raises AmbiguousTransport when the step underflows."""
    if state is None:
        state = _initial_state(fiber_model(path(0.0), cfg), cfg)
    s = 0.0
    step = init_step
    tol = cfg.tol.coincidence
    while s < 1.0 - 1e-15:
        s_next = min(1.0, s + step)
        c = path(s_next)
        model = fiber_model(c, cfg, prev_kernel=state.model.u)
        marked = _marked_positions(model)
        motion = max(
            state.positions[name].chordal(marked[name]) for name in marked
        )
        event = None
        if motion <= delta:
            clusters = _observed_clusters(marked, tol)
            ordered = []
            ok = True
            for cl in clusters:
                oc = _order_cluster_by(cl, state.names)
                if oc is None:
                    ok = False
                    break
                ordered.extend(oc)
            if ok:
                event = _match_words(state.names, ordered)
        if event is None:
            step *= 0.5
            if step < min_step:
                raise AmbiguousTransport(f"step underflow at s = {s:.6f}")
            continue
        kind, info = event
        if kind == "swap":
            i = info
            j = (i + 1) % 5
            state.names[i], state.names[j] = state.names[j], state.names[i]
        state.model = model
        state.positions = marked
        s = s_next
        step = min(init_step, step * 2.0)
    return state


def loop_permutation(path, cfg: PlaneConfig = DEFAULT_CONFIG,
                     **kw) -> tuple:
    """Monodromy permutation of the five arc slots along a closed loop.

    Returns (perm, reversed) with perm[j] = token occupying gap j after the
    lap (gaps indexed by the initial word; tokens start as 0..4) and
    ``reversed`` True when the loop brings the fiber circle back with the
    opposite orientation (the cyclic word closes on its reversal), which is
    what happens along any orientation-reversing loop of the base surface."""
    c0 = path(0.0)
    c1 = path(1.0)
    if c0.dist(c1) > 1e-9:
        raise OpenLoop("path endpoints are different values")
    init = _initial_state(fiber_model(c0, cfg), cfg)
    init_names = list(init.names)
    final = transport_along(path, cfg, state=init, **kw)
    n = 5
    for r in range(n):
        if [final.names[(i + r) % n] for i in range(n)] == init_names:
            return tuple(final.tokens[(j + r) % n] for j in range(n)), False
    for r in range(n):
        if [final.names[(r - i) % n] for i in range(n)] == init_names:
            # gap (I[j], I[j+1]) is the reversed final gap at (r - j - 1)
            return tuple(final.tokens[(r - j - 1) % n] for j in range(n)), True
    raise AmbiguousTransport("loop closed on a different cyclic word")


def compose_perms(p_second, p_first):
    """Permutation of running p_first's loop then p_second's."""
    return tuple(p_first[p_second[j]] for j in range(len(p_second)))


def perms_transitive(perms, n=5) -> bool:
    """Orbit of slot 0 under the group generated by ``perms`` covers all slots."""
    seen = {0}
    frontier = [0]
    maps = []
    for p in perms:
        maps.append(p)
        inv = [0] * n
        for i, v in enumerate(p):
            inv[v] = i
        maps.append(tuple(inv))
    while frontier:
        x = frontier.pop()
        for p in maps:
            y = p[x]
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return len(seen) == n


# ---------------------------------------------------------------------------
# loop construction


def _affine_path_values(waypoints, cfg):
    """Piecewise-linear path of values through affine waypoints."""
    pts = [complex(w) for w in waypoints]
    lens = [abs(pts[i + 1] - pts[i]) for i in range(len(pts) - 1)]
    total = sum(lens)
    cum = np.concatenate([[0.0], np.cumsum(lens)]) / total

    def path(s):
        s = min(max(s, 0.0), 1.0)
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(i, len(pts) - 2)
        f = (s - cum[i]) / (cum[i + 1] - cum[i])
        p = pts[i] + f * (pts[i + 1] - pts[i])
        return _affine_value_raw(p, cfg)

    return path


def _concat_paths(paths):
    k = len(paths)

    def path(s):
        s = min(max(s, 0.0), 1.0)
        i = min(int(s * k), k - 1)
        return paths[i](s * k - i)

    return path


def _radial_path(q, psi, cfg, r0, r_min=1e-5, inward=True):
    """Values along p = q + r e^{i psi}, r sweeping r0 -> r_min (or back),
    ending (or starting) on the exceptional divisor point itself."""
    u = np.exp(1j * psi)
    ratio = r_min / r0

    def path(s):
        t = s if inward else 1.0 - s
        if t >= 1.0 - 1e-12:
            return _divisor_value(q, psi, cfg)
        r = r0 * ratio**t
        return _affine_value_raw(q + r * u, cfg)

    return path


def _divisor_value(q, psi, cfg):
    d = point_d_direct(cfg)
    if abs(q - d) < 1e-9:
        return _d_divisor_value_for_direction(psi, cfg)
    return exceptional_value(q, psi, cfg, check_limit=False)


def _d_divisor_value_for_direction(psi, cfg):
    """The d-divisor value matching the affine approach direction psi."""
    d = point_d_direct(cfg)
    return _affine_value_raw(d + 1e-7 * np.exp(1j * psi), cfg)


def _divisor_sweep_path(q, psi0, psi1, cfg):
    def path(s):
        return _divisor_value(q, psi0 + s * (psi1 - psi0), cfg)

    return path


def _arc_path(q, r0, psi0, psi1, cfg):
    def path(s):
        psi = psi0 + s * (psi1 - psi0)
        return _affine_value_raw(q + r0 * np.exp(1j * psi), cfg)

    return path


def exceptional_core_loop(q, cfg: PlaneConfig = DEFAULT_CONFIG,
                          p_base=None, psi0=0.9, r0=0.05,
                          sweep_turns: int = 0):
    """Loop through the exceptional divisor over q (a cross-cap generator).

    Approach from the base point, pass straight through the divisor point
    of direction psi0 (enter radially along psi0, leave along psi0 + pi;
    the two limits agree because the divisor circle is parametrized by
    directions mod pi), circle back at radius r0 and return.  The loop
    crosses the divisor once, so it reverses orientation.  With
    ``sweep_turns`` = n, n full laps of the divisor circle are inserted at
    the crossing (n = 1 composes the generator with a conjugate of itself,
    which must transport to an orientation-preserving word)."""
    q = complex(q)
    if p_base is None:
        p_base = _default_base(cfg)
    a_in = q + r0 * np.exp(1j * psi0)
    a_out = q + r0 * np.exp(1j * (psi0 + np.pi))
    legs = [
        _affine_path_values([p_base, a_in], cfg),
        _radial_path(q, psi0, cfg, r0, inward=True),
    ]
    if sweep_turns:
        legs.append(
            _divisor_sweep_path(q, psi0, psi0 + sweep_turns * np.pi, cfg)
        )
    legs += [
        _radial_path(q, psi0 + np.pi, cfg, r0, inward=False),
        _arc_path(q, r0, psi0 + np.pi, psi0 + 2.0 * np.pi, cfg),
        _affine_path_values([a_in, p_base], cfg),
    ]
    return _concat_paths(legs)


def infinity_loop(cfg: PlaneConfig = DEFAULT_CONFIG, p_base=None,
                  direction=0.3, t_max=None):
    """Pseudo-line loop: out to infinity along a fixed direction, across the
    line at infinity, and back from the antipodal side."""
    if p_base is None:
        p_base = _default_base(cfg)
    if t_max is None:
        t_max = 40.0 * cfg.box_radius
    u = np.exp(1j * direction)
    e = two_arg(u)

    def leg_out(s):
        if s >= 1.0 - 1e-12:
            return _infinity_value(e, cfg)
        t = np.tan(0.5 * np.pi * s) * 3.0
        t = min(t, t_max)
        return _affine_value_raw(p_base + t * u, cfg)

    def leg_in(s):
        if s <= 1e-12:
            return _infinity_value(e, cfg)
        t = np.tan(0.5 * np.pi * (1.0 - s)) * 3.0
        t = min(t, t_max)
        return _affine_value_raw(p_base - t * u, cfg)

    return _concat_paths([leg_out, leg_in])


def _default_base(cfg: PlaneConfig) -> complex:
    return complex(-1.5, -1.0)


@dataclass
class MonodromyReport:
    base_point: complex
    loop_names: list
    permutations: list
    orientation_reversing: list
    transitive: bool


def monodromy_report(cfg: PlaneConfig = DEFAULT_CONFIG, p_base=None,
                     **kw) -> MonodromyReport:
    """Permutations along the five cross-cap generator loops.

    The base surface is a projective plane blown up at four points, i.e. a
    connected sum of five cross-caps, so its fundamental group is generated
    by the four exceptional-core loops and one pseudo-line through
    infinity.  The covering is connected iff the permutations act
    transitively on the five arc slots."""
    if p_base is None:
        p_base = _default_base(cfg)
    loops = []
    d = point_d_direct(cfg)
    for name, q in (("core_0", 0.0), ("core_1", 1.0), ("core_a", cfg.a),
                    ("core_d", d)):
        loops.append((name, exceptional_core_loop(q, cfg, p_base=p_base)))
    loops.append(("pseudo_line_infinity", infinity_loop(cfg, p_base=p_base)))
    perms = []
    flips = []
    for name, path in loops:
        perm, rev = loop_permutation(path, cfg, **kw)
        perms.append(perm)
        flips.append(rev)
    return MonodromyReport(
        base_point=complex(p_base),
        loop_names=[n for n, _ in loops],
        permutations=perms,
        orientation_reversing=flips,
        transitive=perms_transitive(perms),
    )


# ---------------------------------------------------------------------------
# boundary circles: the pinched arc once around every coincidence locus


def _locus_value_path(locus: CoincidenceLocus, cfg: PlaneConfig):
    """A closed path of values along a coincidence locus (all ten kinds)."""
    if locus.kind == "exceptional_divisor":
        q = locus.divisor_point

        def path(s):
            return exceptional_value(q, s * np.pi, cfg, check_limit=False)

        return path
    if locus.kind == "line_at_infinity":

        def path(s):
            e = RP1Dir.from_pair(np.cos(s * np.pi), np.sin(s * np.pi))
            return _infinity_value(e, cfg)

        return path
    curve = locus.curves[0]
    pts = list(curve.points)
    blowups = _blowup_points(cfg)

    def project(p):
        p = newton_project_to_locus(locus.pair, p, cfg)
        if min(abs(p - q) for q in blowups) < 1e-9:
            p += 3e-9  # nudge off an exact base point
        return p

    if curve.closed:
        pts.append(pts[0])
        lens = [abs(pts[i + 1] - pts[i]) for i in range(len(pts) - 1)]
        cum = np.concatenate([[0.0], np.cumsum(lens)])
        cum /= cum[-1]

        def path(s):
            s = min(max(s, 0.0), 1.0)
            i = min(int(np.searchsorted(cum, s, side="right") - 1), len(pts) - 2)
            f = (s - cum[i]) / (cum[i + 1] - cum[i])
            p = project(pts[i] + f * (pts[i + 1] - pts[i]))
            return _affine_value_raw(p, cfg)

        return path
    # open polyline: a projective line; close through the infinity chart
    p_start, p_end = pts[0], pts[-1]
    dir_out = (p_end - pts[-4]) / abs(p_end - pts[-4])
    e = two_arg(dir_out)
    lens = [abs(pts[i + 1] - pts[i]) for i in range(len(pts) - 1)]
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    cum /= cum[-1]

    def path(s):
        s = min(max(s, 0.0), 1.0)
        if s <= 0.7:  # traverse the affine polyline
            ss = s / 0.7
            i = min(int(np.searchsorted(cum, ss, side="right") - 1), len(pts) - 2)
            f = (ss - cum[i]) / (cum[i + 1] - cum[i])
            p = project(pts[i] + f * (pts[i + 1] - pts[i]))
            return _affine_value_raw(p, cfg)
        if s >= 1.0 - 1e-12:
            p = project(p_start)
            return _affine_value_raw(p, cfg)
        # ride out beyond p_end, through infinity, back into p_start
        ss = (s - 0.7) / 0.3
        if ss < 0.5:
            t = np.tan(np.pi * ss)
            if not np.isfinite(t) or t > 1e7:
                return _infinity_value(e, cfg)
            p = project(p_end + 3.0 * t * dir_out)
            return _affine_value_raw(p, cfg)
        if abs(ss - 0.5) < 1e-12:
            return _infinity_value(e, cfg)
        t = np.tan(np.pi * (1.0 - ss))
        if not np.isfinite(t) or t > 1e7:
            return _infinity_value(e, cfg)
        p = project(p_start - 3.0 * t * dir_out)
        return _affine_value_raw(p, cfg)

    return path


@dataclass
class BoundaryLapResult:
    pair: tuple
    closed_in_one_lap: bool
    pinch_maintained: bool
    max_pinch_separation: float
    max_value_jump: float


def boundary_circle_lap(locus: CoincidenceLocus, cfg: PlaneConfig = DEFAULT_CONFIG,
                        init_step: float = 1.0 / 400.0,
                        jump_cap: float = 0.05) -> BoundaryLapResult:
    """Track the pinched (degenerate) arc once around a coincidence locus.

    Walks the closed path of values adaptively (refining wherever the value
    moves more than ``jump_cap`` between samples, which validates genuine
    continuity through base points and the infinity seam), verifies that the
    designated section pair stays merged at every accepted sample, and that
    the lap closes on its starting value."""
    path = _locus_value_path(locus, cfg)
    nm1, nm2 = locus.pair

    def pinch_sep(c):
        marked = fiber_model(c, cfg).marked_points()
        return marked[nm1].chordal(marked[nm2])

    s = 0.0
    step = init_step
    c_prev = path(0.0)
    c_start = c_prev
    max_sep = pinch_sep(c_prev)
    max_jump = 0.0
    while s < 1.0 - 1e-15:
        s_next = min(1.0, s + step)
        c = path(s_next)
        jump = c_prev.dist(c)
        if jump > jump_cap and step > 1e-7:
            step *= 0.5
            continue
        max_jump = max(max_jump, jump)
        max_sep = max(max_sep, pinch_sep(c))
        c_prev = c
        s = s_next
        step = min(init_step, step * 2.0)
    pinch_ok = max_sep < 1e-5
    closed = c_start.dist(c_prev) < 1e-6 and max_jump <= jump_cap + 1e-12
    return BoundaryLapResult(
        pair=locus.pair, closed_in_one_lap=bool(closed and pinch_ok),
        pinch_maintained=bool(pinch_ok), max_pinch_separation=float(max_sep),
        max_value_jump=float(max_jump),
    )


# ---------------------------------------------------------------------------
# arc statistics


def arc_count_survey(cfg: PlaneConfig = DEFAULT_CONFIG, loci=None, scan=None,
                     n_generic: int = 1000, seed: int | None = None):
    """Observed arc counts per stratum of the critical-value surface.

    Returns {"generic": {...}, "on_locus": {...}, "at_crossing": {...}} with
    counts of the number of fiber arcs observed in each stratum."""
    from collections import Counter

    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    if loci is None:
        loci = trace_coincidence_loci(cfg)
    if scan is None:
        scan = triple_coincidence_scan(cfg, loci=loci)
    blowups = _blowup_points(cfg)
    R = cfg.box_radius
    generic = Counter()
    got = 0
    while got < n_generic:
        p = complex(rng.uniform(-R, R), rng.uniform(-R, R))
        if min(abs(p - q) for q in blowups) < 10 * cfg.tol.base_exclusion:
            continue
        c = _affine_value_raw(p, cfg)
        arcs = [a for a in _arcs_of(c, cfg)]
        generic[len(arcs)] += 1
        got += 1
    on_locus = Counter()
    for key, locus in loci.items():
        path = _locus_value_path(locus, cfg)
        for s in np.linspace(0.05, 0.95, 25):
            c = path(float(s))
            if locus.kind == "affine_trace":
                p = _phi_point(c, cfg)
                if p is not None and (
                    min(abs(p - q) for q in blowups) < 0.05
                    or any(abs(p - v[0]) < 0.05 for v in scan.vertices)
                ):
                    continue
            on_locus[len(_arcs_of(c, cfg))] += 1
    at_crossing = Counter()
    for p, k1, k2 in scan.vertices:
        c = _affine_value_raw(p, cfg)
        at_crossing[len(_arcs_of(c, cfg))] += 1
    # crossings of the affine line loci with the line at infinity
    for key, locus in loci.items():
        if locus.kind != "affine_trace" or locus.curves[0].closed:
            continue
        pts = locus.curves[0].points
        dir_out = (pts[-1] - pts[-4]) / abs(pts[-1] - pts[-4])
        c = _infinity_value(two_arg(dir_out), cfg)
        at_crossing[len(_arcs_of(c, cfg))] += 1
    return {"generic": dict(generic), "on_locus": dict(on_locus),
            "at_crossing": dict(at_crossing)}


def _arcs_of(c: RolledValue, cfg: PlaneConfig):
    from .fibers import fiber_arcs

    return fiber_arcs(c, cfg)


def _phi_point(c: RolledValue, cfg: PlaneConfig):
    from .critical import concurrency_lines_point
    from .projective import NotConcurrent

    try:
        pt = concurrency_lines_point(c, cfg)
    except NotConcurrent:
        return None
    if pt.is_infinite():
        return None
    return pt.affine


# ---------------------------------------------------------------------------
# arrangement Euler characteristic on the sphere double cover


@dataclass
class ArrangementReport:
    V: int
    E: int
    F: int
    euler: int
    sphere_check: int        # V_s - E_s + F_s (must be 2)
    antipodal_free: bool


def _fit_circle(locus: CoincidenceLocus):
    pts = [z for c in locus.curves for z in c.points]
    sub = pts[:: max(1, len(pts) // 60)]
    conic, resid = fit_conic([RP2Point.from_affine(z) for z in sub])
    center, radius = circle_center_radius(conic)
    return center, radius, resid


def _fit_line(locus: CoincidenceLocus):
    pts = np.concatenate([c.points for c in locus.curves])
    zc = pts.mean()
    u = pts - zc
    M = np.array([[np.sum(u.real * u.real), np.sum(u.real * u.imag)],
                  [np.sum(u.real * u.imag), np.sum(u.imag * u.imag)]])
    w, v = np.linalg.eigh(M)
    direction = complex(v[0, 1], v[1, 1])  # dominant direction
    p1 = RP2Point.from_affine(zc)
    p2 = RP2Point.from_affine(zc + direction)
    return line_through(p1, p2), zc, direction


def _unit(v):
    return v / np.linalg.norm(v)


def arrangement_euler(cfg: PlaneConfig = DEFAULT_CONFIG, loci=None, scan=None):
    """V - E + F of the traced curve arrangement on the projective plane.

    The arrangement consists of the six affine coincidence curves (three
    circles, three lines) and the line at infinity.  Faces are counted on
    the sphere double cover: every curve is lifted (circles twice, lines to
    great circles), the rotation system at each lifted vertex orders the
    half-edges by tangent angle, faces are traced as orbits, and the count
    is halved after checking that the antipodal action is free and the
    sphere satisfies V - E + F = 2."""
    if loci is None:
        loci = trace_coincidence_loci(cfg)
    if scan is None:
        scan = triple_coincidence_scan(cfg, loci=loci)
    d = point_d_direct(cfg)
    base = {"0": 0.0 + 0.0j, "1": 1.0 + 0.0j, "a": cfg.a, "d": d}

    circles = {}
    lines = {}
    for key, locus in loci.items():
        if locus.kind != "affine_trace":
            continue
        if locus.curves[0].closed:
            center, radius, resid = _fit_circle(locus)
            circles[key] = (center, radius)
        else:
            L, anchor, direction = _fit_line(locus)
            lines[key] = (L, anchor, direction)
    if len(circles) != 3 or len(lines) != 3:
        raise OpenCurve("expected 3 circle and 3 line coincidence traces")

    # --- vertices ---------------------------------------------------------
    verts = {}  # name -> unit vector on S^2 (the + lift)
    for name, z in base.items():
        verts[name] = _unit(np.array([z.real, z.imag, 1.0]))
    for idx, (p, k1, k2) in enumerate(scan.vertices):
        verts[f"x{idx}"] = _unit(np.array([p.real, p.imag, 1.0]))
    for key, (L, anchor, direction) in lines.items():
        e = direction / abs(direction)
        verts[f"w:{'-'.join(key)}"] = _unit(np.array([e.real, e.imag, 0.0]))
    V = len(verts)

    # --- curves on the sphere ---------------------------------------------
    # each entry: (id, kind, data); kind "circle_lift" sign +-1 or "great"
    curves = []
    for key, (center, radius) in circles.items():
        for sign in (+1, -1):
            curves.append((f"K:{'-'.join(key)}:{sign:+d}", "circle", (center, radius, sign)))
    for key, (L, anchor, direction) in lines.items():
        f1, f2 = _great_frame(L.vec)
        curves.append((f"L:{'-'.join(key)}", "great", (f1, f2)))
    f1, f2 = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    curves.append(("Linf", "great", (f1, f2)))

    def circle_point(data, phi):
        center, radius, sign = data
        z = center + radius * np.exp(1j * phi)
        return sign * _unit(np.array([z.real, z.imag, 1.0]))

    def great_point(data, phi):
        f1, f2 = data
        return np.cos(phi) * f1 + np.sin(phi) * f2

    def curve_point(kind, data, phi):
        return circle_point(data, phi) if kind == "circle" else great_point(data, phi)

    def curve_tangent(kind, data, phi):
        h = 1e-6
        t = (curve_point(kind, data, phi + h) - curve_point(kind, data, phi - h)) / (2 * h)
        return _unit(t)

    # vertex lifts: (name, sign) -> vector
    vlift = {}
    for name, v in verts.items():
        vlift[(name, +1)] = v
        vlift[(name, -1)] = -v

    if len(scan.vertices) != 3:
        raise OpenCurve(
            f"expected 3 disjoint-pair crossings, found {len(scan.vertices)}"
        )

    # incidence: for each sphere curve, find the vertex lifts on it
    on_curve = {}
    for cid, kind, data in curves:
        hits = []
        for (name, sign), v in vlift.items():
            phi = _param_on_curve(kind, data, v)
            if phi is None:
                continue
            hits.append(((name, sign), phi))
        expected = {"circle": 4, "great": 8}[kind] if cid != "Linf" else 6
        if len(hits) != expected:
            raise OpenCurve(
                f"curve {cid} carries {len(hits)} vertices, expected {expected}"
            )
        hits.sort(key=lambda t: t[1])
        on_curve[cid] = hits

    # --- edges and darts ---------------------------------------------------
    # edge: (cid, i) between hits[i] and hits[i+1] (cyclic); darts both ways
    darts = {}  # dart id -> (tail vertex-lift, head vertex-lift, cid, phi_range)
    edge_count = 0
    for cid, kind, data in curves:
        hits = on_curve[cid]
        m = len(hits)
        for i in range(m):
            (va, pa) = hits[i]
            (vb, pb) = hits[(i + 1) % m]
            span = (pb - pa) % (2.0 * np.pi)
            if span < 1e-12:
                span = 2.0 * np.pi
            darts[(cid, i, +1)] = (va, vb, cid, (pa, pa + span))
            darts[(cid, i, -1)] = (vb, va, cid, (pa + span, pa))
            edge_count += 1
    E_s = edge_count

    # --- rotation system ---------------------------------------------------
    kinds = {cid: (kind, data) for cid, kind, data in curves}
    at_vertex = {}
    for did, (tail, head, cid, (p0, p1)) in darts.items():
        at_vertex.setdefault(tail, []).append(did)

    def dart_dir(did):
        tail, head, cid, (p0, p1) = darts[did]
        kind, data = kinds[cid]
        t = curve_tangent(kind, data, p0 % (2.0 * np.pi))
        if p1 < p0:
            t = -t
        u = vlift[tail]
        t = t - np.dot(t, u) * u
        return _unit(t)

    rotation = {}
    for vkey, dids in at_vertex.items():
        u = vlift[vkey]
        b1 = _unit(np.cross(u, [1.0, 0.2, 0.1] if abs(u[0]) < 0.9 else [0.1, 1.0, 0.2]))
        b2 = np.cross(u, b1)
        angs = []
        for did in dids:
            t = dart_dir(did)
            angs.append((np.arctan2(np.dot(t, b2), np.dot(t, b1)), did))
        angs.sort()
        order = [did for _, did in angs]
        rotation[vkey] = {
            order[i]: order[(i + 1) % len(order)] for i in range(len(order))
        }

    def twin(did):
        cid, i, s = did
        return (cid, i, -s)

    # face tracing: next dart = rotation successor of the twin at its tail
    unused = set(darts.keys())
    faces = []
    while unused:
        d0 = next(iter(unused))
        face = []
        d = d0
        while True:
            face.append(d)
            unused.discard(d)
            t = twin(d)
            d = rotation[darts[t][0]][t]
            if d == d0:
                break
            if len(face) > 4 * len(darts):
                raise OpenCurve("face tracing failed to close")
        faces.append(face)
    F_s = len(faces)
    V_s = len(vlift)
    sphere_check = V_s - E_s + F_s

    # antipodal freeness on faces
    def dart_antipode(did):
        cid, i, s = did
        kind, data = kinds[cid]
        if kind == "circle":
            center, radius, sign = data
            atip = f"{cid[:-2]}{-sign:+d}"
            return (atip, i, s)
        # great circles are self-antipodal: the lifted vertex pairs flip
        tail, head, c2, (p0, p1) = darts[did]
        hits = on_curve[cid]
        m = len(hits)
        # the antipodal edge connects the antipodal lifts; find its index
        ta = (tail[0], -tail[1])
        ha = (head[0], -head[1])
        for j in range(m):
            va, _ = hits[j]
            vb, _ = hits[(j + 1) % m]
            if s == +1 and va == ta and vb == ha:
                return (cid, j, +1)
            if s == -1 and va == ha and vb == ta:
                return (cid, j, -1)
        raise OpenCurve("antipodal edge not found on great circle")

    face_of = {}
    for fi, face in enumerate(faces):
        for d in face:
            face_of[d] = fi
    # the antipodal map reverses orientation, so the image of the face to
    # the left of a dart is the face to the left of the *twin* of its
    # antipodal dart; the induced face pairing must be a free involution
    amap = {}
    for fi, face in enumerate(faces):
        amap[fi] = face_of[twin(dart_antipode(face[0]))]
    free = all(amap[fi] != fi for fi in amap) and all(
        amap[amap[fi]] == fi for fi in amap
    )
    F = F_s // 2
    E = E_s // 2
    return ArrangementReport(
        V=V, E=E, F=F, euler=V - E + F,
        sphere_check=int(sphere_check), antipodal_free=bool(free),
    )


def _great_frame(lvec):
    """Orthonormal basis of the plane of the great circle {l . x = 0}."""
    n = _unit(np.asarray(lvec, dtype=float))
    seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    f1 = _unit(seed - np.dot(seed, n) * n)
    f2 = np.cross(n, f1)
    return f1, f2


def _param_on_curve(kind, data, v, tol=2e-5):
    """Parameter of the sphere point v on the curve, or None if off it."""
    if kind == "great":
        f1, f2 = data
        n = np.cross(f1, f2)
        if abs(np.dot(n, v)) > tol:
            return None
        return float(np.arctan2(np.dot(v, f2), np.dot(v, f1)) % (2.0 * np.pi))
    center, radius, sign = data
    if sign * v[2] <= 1e-12:
        return None  # wrong hemisphere for this lift
    z = complex(v[0] / v[2], v[1] / v[2])
    if abs(abs(z - center) - radius) > tol * 50 * (1.0 + abs(z)):
        return None
    return float(np.angle(z - center) % (2.0 * np.pi))


# ---------------------------------------------------------------------------
# covering report


@dataclass
class CoveringReport:
    degree: int
    connected: bool
    chi_base: int
    chi_cover: int
    boundary_circles: int
    arrangement: ArrangementReport
    arc_counts: dict
    monodromy: MonodromyReport
    boundary_laps: list


def covering_report(cfg: PlaneConfig = DEFAULT_CONFIG, loci=None, scan=None,
                    n_samples: int = 1000) -> CoveringReport:
    """Aggregate topology verification of the five-fold covering.

    degree = generic arc count; connectivity from monodromy transitivity;
    chi of the base surface is structural (projective plane blown up at the
    four base points: 1 - 4 = -3) with the arrangement Euler count as a
    consistency gate; chi of the cover is 5 * (-3) = -15, cross-checked
    against 1 - 16; boundary circles counted by pinched-arc laps."""
    if loci is None:
        loci = trace_coincidence_loci(cfg)
    if scan is None:
        scan = triple_coincidence_scan(cfg, loci=loci)
    counts = arc_count_survey(cfg, loci=loci, scan=scan, n_generic=n_samples)
    generic_counts = counts["generic"]
    degree = max(generic_counts, key=generic_counts.get)
    mono = monodromy_report(cfg)
    laps = [boundary_circle_lap(loc, cfg) for loc in loci.values()]
    n_closed = sum(1 for lap in laps if lap.closed_in_one_lap)
    arr = arrangement_euler(cfg, loci=loci, scan=scan)
    chi_base = 1 - 4
    chi_cover = degree * chi_base
    return CoveringReport(
        degree=int(degree), connected=mono.transitive, chi_base=chi_base,
        chi_cover=chi_cover, boundary_circles=n_closed, arrangement=arr,
        arc_counts=counts, monodromy=mono, boundary_laps=laps,
    )

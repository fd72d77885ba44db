"""Coincidence loci, monodromy, boundary circles, and the Euler count."""

import numpy as np

from coamoeba_atlas import topology
from coamoeba_atlas.critical import _affine_value_raw, point_d_direct
from coamoeba_atlas.projective import circumcircle

BASE_P = complex(-1.5, -1.0)

# crossings of disjoint coincidence-locus pairs (default config); the third
# one is p = k exactly, which follows from the gauge identities at k
CROSSINGS_FROZEN = (
    0.32682926829268316 + 1.1414634146341467j,
    1.8810810810810816 - 0.8864864864864871j,
    0.45 + 0.85j,
)

MONODROMY_FROZEN = {
    "core_0": (1, 0, 4, 3, 2),
    "core_1": (3, 2, 1, 0, 4),
    "core_a": (1, 0, 4, 3, 2),
    "core_d": (2, 1, 0, 4, 3),
    "pseudo_line_infinity": (3, 2, 1, 0, 4),
}


def test_ten_loci_inventory(cfg, loci):
    assert len(loci) == 10
    kinds = {}
    for loc in loci.values():
        kinds[loc.kind] = kinds.get(loc.kind, 0) + 1
    assert kinds == {
        "affine_trace": 6,
        "exceptional_divisor": 3,
        "line_at_infinity": 1,
    }
    divisors = sorted(
        (loc.divisor_point for loc in loci.values()
         if loc.kind == "exceptional_divisor"),
        key=lambda z: (z.real, z.imag),
    )
    assert np.allclose(divisors, sorted([0.0, 1.0, cfg.a],
                                        key=lambda z: (z.real, z.imag)))
    for loc in loci.values():
        assert loc.closed
        assert loc.component_count == 1


def test_circle_loci_are_circumcircles(cfg, loci):
    """Closed form: the three closed affine loci are the circumcircles of
    (1, a, d), (0, a, d) and (0, 1, d)."""
    d = point_d_direct(cfg)
    oracle = {
        ("inf", "z1"): (1.0, cfg.a, d),
        ("inf", "z3"): (0.0, cfg.a, d),
        ("inf", "z4"): (0.0, 1.0, d),
    }
    for pair, triple in oracle.items():
        loc = loci[pair]
        assert loc.closed and not loc.is_structural
        C = circumcircle(*triple)
        res = max(abs(C.eval_affine(p)) for p in loc.curves[0].points[::5])
        assert res < 1e-9


def test_line_loci_pass_through_base_points(cfg, loci):
    d = point_d_direct(cfg)
    oracle = {
        ("z1", "z3"): (cfg.a, d),
        ("z1", "z4"): (1.0, d),
        ("z3", "z4"): (0.0, d),
    }
    for pair, (u, v) in oracle.items():
        loc = loci[pair]
        w = v - u
        res = max(
            abs(((p - u) * np.conj(w)).imag) / abs(w)
            for curve in loc.curves
            for p in curve.points[::5]
        )
        assert res < 1e-9


def test_scan_no_triples_three_crossings(cfg, scan):
    assert scan.triples == []
    assert len(scan.vertices) == 3
    got = [v[0] for v in scan.vertices]
    for want in CROSSINGS_FROZEN:
        assert min(abs(g - want) for g in got) < 1e-6
    # the p = k crossing is exact
    assert min(abs(g - cfg.k) for g in got) < 1e-9


def test_blowup_tangents_separated(scan):
    assert len(scan.tangent_report) == 4
    for q, rep in scan.tangent_report.items():
        assert len(rep["pairs"]) >= 2
        assert rep["min_separation"] > 0.15


def test_cyclic_order_frozen(cfg):
    order = topology.cyclic_order(_affine_value_raw(BASE_P, cfg), cfg)
    assert order == (("inf",), ("z4",), ("z3",), ("z1",), ("z2",))


def test_monodromy_frozen_permutations(cfg):
    rep = topology.monodromy_report(cfg)
    assert rep.base_point == BASE_P
    assert rep.loop_names == list(MONODROMY_FROZEN)
    for name, perm, rev in zip(rep.loop_names, rep.permutations,
                               rep.orientation_reversing):
        assert perm == MONODROMY_FROZEN[name], name
        assert rev, name  # every generator is a cross-cap loop
        # each is an involution fixing exactly one slot
        assert sorted(perm) == [0, 1, 2, 3, 4]
        square = tuple(perm[perm[j]] for j in range(5))
        assert square == (0, 1, 2, 3, 4)
        assert sum(1 for j in range(5) if perm[j] == j) == 1
    assert rep.transitive


def test_core_loop_with_divisor_sweep_is_trivial(cfg):
    """Inserting a full divisor sweep makes the loop homotopic to the
    square of the generator, hence the identity permutation."""
    path = topology.exceptional_core_loop(0.0, cfg, sweep_turns=1)
    perm, reversed_ = topology.loop_permutation(path, cfg)
    assert perm == (0, 1, 2, 3, 4)
    assert not reversed_


def test_contractible_loop_is_trivial(cfg):
    th = np.linspace(0.0, 2 * np.pi, 9)
    waypoints = [BASE_P + 0.2 * np.exp(1j * t) for t in th]
    path = topology._affine_path_values(waypoints, cfg)
    perm, reversed_ = topology.loop_permutation(path, cfg)
    assert perm == (0, 1, 2, 3, 4)
    assert not reversed_


def test_boundary_circles_close_in_one_lap(cfg, loci):
    for pair in sorted(loci):
        lap = topology.boundary_circle_lap(loci[pair], cfg)
        assert lap.closed_in_one_lap, pair
        assert lap.pinch_maintained, pair
        assert lap.max_pinch_separation < 1e-5, pair


def test_arc_count_survey_strata(cfg, loci, scan):
    survey = topology.arc_count_survey(cfg, loci=loci, scan=scan,
                                       n_generic=80)
    assert set(survey["generic"]) == {5}
    assert set(survey["on_locus"]) == {4}
    assert set(survey["at_crossing"]) == {3}


def test_arrangement_euler_frozen(cfg, loci, scan):
    arr = topology.arrangement_euler(cfg, loci=loci, scan=scan)
    assert (arr.V, arr.E, arr.F) == (10, 27, 18)
    assert arr.euler == 1
    assert arr.sphere_check == 2
    assert arr.antipodal_free


def test_covering_report_aggregate(cfg, loci, scan):
    rep = topology.covering_report(cfg, loci=loci, scan=scan, n_samples=60)
    assert rep.degree == 5
    assert rep.connected
    assert rep.chi_base == -3
    assert rep.chi_cover == -15 == 1 - 16
    assert rep.boundary_circles == 10

"""The plane, its maps, and the criticality determinant."""

import numpy as np
import pytest

from coamoeba_atlas.plane import (
    DEFAULT_CONFIG,
    OffTorus,
    PlaneConfig,
    TorusPoint,
    crit_det,
    grad_crit_det,
    in_torus,
    jacobian_oracle_batch,
    maps,
    random_torus_points,
    sample_critical_points,
    validate_config,
    z_coords,
)

CFG = DEFAULT_CONFIG


def test_z_coords_values():
    z = z_coords(2.0 + 1.0j, -0.5 + 0.25j, CFG)
    assert z.shape == (4,)
    assert z[0] == 2.0 + 1.0j
    assert z[1] == -0.5 + 0.25j
    assert abs(z[2] - (2.0 + 1.0j - 0.5 + 0.25j - 1.0)) < 1e-15
    assert abs(z[3] - (2.0 + 1.0j + CFG.k * (-0.5 + 0.25j) - CFG.a)) < 1e-15


def test_maps_against_direct_formulas():
    rng = np.random.default_rng(21)
    xs, ys = random_torus_points(200, CFG, rng, margin=1e-3)
    for x, y in zip(xs, ys):
        pt = TorusPoint(complex(x), complex(y))
        amoeba, rolled, arg = maps(pt, CFG)
        z = pt.zs(CFG)
        assert np.allclose(amoeba, np.log(np.abs(z)), atol=1e-13)
        assert np.allclose(arg, np.angle(z) % (2 * np.pi), atol=1e-13)
        for dj, zj in zip(rolled, z):
            assert abs((dj.theta - np.angle(zj)) % np.pi) < 1e-10 or \
                abs((dj.theta - np.angle(zj)) % np.pi - np.pi) < 1e-10


def test_maps_off_torus_raises():
    # x + y = 1 puts the third coordinate on a hyperplane
    with pytest.raises(OffTorus):
        maps(TorusPoint(0.25 + 0.5j, 0.75 - 0.5j), CFG)


def test_in_torus_vectorized():
    x = np.array([1.0 + 1.0j, 0.25 + 0.5j])
    y = np.array([2.0 - 1.0j, 0.75 - 0.5j])
    flags = in_torus(x, y, CFG)
    assert flags.tolist() == [True, False]


def test_crit_det_sign_matches_fd_jacobian():
    """The determinant's sign is the finite-difference Jacobian's sign.

    crit_det equals the FD determinant times prod |z_j|^2 > 0, so the signs
    must agree wherever the FD value is clear of discretization noise.
    """
    rng = np.random.default_rng(22)
    x, y = random_torus_points(2000, CFG, rng, margin=1e-2)
    d = crit_det(x, y, CFG)
    scale = np.prod(np.abs(z_coords(x, y, CFG)), axis=0) ** 2
    fd = jacobian_oracle_batch(x, y, CFG)
    clear = np.abs(fd) > 1e-6
    assert np.count_nonzero(clear) > 1500
    assert np.all(np.sign(d[clear]) == np.sign(fd[clear]))
    # and the rescaled determinant matches the FD value, not only its sign
    assert np.max(np.abs(d[clear] / scale[clear] - fd[clear])) < 1e-6


def test_grad_crit_det_matches_fd_gradient():
    rng = np.random.default_rng(23)
    h = 1e-6
    xs, ys = random_torus_points(60, CFG, rng, margin=1e-2)
    for x, y in zip(xs, ys):
        g = grad_crit_det(TorusPoint(complex(x), complex(y)), CFG)
        fd = np.empty(4)
        for i, (dx, dy) in enumerate(
            [(h, 0.0), (1j * h, 0.0), (0.0, h), (0.0, 1j * h)]
        ):
            fp = crit_det(x + dx, y + dy, CFG)
            fm = crit_det(x - dx, y - dy, CFG)
            fd[i] = (fp - fm) / (2 * h)
        scale = max(1.0, float(np.linalg.norm(fd)))
        assert np.linalg.norm(g - fd) / scale < 1e-6


def test_sample_critical_points_on_locus():
    pts = sample_critical_points(150, CFG, seed=77)
    assert len(pts) == 150
    for pt in pts:
        assert abs(crit_det(pt.x, pt.y, CFG)) < 1e-8
        assert bool(in_torus(pt.x, pt.y, CFG))


def test_sample_critical_points_deterministic():
    a = sample_critical_points(25, CFG, seed=5)
    b = sample_critical_points(25, CFG, seed=5)
    assert all(p.x == q.x and p.y == q.y for p, q in zip(a, b))


def test_random_torus_points_margin():
    rng = np.random.default_rng(24)
    for margin in (1e-3, 0.05, 0.2):
        x, y = random_torus_points(500, CFG, rng, margin=margin)
        z = z_coords(x, y, CFG)
        assert float(np.min(np.abs(z))) > margin
        assert np.max(np.abs(x.real)) <= CFG.box_radius


def test_validate_config_default_passes():
    rep = validate_config(CFG.a, CFG.k)
    assert rep.ok, rep.failed()


@pytest.mark.parametrize(
    "a, k, bad",
    [
        (1.6 + 1.2j, 0.5, "Im k != 0"),
        (2.0, 0.45 + 0.85j, "Im a != 0"),
        (0.45 + 0.85j, 0.45 + 0.85j, "a != k"),
        (1.6 + 1.2j, 1.0, "k != 1"),
        (1.6 + 1.2j, 1e-9j, "k != 0"),
    ],
)
def test_validate_config_rejects(a, k, bad):
    rep = validate_config(a, k)
    assert not rep.ok
    assert bad in rep.failed()


def test_config_json_roundtrip():
    cfg = PlaneConfig(a=2.0 + 0.5j, k=-0.3 + 1.1j, seed=9)
    back = PlaneConfig.from_json(cfg.to_json())
    assert back == cfg


def test_rng_streams_reproducible():
    a = CFG.rng(5).uniform(size=8)
    b = CFG.rng(5).uniform(size=8)
    c = CFG.rng(6).uniform(size=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

import numpy as np
import pytest

import poinlab as pl
from poinlab.errors import MapDomainError, ValidationError

# frozen from a 50-digit evaluation of the defining formulas
T_05_01 = 1.0145951353580870
T_08_03 = 1.0211577090678618
H_05_01 = (0.5072975676790435, 0.05147016443461474)
HINV_05_01 = (0.47343207647399934, 0.1893728305895997)
RET_HALF = (0.2536487838395217, 0.025735082217307372)


def test_t_on_axis_is_one():
    for x in (1e-6, 0.25, 0.5, 1.0):
        assert pl.cusp_t(x, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_t_frozen_values():
    assert float(pl.cusp_t(0.5, 0.1)) == pytest.approx(T_05_01, abs=1e-14)
    assert float(pl.cusp_t(0.8, 0.3)) == pytest.approx(T_08_03, abs=1e-14)


def test_t_bounded_and_at_least_one():
    cmap = pl.paper_cusp_map()
    pts = pl.sample_cone(cmap, 20_000, seed=1)
    t = pl.cusp_t(pts[:, 0], pts[:, 1])
    assert np.all(t >= 1.0 - 1e-12)
    assert t.max() < 1.3


def test_t_derivative_times_x_bounded():
    # |dt| <= C / x on the cone, so x * |dt| stays bounded
    cmap = pl.paper_cusp_map()
    pts = pl.sample_cone(cmap, 5000, seed=2)
    pts = pts[pts[:, 0] > 1e-3]
    step = 1e-7
    tx = (pl.cusp_t(pts[:, 0] + step, pts[:, 1]) -
          pl.cusp_t(pts[:, 0] - step, pts[:, 1])) / (2 * step)
    ty = (pl.cusp_t(pts[:, 0], pts[:, 1] + step) -
          pl.cusp_t(pts[:, 0], pts[:, 1] - step)) / (2 * step)
    bound = (np.hypot(tx, ty) * pts[:, 0]).max()
    assert bound < 10.0


def test_H_axis_fixed_and_frozen_value():
    np.testing.assert_allclose(pl.cusp_H((0.7, 0.0)), (0.7, 0.0), atol=1e-15)
    np.testing.assert_allclose(pl.cusp_H((0.5, 0.1)), H_05_01, atol=1e-14)


def test_H_preserves_distance():
    q = pl.cusp_H((0.8, 0.3))
    assert np.hypot(*q) == pytest.approx(np.hypot(0.8, 0.3), abs=1e-13)
    cmap = pl.paper_cusp_map()
    pts = pl.sample_cone(cmap, 100_000, seed=3)
    img = pl.cusp_H(pts)
    err = np.abs(np.hypot(img[:, 0], img[:, 1]) - np.hypot(pts[:, 0], pts[:, 1]))
    assert err.max() <= 1e-12


def test_H_image_in_cusp():
    cmap = pl.paper_cusp_map()
    pts = pl.sample_cone(cmap, 50_000, seed=4)
    img = pl.cusp_H(pts)
    assert np.all(np.abs(img[:, 1]) <= img[:, 0] ** 2 + 1e-12)


def test_H_inv_frozen_and_roundtrips():
    np.testing.assert_allclose(pl.cusp_H_inv((0.6, 0.0)), (0.6, 0.0), atol=1e-15)
    np.testing.assert_allclose(pl.cusp_H_inv(H_05_01), (0.5, 0.1), atol=1e-12)
    np.testing.assert_allclose(pl.cusp_H_inv((0.5, 0.1)), HINV_05_01, atol=1e-14)
    cmap = pl.paper_cusp_map()
    pts = pl.sample_cone(cmap, 10_000, seed=5)
    back = pl.cusp_H_inv(pl.cusp_H(pts))
    assert np.hypot(*(back - pts).T).max() <= 1e-10
    img = pl.cusp_H(pts)
    fwd = pl.cusp_H(pl.cusp_H_inv(img))
    assert np.hypot(*(fwd - img).T).max() <= 1e-10


def test_domain_errors():
    with pytest.raises(MapDomainError):
        pl.cusp_t(-0.1, 0.0)
    with pytest.raises(MapDomainError):
        pl.cusp_H((0.2, 0.19))          # |y| ||q|| > x^2: outside the cone
    with pytest.raises(MapDomainError):
        pl.cusp_H_inv((0.5, 0.3))       # |b| > a^2
    with pytest.raises(MapDomainError):
        pl.cusp_H_inv((-0.5, 0.1))


def test_power_map_examples():
    np.testing.assert_allclose(pl.power_map((0.5, 0.5), 2), (0.5, 0.25), atol=1e-15)
    np.testing.assert_allclose(
        pl.power_map((0.5, 0.25), 2, "inverse"), (0.5, 0.5), atol=1e-15)
    t = 0.3
    np.testing.assert_allclose(pl.power_map((t, t), 3), (t, t ** 3), atol=1e-15)
    with pytest.raises(MapDomainError):
        pl.power_map((-0.5, 0.1), 2)
    with pytest.raises(ValidationError):
        pl.power_map((0.5, 0.1), 2, "sideways")


def test_power_map_roundtrip():
    cmap = pl.power_cusp_map(3)
    pts = pl.sample_cone(cmap, 5000, seed=6)
    back = cmap.inverse(cmap.forward(pts))
    assert np.hypot(*(back - pts).T).max() <= 1e-12


def test_retraction_endpoints_and_scaling():
    cmap = pl.paper_cusp_map()
    q = np.array([0.5, 0.1])
    np.testing.assert_allclose(pl.retraction(cmap, 1.0, q), q, atol=1e-12)
    np.testing.assert_allclose(pl.retraction(cmap, 0.0, q), (0.0, 0.0), atol=0)
    r = pl.retraction(cmap, 0.5, q)
    np.testing.assert_allclose(r, RET_HALF, atol=1e-13)
    assert r @ r == pytest.approx(0.26 / 4, abs=1e-14)
    pts = pl.cusp_H(pl.sample_cone(cmap, 2000, seed=7))
    for s in (0.1, 0.3, 0.7, 0.9):
        img = pl.retraction(cmap, s, pts)
        err = np.abs(np.hypot(img[:, 0], img[:, 1]) - s * np.hypot(pts[:, 0], pts[:, 1]))
        assert err.max() <= 1e-10
    with pytest.raises(ValidationError):
        pl.retraction(cmap, 1.5, q)
    with pytest.raises(ValidationError):
        pl.retraction(cmap, -0.1, q)


def test_lipschitz_estimate_calibration():
    rng = np.random.default_rng(8)
    pts = rng.random((500, 2)) * 0.5 + 0.25
    ident = pl.lipschitz_estimate(lambda q: q, pts, step=1e-6)
    assert ident == pytest.approx(1.0, abs=1e-9)
    doubling = pl.lipschitz_estimate(lambda q: 2 * q, pts, step=1e-6)
    assert doubling == pytest.approx(2.0, abs=1e-9)


def test_lipschitz_power_cone_bound():
    cmap = pl.power_cusp_map(2)
    pts = pl.sample_cone(cmap, 2000, seed=9)
    L = pl.lipschitz_estimate(cmap.forward, pts, step=1e-6, inside=cmap.in_cone)
    assert L <= 2.5


def test_lipschitz_all_pairs_skipped():
    cmap = pl.paper_cusp_map()
    pts = np.array([[0.5, 0.2], [0.6, 0.3]])   # outside the image region
    with pytest.raises(pl.EstimationError):
        pl.lipschitz_estimate(cmap.forward, pts, step=1e-6,
                              inside=cmap.in_cone)


def test_certify_conic_report():
    rep = pl.certify_conic(n=20_000, seed=0)
    assert rep["distance_error_max"] <= 1e-12
    assert rep["roundtrip_error_max"] <= 1e-10
    assert rep["lipschitz_ratio_spread"] <= 10.0

import numpy as np
import pytest

import poinlab as pl
from poinlab.errors import MapDomainError, ValidationError


def _ring(center, radius, n=64):
    ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return center + radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)


SUPPORTED = [
    ("unit_square", {}),
    ("rectangle", {}),
    ("disk", {}),
    ("power_cusp", {"k": 2}),
    ("power_cusp", {"k": 3}),
    ("dumbbell", {"delta": 0.2}),
    ("rooms_passages", {"delta": 0.2}),
]


@pytest.mark.parametrize("name,params", SUPPORTED)
def test_contract_family_contract(name, params):
    dom = pl.instantiate(name, **params)
    h = pl.build_homotopy(dom)
    pts = pl.sample_interior(dom, 300, seed=1).points
    # h_0 is the identity
    np.testing.assert_allclose(pl.homotopy_h(h, 0.0, pts), pts, atol=1e-12)
    # B(z, alpha) sits inside the domain
    assert pl.boundary_distance(dom, h.z) > h.alpha
    assert np.all(pl.contains(dom, _ring(h.z, h.alpha * 0.999)))
    # h_1 lands inside B(z, alpha)
    end = pl.homotopy_h(h, 1.0, pts)
    dist = np.hypot(end[:, 0] - h.z[0], end[:, 1] - h.z[1])
    assert dist.max() <= h.alpha * (1 + 1e-9)
    # intermediate times stay inside the domain
    for s in (0.25, 0.5, 0.75):
        img = pl.homotopy_h(h, s, pts)
        assert np.all(pl.contains_closure(dom, img, tol=1e-9))
    assert 0 < h.mu < 1
    assert np.isfinite(h.lambda_bound) and h.lambda_bound > 0


def test_unit_square_affine_formula():
    dom = pl.instantiate("unit_square")
    h = pl.build_homotopy(dom, mu=0.8)
    np.testing.assert_allclose(h.z, (0.5, 0.5), atol=0)
    assert h.alpha == pytest.approx(0.25)
    np.testing.assert_allclose(
        pl.homotopy_h(h, 1.0, np.array([0.0, 0.0])), (0.4, 0.4), atol=1e-15)
    # affine determinant (1 - mu s)^2
    pts = pl.sample_interior(dom, 50, seed=2).points
    for s in (0.0, 0.3, 1.0):
        det = pl.homotopy_jac_det(h, s, pts)
        np.testing.assert_allclose(det, (1 - 0.8 * s) ** 2, atol=1e-14)
    assert h.lambda_bound == pytest.approx(25.0, rel=1e-12)


def test_cusp_explicit_center_matches_catalog_example():
    dom = pl.instantiate("power_cusp", k=2)
    h = pl.build_homotopy(dom, center=(0.5, 0.0))
    np.testing.assert_allclose(h.z, (0.5, 0.0), atol=0)
    assert h.alpha == pytest.approx(0.5 * pl.boundary_distance(dom, (0.5, 0.0)))
    pts = pl.sample_interior(dom, 1000, seed=3).points
    end = pl.homotopy_h(h, 1.0, pts)
    dist = np.hypot(end[:, 0] - 0.5, end[:, 1])
    assert dist.max() <= h.alpha * (1 + 1e-9)


def test_homotopy_velocity_affine():
    dom = pl.instantiate("unit_square")
    h = pl.build_homotopy(dom, mu=0.8)
    p = np.array([0.1, 0.2])
    for s in (0.0, 0.4, 1.0):
        np.testing.assert_allclose(
            pl.homotopy_velocity(h, s, p), 0.8 * (h.z - p), atol=1e-14)


def test_homotopy_argument_errors():
    dom = pl.instantiate("unit_square")
    h = pl.build_homotopy(dom)
    with pytest.raises(MapDomainError):
        pl.homotopy_h(h, 0.5, np.array([2.0, 2.0]))
    with pytest.raises(ValidationError):
        pl.homotopy_h(h, 1.5, np.array([0.5, 0.5]))
    with pytest.raises(ValidationError):
        pl.build_homotopy(dom, mu=1.5)
    with pytest.raises(ValidationError):
        pl.build_homotopy(dom, center=(2.0, 2.0))


def test_disconnected_domain_rejected():
    with pytest.raises(ValidationError):
        pl.build_homotopy(pl.instantiate("two_squares_disjoint"))


def test_glued_center_override_rejected():
    with pytest.raises(ValidationError):
        pl.build_homotopy(pl.instantiate("dumbbell"), center=(0.5, 0.5))
    with pytest.raises(ValidationError):
        pl.build_homotopy(pl.instantiate("dumbbell"), mu=0.8)


def test_glued_jacobian_piecewise_constant():
    dom = pl.instantiate("dumbbell", delta=0.2)
    h = pl.build_homotopy(dom)
    pts = pl.sample_interior(dom, 200, seed=4).points
    det_half = pl.homotopy_jac_det(h, 0.5, pts)
    det_one = pl.homotopy_jac_det(h, 1.0, pts)
    np.testing.assert_allclose(det_half, det_one, atol=1e-14)
    mus = sorted({round(1 - np.sqrt(d), 10) for d in det_one})
    assert len(mus) <= len(h.pieces)


def test_mu_is_minimal_for_reach():
    # smaller contraction factors must fail the ball containment
    dom = pl.instantiate("unit_square")
    h = pl.build_homotopy(dom)
    with pytest.raises(ValidationError):
        pl.build_homotopy(dom, mu=max(0.05, h.mu - 0.2))

"""Explicit conic-structure maps for the planar cusp, with empirical checks.

Two homeomorphisms between the straight cone over the cusp link and the
cusp itself are provided: a distance-preserving map built from the radial
factor ``cusp_t``, and the simpler shear family ``power_map`` that trades
distance preservation for bi-Lipschitz bounds.  Both come with closed-form
inverses and a scaling retraction onto the vertex.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EstimationError, MapDomainError, ValidationError

TIP_EXCLUSION = 1e-8
_MEMBERSHIP_RTOL = 1e-12


def _pts(point):
    p = np.asarray(point, dtype=float)
    scalar = p.ndim == 1
    return np.atleast_2d(p), scalar


def _ret(p, scalar):
    return p[0] if scalar else p


def cusp_t(x, y):
    """Radial stretch factor of the distance-preserving cusp map.

    Equals 1 on the x axis and stays bounded on the cone over the cusp
    link.  Raises MapDomainError for x <= 0 (the vertex ray is excluded).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0):
        raise MapDomainError("cusp_t requires x > 0")
    x2 = x * x
    y2 = y * y
    num = 2 * x2 + 2 * y2
    den = x2 + np.sqrt(x2 * x2 + 4 * x2 * y2 * (x2 + y2))
    return np.sqrt(num / den)


def in_cusp_cone(point, tol: float = _MEMBERSHIP_RTOL):
    """Membership in the cone over the unit-sphere link of ``|y| <= x**2``.

    A point q belongs iff ||q|| <= 1 and ||q|| * |y| <= x**2, i.e. its ray
    meets the sphere inside the cusp.
    """
    p, scalar = _pts(point)
    x, y = p[:, 0], p[:, 1]
    r = np.hypot(x, y)
    ok = (x > 0) & (r <= 1 + tol) & (r * np.abs(y) <= x * x * (1 + tol) + 1e-300)
    return bool(ok[0]) if scalar else ok


def in_cusp_region(point, tol: float = _MEMBERSHIP_RTOL):
    """Membership in the closed unit-ball part of the cusp ``|y| <= x**2``."""
    p, scalar = _pts(point)
    a, b = p[:, 0], p[:, 1]
    r = np.hypot(a, b)
    ok = (a > 0) & (r <= 1 + tol) & (np.abs(b) <= a * a * (1 + tol) + 1e-300)
    return bool(ok[0]) if scalar else ok


def cusp_H(point):
    """Distance-preserving homeomorphism from the cone onto the cusp."""
    p, scalar = _pts(point)
    if not np.all(in_cusp_cone(p)):
        raise MapDomainError("point outside the cone over the cusp link")
    x, y = p[:, 0], p[:, 1]
    t = cusp_t(x, y)
    out = np.stack([t * x, t * t * x * y], axis=1)
    return _ret(out, scalar)


def cusp_H_inv(point):
    """Closed-form inverse of ``cusp_H`` on the cusp region.

    Derived from distance preservation: with (a, b) = H(x, y) one has
    x**2 + y**2 = a**2 + b**2 and y = b x / a**2, which solves to
    x = a**2 sqrt((a**2 + b**2) / (a**4 + b**2)).
    """
    p, scalar = _pts(point)
    a, b = p[:, 0], p[:, 1]
    if np.any(a <= 0):
        raise MapDomainError("cusp_H_inv requires a > 0")
    if not np.all(np.abs(b) <= a * a * (1 + _MEMBERSHIP_RTOL) + 1e-300):
        raise MapDomainError("point outside the cusp |b| <= a**2")
    a2 = a * a
    x = a2 * np.sqrt((a2 + b * b) / (a2 * a2 + b * b))
    y = b * x / a2
    out = np.stack([x, y], axis=1)
    return _ret(out, scalar)


def power_map(point, k: float, direction: str = "forward"):
    """Shear P_k(x, y) = (x, x**(k-1) y) between the cone |y| <= x and the
    cusp |y| <= x**k, or its inverse (a, b) -> (a, b / a**(k-1))."""
    if direction not in ("forward", "inverse"):
        raise ValidationError(f"direction must be forward or inverse, got {direction!r}")
    p, scalar = _pts(point)
    u, v = p[:, 0], p[:, 1]
    if np.any(u <= 0):
        raise MapDomainError("power_map requires a positive first coordinate")
    if direction == "forward":
        if np.any(np.abs(v) > u * (1 + _MEMBERSHIP_RTOL)):
            raise MapDomainError("point outside the cone |y| <= x")
        out = np.stack([u, np.power(u, k - 1) * v], axis=1)
    else:
        if np.any(np.abs(v) > np.power(u, k) * (1 + _MEMBERSHIP_RTOL) + 1e-300):
            raise MapDomainError("point outside the cusp |b| <= a**k")
        out = np.stack([u, v / np.power(u, k - 1)], axis=1)
    return _ret(out, scalar)


@dataclass(frozen=True)
class ConicMap:
    """A cone-to-region homeomorphism with vertex, radius and inverse."""

    kind: str
    vertex: tuple[float, float]
    radius: float
    forward: Callable
    inverse: Callable
    in_cone: Callable
    in_image: Callable
    k: float | None = None


def paper_cusp_map() -> ConicMap:
    """The distance-preserving cusp map with vertex at the origin."""
    return ConicMap(
        kind="paper_cusp", vertex=(0.0, 0.0), radius=1.0,
        forward=cusp_H, inverse=cusp_H_inv,
        in_cone=in_cusp_cone, in_image=in_cusp_region)


def power_cusp_map(k: float) -> ConicMap:
    """The shear map P_k as a ConicMap between {|y|<=x<=1} and {|y|<=x**k}."""
    if k < 1.0:
        raise ValidationError(f"power map exponent must be >= 1, got {k}")

    def fwd(point):
        return power_map(point, k, "forward")

    def inv(point):
        return power_map(point, k, "inverse")

    def cone(point, tol=_MEMBERSHIP_RTOL):
        p, scalar = _pts(point)
        x, y = p[:, 0], p[:, 1]
        ok = (x > 0) & (x <= 1 + tol) & (np.abs(y) <= x * (1 + tol))
        return bool(ok[0]) if scalar else ok

    def image(point, tol=_MEMBERSHIP_RTOL):
        p, scalar = _pts(point)
        a, b = p[:, 0], p[:, 1]
        ok = (a > 0) & (a <= 1 + tol) & (np.abs(b) <= np.power(a, k) * (1 + tol) + 1e-300)
        return bool(ok[0]) if scalar else ok

    return ConicMap(kind="power_simplified", vertex=(0.0, 0.0), radius=1.0,
                    forward=fwd, inverse=inv, in_cone=cone, in_image=image, k=k)


def retraction(cmap: ConicMap, s: float, point):
    """Deformation retraction r(s, q) = H(s * H^{-1}(q) + (1 - s) * vertex)."""
    if not (0.0 <= s <= 1.0):
        raise ValidationError(f"retraction parameter s must lie in [0, 1], got {s}")
    p, scalar = _pts(point)
    v = np.asarray(cmap.vertex, dtype=float)
    if s == 0.0:
        out = np.broadcast_to(v, p.shape).copy()
        return _ret(out, scalar)
    pre = cmap.inverse(p)
    out = cmap.forward(v + s * (pre - v))
    return _ret(out, scalar)


def sample_cone(cmap: ConicMap, n: int, seed: int = 0) -> np.ndarray:
    """Deterministic interior samples of the map's cone, tip excluded."""
    rng = np.random.default_rng(seed)
    out = np.empty((0, 2))
    while len(out) < n:
        pts = rng.random((4 * n, 2))
        if cmap.kind == "paper_cusp":
            # ray direction on the link, then a radius along the ray
            smax = (np.sqrt(5) - 1) / 2
            sin = (2 * pts[:, 0] - 1) * smax
            cos = np.sqrt(1 - sin ** 2)
            keep = np.abs(sin) <= cos ** 2
            r = np.maximum(pts[:, 1], TIP_EXCLUSION * 2)
            cand = np.stack([r * cos, r * sin], axis=1)[keep]
        else:
            x = np.maximum(pts[:, 0], TIP_EXCLUSION * 2)
            cand = np.stack([x, (2 * pts[:, 1] - 1) * x], axis=1)
        cand = cand[cand[:, 0] >= TIP_EXCLUSION]
        out = np.concatenate([out, cand], axis=0)
    return out[:n]


def _jacobian_fd(f, pts: np.ndarray, step: float, inside=None):
    """Central-difference Jacobians of a planar map at sample points.

    Sample points whose stencil leaves ``inside`` are dropped.  Returns the
    (m, 2, 2) stack of Jacobians for the surviving points.
    """
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    stencil = [pts + ex, pts - ex, pts + ey, pts - ey]
    keep = np.ones(len(pts), dtype=bool)
    if inside is not None:
        for q in stencil:
            keep &= np.asarray(inside(q), dtype=bool)
    if not keep.any():
        raise EstimationError("all difference stencils left the map's domain")
    vals = [f(q[keep]) for q in stencil]
    dx = (vals[0] - vals[1]) / (2 * step)
    dy = (vals[2] - vals[3]) / (2 * step)
    return np.stack([dx, dy], axis=2)


def _opnorm2x2(J: np.ndarray) -> np.ndarray:
    """Spectral norm of a stack of 2x2 matrices, closed form."""
    a, b = J[:, 0, 0], J[:, 0, 1]
    c, d = J[:, 1, 0], J[:, 1, 1]
    q = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = np.sqrt(np.maximum(q * q - 4 * det * det, 0.0))
    return np.sqrt(np.maximum((q + disc) / 2, 0.0))


def lipschitz_estimate(f, region_samples, step: float, inside=None) -> float:
    """Empirical lower bound on a Lipschitz constant from sampled stencils.

    Takes the largest spectral norm of central-difference Jacobians over
    the sample points; stencils that exit ``inside`` are skipped.
    """
    pts = np.atleast_2d(np.asarray(
        region_samples.points if hasattr(region_samples, "points") else region_samples,
        dtype=float))
    J = _jacobian_fd(f, pts, step, inside=inside)
    return float(_opnorm2x2(J).max())


def certify_conic(n: int = 100_000, seed: int = 0,
                  s_grid=None, lipschitz_samples: int = 400) -> dict:
    """Sampled certification of the cusp map's metric contract.

    Reports the worst distance-preservation error, the worst roundtrip
    error of both compositions, and the spread of the retraction's
    Lipschitz estimate divided by s across an s grid.
    """
    cmap = paper_cusp_map()
    pts = sample_cone(cmap, n, seed)
    img = cusp_H(pts)
    dist_err = float(np.abs(np.hypot(img[:, 0], img[:, 1]) -
                            np.hypot(pts[:, 0], pts[:, 1])).max())
    back = cusp_H_inv(img)
    err1 = np.hypot(*(back - pts).T).max()
    region = img[:min(n, 10_000)]
    fwd = cusp_H(cusp_H_inv(region))
    err2 = np.hypot(*(fwd - region).T).max()
    roundtrip = float(max(err1, err2))

    if s_grid is None:
        s_grid = np.round(np.arange(0.1, 1.0001, 0.1), 12)
    lip_pts = img[:lipschitz_samples]
    ratios = []
    for s in s_grid:
        L = lipschitz_estimate(lambda q, s=s: retraction(cmap, s, q),
                               lip_pts, step=1e-6, inside=cmap.in_image)
        ratios.append(L / s)
    ratios = np.asarray(ratios)
    return {
        "distance_error_max": dist_err,
        "roundtrip_error_max": roundtrip,
        "lipschitz_ratio_spread": float(ratios.max() / ratios.min()),
    }

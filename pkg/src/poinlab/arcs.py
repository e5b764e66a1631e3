"""Bounded-velocity arcs joining any two points of a domain.

The arc gamma_{x,y} runs the contraction of x forward for a third of its
time, interpolates linearly inside the common ball for the middle third,
and runs the contraction of y backward for the last third.  Velocities
and slice-map Jacobians are available per segment, and the measured
constants (C_gamma, eta, lambda) feed the constructive Poincare bound.
"""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, replace

import numpy as np

from .domains import DomainSpec, sample_interior, signed_boundary_dist
from .errors import DegeneracyError, MapDomainError, ValidationError
from .homotopy import (Homotopy, _apply, _require_inside, build_homotopy,
                       homotopy_jac_det, homotopy_velocity)

ArcConstants = namedtuple("ArcConstants", ["c_gamma", "eta", "lam"])

_JUNCTIONS = (1.0 / 3.0, 2.0 / 3.0)
_FD_STEP = 1e-6


@dataclass(frozen=True)
class ArcFamily:
    """Arc family over a domain, with measured constants once estimated."""

    domain: DomainSpec
    homotopy: Homotopy
    M: int
    c_gamma: float | None = None
    eta: float | None = None
    lam: float | None = None
    n_pairs: int | None = None
    seed: int | None = None

    def with_constants(self, consts: ArcConstants, n_pairs: int, seed: int) -> "ArcFamily":
        return replace(self, c_gamma=consts.c_gamma, eta=consts.eta,
                       lam=consts.lam, n_pairs=n_pairs, seed=seed)


def build_arc_family(domain: DomainSpec, mu: float | None = None,
                     center=None, seed: int = 0) -> ArcFamily:
    """Construct the arc family on top of the domain's contraction."""
    h = build_homotopy(domain, mu=mu, center=center, seed=seed)
    return ArcFamily(domain=domain, homotopy=h, M=h.multiplicity)


def _xy_stacks(x, y):
    X = np.asarray(x, dtype=float)
    Y = np.asarray(y, dtype=float)
    scalar = X.ndim == 1 and Y.ndim == 1
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    if len(X) != len(Y):
        n = max(len(X), len(Y))
        X = np.broadcast_to(X, (n, 2)).copy() if len(X) == 1 else X
        Y = np.broadcast_to(Y, (n, 2)).copy() if len(Y) == 1 else Y
    return X, Y, scalar


def arc_point(arcs: ArcFamily, x, y, s):
    """Point gamma_{x,y}(s); endpoints are x at s=0 and y at s=1."""
    X, Y, scalar = _xy_stacks(x, y)
    h = arcs.homotopy
    _require_inside(h, X, "arc endpoint x")
    _require_inside(h, Y, "arc endpoint y")
    sig = np.broadcast_to(np.atleast_1d(np.asarray(s, dtype=float)), (len(X),)) * 3.0
    if np.any(sig < -1e-12) or np.any(sig > 3.0 + 1e-12):
        raise ValidationError("arc parameter s must lie in [0, 1]")
    sig = np.clip(sig, 0.0, 3.0)
    out = np.empty_like(X)
    m1 = sig <= 1.0
    m2 = (sig > 1.0) & (sig <= 2.0)
    m3 = sig > 2.0
    if m1.any():
        out[m1] = _apply(h, sig[m1], X[m1])
    if m2.any():
        hx = _apply(h, np.ones(m2.sum()), X[m2])
        hy = _apply(h, np.ones(m2.sum()), Y[m2])
        w = (sig[m2] - 1.0)[:, None]
        out[m2] = (1.0 - w) * hx + w * hy
    if m3.any():
        out[m3] = _apply(h, 3.0 - sig[m3], Y[m3])
    return out[0] if scalar else out


def arc_velocity(arcs: ArcFamily, x, y, s):
    """One-sided derivative of gamma_{x,y} in s (segment junctions use the
    left branch)."""
    X, Y, scalar = _xy_stacks(x, y)
    h = arcs.homotopy
    sig = np.broadcast_to(np.atleast_1d(np.asarray(s, dtype=float)), (len(X),)) * 3.0
    sig = np.clip(sig, 0.0, 3.0)
    out = np.empty_like(X)
    m1 = sig <= 1.0
    m2 = (sig > 1.0) & (sig <= 2.0)
    m3 = sig > 2.0
    if m1.any():
        out[m1] = 3.0 * homotopy_velocity(h, sig[m1], X[m1])
    if m2.any():
        hx = _apply(h, np.ones(m2.sum()), X[m2])
        hy = _apply(h, np.ones(m2.sum()), Y[m2])
        out[m2] = 3.0 * (hy - hx)
    if m3.any():
        out[m3] = -3.0 * homotopy_velocity(h, 3.0 - sig[m3], Y[m3])
    return out[0] if scalar else out


def _slice_jac_fd(h: Homotopy, s_h, pts, step=_FD_STEP):
    """Central-difference |det| of x -> h_{s_h}(x); the chart formulas
    extend smoothly past the boundary, so stencils may leave the domain."""
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    s_h = np.broadcast_to(np.atleast_1d(s_h), (len(pts),))
    fxp = _apply(h, s_h, pts + ex)
    fxm = _apply(h, s_h, pts - ex)
    fyp = _apply(h, s_h, pts + ey)
    fym = _apply(h, s_h, pts - ey)
    dx = (fxp - fxm) / (2 * step)
    dy = (fyp - fym) / (2 * step)
    return np.abs(dx[:, 0] * dy[:, 1] - dx[:, 1] * dy[:, 0])


def _homotopy_slice_jac(h: Homotopy, s_h, pts):
    """|det d_x h_s|: analytic for affine constructions, central
    differences for the conjugated cusp chart."""
    if h.kind == "chart" and h.chart.name == "power":
        return _slice_jac_fd(h, s_h, pts)
    return homotopy_jac_det(h, s_h, pts)


def arc_jacobian(arcs: ArcFamily, s, x, y, variable: str = "x"):
    """|det| of the slice map x -> gamma_{x,y}(s) or y -> gamma_{x,y}(s)."""
    if variable not in ("x", "y"):
        raise ValidationError(f"variable must be 'x' or 'y', got {variable!r}")
    X, Y, scalar = _xy_stacks(x, y)
    h = arcs.homotopy
    sig = np.broadcast_to(np.atleast_1d(np.asarray(s, dtype=float)), (len(X),)) * 3.0
    sig = np.clip(sig, 0.0, 3.0)
    out = np.zeros(len(X))
    if variable == "x":
        m1 = sig <= 1.0
        m2 = (sig > 1.0) & (sig <= 2.0)
        if m1.any():
            out[m1] = _homotopy_slice_jac(h, sig[m1], X[m1])
        if m2.any():
            out[m2] = (2.0 - sig[m2]) ** 2 * _homotopy_slice_jac(
                h, np.ones(m2.sum()), X[m2])
    else:
        m2 = (sig > 1.0) & (sig <= 2.0)
        m3 = sig > 2.0
        if m2.any():
            out[m2] = (sig[m2] - 1.0) ** 2 * _homotopy_slice_jac(
                h, np.ones(m2.sum()), Y[m2])
        if m3.any():
            out[m3] = _homotopy_slice_jac(h, 3.0 - sig[m3], Y[m3])
    return float(out[0]) if scalar else out


def _candidate_points(domain: DomainSpec, n: int, seed: int):
    """Interior samples plus closure grid nodes (extremes live on the
    boundary, so corner nodes sharpen the sampled sup/inf)."""
    pts = sample_interior(domain, n, seed).points
    (x0, x1), (y0, y1) = domain.bbox
    spacing = max(x1 - x0, y1 - y0) / 32
    gx = np.arange(x0, x1 + spacing / 2, spacing)
    gy = np.arange(y0, y1 + spacing / 2, spacing)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    nodes = np.stack([X.ravel(), Y.ravel()], axis=1)
    nodes = nodes[signed_boundary_dist(domain, nodes) >= -1e-9]
    if domain.name == "power_cusp":
        nodes = nodes[nodes[:, 0] > 1e-6]
    return pts, nodes


def _grid_s(s_grid: int) -> np.ndarray:
    s = np.linspace(0.0, 1.0, s_grid)
    keep = np.ones(len(s), dtype=bool)
    for j in _JUNCTIONS:
        keep &= np.abs(s - j) > 1e-9
    return s[keep]


def estimate_constants(arcs: ArcFamily, n_pairs: int = 1000,
                       s_grid: int = 21, seed: int = 0) -> ArcConstants:
    """Measure (C_gamma, eta, lambda) by sampling pairs and an s grid.

    C_gamma is the sampled supremum of the arc speed, eta the sampled
    infimum of the x-slice Jacobian on s in [0, 1/2] and of the y-slice
    Jacobian on s in [1/2, 1], lambda the sampled supremum of the inverse
    contraction Jacobian.  Junction parameters are excluded.
    """
    if n_pairs < 100:
        raise ValidationError(f"n_pairs must be >= 100, got {n_pairs}")
    h = arcs.homotopy
    domain = arcs.domain
    interior, nodes = _candidate_points(domain, n_pairs, seed)
    pool = np.concatenate([interior, nodes], axis=0)
    svals = _grid_s(s_grid)

    # segment 1/3 speed: 3 ||d_s h_sigma|| over the pool
    c_gamma = 0.0
    for s in svals[svals <= 1.0 / 3.0 + 1e-12]:
        v = homotopy_velocity(h, np.full(len(pool), 3.0 * s), pool)
        c_gamma = max(c_gamma, 3.0 * float(np.hypot(v[:, 0], v[:, 1]).max()))
    # segment 2 speed: 3 ||h_1(x) - h_1(y)||; extremes sit on the image of
    # the boundary, so the closure nodes (listed first) carry the diameter
    sub = np.concatenate([nodes, interior[:800]], axis=0)
    h1 = _apply(h, np.ones(len(sub)), sub)
    diff = h1[:, None, :] - h1[None, :, :]
    c_gamma = max(c_gamma, 3.0 * float(np.sqrt((diff ** 2).sum(axis=2)).max()))

    # Jacobian floors on the matching halves (exact chain-rule determinants)
    eta = np.inf
    dets1 = homotopy_jac_det(h, np.ones(len(pool)), pool)
    for s in svals:
        sig = 3.0 * s
        if s <= 0.5 + 1e-12:
            if sig <= 1.0:
                vals = homotopy_jac_det(h, np.full(len(pool), sig), pool)
            else:
                vals = (2.0 - sig) ** 2 * dets1
            eta = min(eta, float(vals.min()))
        if s >= 0.5 - 1e-12:
            sig = 3.0 * s
            if sig <= 2.0:
                vals = (sig - 1.0) ** 2 * dets1
            else:
                vals = homotopy_jac_det(h, np.full(len(pool), 3.0 - sig), pool)
            eta = min(eta, float(vals.min()))
    if not np.isfinite(eta) or eta <= 1e-14:
        raise DegeneracyError(
            f"slice Jacobian floor degenerated on {domain.name}: eta={eta}")

    lam = 0.0
    for s in np.linspace(0.0, 1.0, s_grid):
        det = homotopy_jac_det(h, np.full(len(interior), s), interior)
        lam = max(lam, float((1.0 / np.maximum(det, 1e-300)).max()))

    return ArcConstants(c_gamma=c_gamma, eta=eta, lam=lam)


def measure_arc_family(domain: DomainSpec, mu: float | None = None,
                       center=None, n_pairs: int = 1000, s_grid: int = 21,
                       seed: int = 0) -> ArcFamily:
    """Build an arc family and populate its measured constants."""
    arcs = build_arc_family(domain, mu=mu, center=center, seed=seed)
    consts = estimate_constants(arcs, n_pairs=n_pairs, s_grid=s_grid, seed=seed)
    return arcs.with_constants(consts, n_pairs=n_pairs, seed=seed)


def injectivity_spot_check(arcs: ArcFamily, n: int = 400, seed: int = 0,
                           resolution: float = 1e-6) -> bool:
    """Sample for collisions of h_s within each injectivity cell.

    Distinct sources mapping within ``resolution`` of each other while
    sitting further apart than the local contraction allows would
    invalidate the multiplicity bound M.
    """
    h = arcs.homotopy
    pts = sample_interior(arcs.domain, n, seed).points
    for s in (0.25, 0.5, 0.75, 1.0):
        img = _apply(h, np.full(len(pts), s), pts)
        if h.kind == "glued":
            from .homotopy import _piece_index
            groups = _piece_index(h, pts)
        else:
            groups = np.zeros(len(pts), dtype=int)
        for g in np.unique(groups):
            sel = groups == g
            P, Q = pts[sel], img[sel]
            d_src = np.sqrt(((P[:, None, :] - P[None, :, :]) ** 2).sum(axis=2))
            d_img = np.sqrt(((Q[:, None, :] - Q[None, :, :]) ** 2).sum(axis=2))
            collide = (d_img < resolution) & (d_src > 100 * resolution)
            if collide.any():
                return False
    return True

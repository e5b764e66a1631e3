"""Contraction families h_s pulling a domain into a small interior ball.

Two constructions cover the catalog:

* chart conjugation: h_s = phi^{-1} o c_s o phi with c_s an affine
  contraction of a convex chart image (identity chart for convex domains,
  the power-map chart for cusps);
* glued contract-then-transport: on domains made of overlapping convex
  pieces (dumbbell, rooms and passages), each piece is first contracted
  into a small ball and the ball is then carried along a corridor path to
  the common center.  The glued map is continuous in s for every fixed
  point, which is all the arc construction needs.

Both give h_0 = id, h_1(domain) inside B(z, alpha), and almost-everywhere
invertible differentials with measured bounds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import DomainSpec, boundary_distance, contains_closure, sample_interior
from .errors import MapDomainError, ValidationError

_CLOSURE_TOL = 1e-9
_TIP_FLOOR = 1e-7


# ---------------------------------------------------------------------------
# charts


class IdentityChart:
    name = "identity"

    def to_chart(self, p):
        return np.array(p, dtype=float, copy=True)

    def from_chart(self, q):
        return np.array(q, dtype=float, copy=True)

    def det_to(self, p):
        return np.ones(len(np.atleast_2d(p)))

    def det_from(self, q):
        return np.ones(len(np.atleast_2d(q)))

    def jac_from(self, q):
        m = len(np.atleast_2d(q))
        J = np.zeros((m, 2, 2))
        J[:, 0, 0] = J[:, 1, 1] = 1.0
        return J

    def image_corners(self, domain):
        (x0, x1), (y0, y1) = domain.bbox
        return np.array([[x0, y0], [x0, y1], [x1, y0], [x1, y1]])


class PowerChart:
    """Conjugating chart for the cusp |y| < x**k: the inverse shear maps
    the cusp onto the open convex cone |y| < x < 1."""

    name = "power"

    def __init__(self, k: float):
        self.k = float(k)

    def to_chart(self, p):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        x = np.maximum(p[:, 0], _TIP_FLOOR)
        return np.stack([p[:, 0], p[:, 1] / np.power(x, self.k - 1)], axis=1)

    def from_chart(self, q):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        x = np.maximum(q[:, 0], _TIP_FLOOR)
        return np.stack([q[:, 0], np.power(x, self.k - 1) * q[:, 1]], axis=1)

    def det_to(self, p):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        return np.power(np.maximum(p[:, 0], _TIP_FLOOR), 1.0 - self.k)

    def det_from(self, q):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        return np.power(np.maximum(q[:, 0], _TIP_FLOOR), self.k - 1.0)

    def jac_from(self, q):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        x = np.maximum(q[:, 0], _TIP_FLOOR)
        J = np.zeros((len(q), 2, 2))
        J[:, 0, 0] = 1.0
        J[:, 1, 0] = (self.k - 1.0) * np.power(x, self.k - 2.0) * q[:, 1]
        J[:, 1, 1] = np.power(x, self.k - 1.0)
        return J

    def image_corners(self, domain):
        return np.array([[1.0, 1.0], [1.0, -1.0], [1.0, 0.0], [_TIP_FLOOR, 0.0]])


# ---------------------------------------------------------------------------
# glued pieces


@dataclass(frozen=True)
class GluePiece:
    """One convex piece: its own contraction plus a transport path."""

    rect: tuple[float, float, float, float]
    center: np.ndarray
    mu: float
    radius: float
    waypoints: np.ndarray   # (m, 2), waypoints[0] == center, last == z
    cum_len: np.ndarray     # (m,), cumulative arclength, cum_len[0] == 0


def _polyline(waypoints):
    w = np.asarray(waypoints, dtype=float)
    seg = np.diff(w, axis=0)
    lens = np.hypot(seg[:, 0], seg[:, 1])
    return w, np.concatenate([[0.0], np.cumsum(lens)])


def _path_pos(piece: GluePiece, t):
    """Constant-speed position along the piece's path, t in [0, 1]."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    total = piece.cum_len[-1]
    if total == 0.0:
        return np.repeat(piece.waypoints[-1][None, :], len(t), axis=0)
    s = np.clip(t, 0.0, 1.0) * total
    idx = np.clip(np.searchsorted(piece.cum_len, s, side="right") - 1,
                  0, len(piece.cum_len) - 2)
    w = piece.waypoints
    seg_len = piece.cum_len[idx + 1] - piece.cum_len[idx]
    frac = np.where(seg_len > 0, (s - piece.cum_len[idx]) / np.maximum(seg_len, 1e-300), 0.0)
    return w[idx] + frac[:, None] * (w[idx + 1] - w[idx])


def _path_dir(piece: GluePiece, t):
    """Velocity of the constant-speed path (length * unit direction)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    total = piece.cum_len[-1]
    if total == 0.0:
        return np.zeros((len(t), 2))
    s = np.clip(t, 0.0, 1.0) * total
    idx = np.clip(np.searchsorted(piece.cum_len, s, side="right") - 1,
                  0, len(piece.cum_len) - 2)
    w = piece.waypoints
    seg = w[idx + 1] - w[idx]
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    return total * seg / np.maximum(seg_len, 1e-300)[:, None]


@dataclass(frozen=True)
class Homotopy:
    """The family h_s with its measured invertibility bound."""

    domain: DomainSpec
    z: np.ndarray
    alpha: float
    mu: float
    chart: object | None
    pieces: tuple[GluePiece, ...]
    lambda_bound: float

    @property
    def kind(self) -> str:
        return "glued" if self.chart is None else "chart"

    @property
    def multiplicity(self) -> int:
        return max(1, len(self.pieces))


def _require_inside(h: Homotopy, pts, what="point"):
    ok = contains_closure(h.domain, pts, tol=_CLOSURE_TOL)
    if not np.all(ok):
        raise MapDomainError(f"{what} outside {h.domain.name}")


def _piece_index(h: Homotopy, pts):
    pts = np.atleast_2d(pts)
    idx = -np.ones(len(pts), dtype=int)
    for i, piece in enumerate(h.pieces):
        x0, x1, y0, y1 = piece.rect
        unset = idx < 0
        hit = ((pts[:, 0] >= x0 - _CLOSURE_TOL) & (pts[:, 0] <= x1 + _CLOSURE_TOL) &
               (pts[:, 1] >= y0 - _CLOSURE_TOL) & (pts[:, 1] <= y1 + _CLOSURE_TOL))
        idx[unset & hit] = i
    if np.any(idx < 0):
        raise MapDomainError(f"point not covered by any piece of {h.domain.name}")
    return idx


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < -1e-12) or np.any(s > 1 + 1e-12):
        raise ValidationError("homotopy parameter s must lie in [0, 1]")
    return np.clip(s, 0.0, 1.0)


def homotopy_h(h: Homotopy, s, point):
    """Evaluate h_s at one point or a stack of points; s may be an array."""
    pts = np.asarray(point, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    s = _check_s(s)
    _require_inside(h, pts)
    out = _apply(h, s, pts)
    return out[0] if scalar else out


def _apply(h: Homotopy, s, pts):
    s = np.broadcast_to(np.atleast_1d(s), (len(pts),))
    if h.kind == "chart":
        q = h.chart.to_chart(pts)
        zh = h.chart.to_chart(h.z[None, :])[0]
        f = (1.0 - h.mu * s)[:, None]
        return h.chart.from_chart(f * q + (1 - f) * zh)
    idx = _piece_index(h, pts)
    out = np.empty_like(pts)
    for i, piece in enumerate(h.pieces):
        m = idx == i
        if not m.any():
            continue
        si = s[m]
        tau = piece.mu * np.minimum(2.0 * si, 1.0)[:, None]
        contracted = (1 - tau) * pts[m] + tau * piece.center
        t = np.maximum(2.0 * si - 1.0, 0.0)
        shift = _path_pos(piece, t) - piece.center
        out[m] = contracted + shift
    return out


def homotopy_velocity(h: Homotopy, s, point):
    """One-sided derivative of h_s(x) with respect to s."""
    pts = np.asarray(point, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    s = np.broadcast_to(np.atleast_1d(_check_s(s)), (len(pts),))
    if h.kind == "chart":
        q = h.chart.to_chart(pts)
        zh = h.chart.to_chart(h.z[None, :])[0]
        f = (1.0 - h.mu * s)[:, None]
        cs = f * q + (1 - f) * zh
        J = h.chart.jac_from(cs)
        v = h.mu * (zh - q)
        out = np.einsum("nij,nj->ni", J, v)
    else:
        idx = _piece_index(h, pts)
        out = np.empty_like(pts)
        for i, piece in enumerate(h.pieces):
            m = idx == i
            if not m.any():
                continue
            si = s[m]
            early = si <= 0.5
            vel = np.empty((m.sum(), 2))
            vel[early] = 2.0 * piece.mu * (piece.center - pts[m][early])
            t = np.maximum(2.0 * si[~early] - 1.0, 0.0)
            vel[~early] = 2.0 * _path_dir(piece, t)
            out[m] = vel
    return out[0] if scalar else out


def homotopy_jac_det(h: Homotopy, s, point):
    """|det d_x h_s| at the given points (analytic chain rule)."""
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    s = np.broadcast_to(np.atleast_1d(_check_s(s)), (len(pts),))
    if h.kind == "chart":
        q = h.chart.to_chart(pts)
        zh = h.chart.to_chart(h.z[None, :])[0]
        f = 1.0 - h.mu * s
        cs = f[:, None] * q + (1 - f)[:, None] * zh
        return np.abs(f ** 2 * h.chart.det_from(cs) * h.chart.det_to(pts))
    idx = _piece_index(h, pts)
    out = np.empty(len(pts))
    for i, piece in enumerate(h.pieces):
        m = idx == i
        if not m.any():
            continue
        tau = piece.mu * np.minimum(2.0 * s[m], 1.0)
        out[m] = (1.0 - tau) ** 2
    return out


# ---------------------------------------------------------------------------
# construction


def _deepest_node(domain: DomainSpec, coarse: int = 16):
    (x0, x1), (y0, y1) = domain.bbox
    spacing = max(x1 - x0, y1 - y0) / coarse
    nx = int(round((x1 - x0) / spacing))
    ny = int(round((y1 - y0) / spacing))
    gx = x0 + np.arange(nx + 1) * (x1 - x0) / max(nx, 1)
    gy = y0 + np.arange(ny + 1) * (y1 - y0) / max(ny, 1)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    inside = domain.predicate(pts[:, 0], pts[:, 1])
    pts = pts[inside]
    d = domain.boundary_dist(pts[:, 0], pts[:, 1])
    # lexicographic tie-break: stable argmax after sorting by (x, y)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts, d = pts[order], d[order]
    return pts[int(np.argmax(np.round(d, 12)))]


def _chart_for(domain: DomainSpec):
    if domain.name in ("unit_square", "rectangle", "disk"):
        return IdentityChart()
    if domain.name == "power_cusp":
        return PowerChart(domain.params["k"])
    return None


def _chart_safe_radius(chart, domain, z, alpha):
    """Largest chart-space radius around phi(z) that maps inside B(z, 0.98 alpha)."""
    zh = chart.to_chart(z[None, :])[0]
    if isinstance(chart, IdentityChart):
        return 0.98 * alpha
    ang = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    ring = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    probes = np.concatenate([ring, 0.5 * ring, 0.25 * ring])
    lo, hi = 0.0, 4.0 * alpha
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        q = zh + mid * probes
        in_cone = np.all((q[:, 0] > _TIP_FLOOR) & (q[:, 0] <= 1.0) &
                         (np.abs(q[:, 1]) <= q[:, 0]))
        if in_cone:
            back = chart.from_chart(q)
            ok = np.all(np.hypot(back[:, 0] - z[0], back[:, 1] - z[1]) <= 0.98 * alpha)
        else:
            ok = False
        if ok:
            lo = mid
        else:
            hi = mid
    return lo


def _chart_reach(chart, domain, z, seed=0):
    """Padded supremum of chart-space distance from phi(z) over the domain."""
    zh = chart.to_chart(z[None, :])[0]
    q = np.concatenate([chart.to_chart(sample_interior(domain, 512, seed).points),
                        chart.image_corners(domain)], axis=0)
    return 1.02 * float(np.hypot(q[:, 0] - zh[0], q[:, 1] - zh[1]).max())


_GLUED_FAMILIES = ("dumbbell", "rooms_passages")


def _glue_pieces(domain: DomainSpec, z: np.ndarray, alpha: float):
    delta = domain.params["delta"]
    name = domain.name
    pieces = []
    if name == "dumbbell":
        rects = domain.pieces
        axis_y = 0.5
        specs = [
            (rects[0], np.array([0.5, 0.5]), alpha, [(z[0], axis_y)]),
            (rects[1], np.array([1.25, 0.5]), delta / 2, [(z[0], axis_y)]),
            (rects[2], np.array([2.0, 0.5]), delta / 2, [(z[0], axis_y)]),
        ]
    elif name == "rooms_passages":
        r1, r2, r3, p1, p2 = domain.pieces
        h1, h2 = delta / 4, delta / 8
        specs = [
            (r1, np.array([0.5, 0.5]), alpha, [(z[0], 0.5)]),
            (r2, np.array([1.5, 0.25]), delta / 4, [(1.5, h1), (z[0], h1)]),
            (r3, np.array([2.0, 0.125]), delta / 8, [(2.0, h2), (z[0], h2)]),
            (p1, np.array([1.125, h1]), delta / 4, [(z[0], h1)]),
            (p2, np.array([1.8125, h2]), delta / 8, [(z[0], h2)]),
        ]
    else:
        raise ValidationError(f"no glued construction for {name}")
    for rect, center, clearance, mids in specs:
        x0, x1, y0, y1 = rect
        half_diag = 0.5 * float(np.hypot(x1 - x0, y1 - y0))
        inradius = 0.5 * min(x1 - x0, y1 - y0)
        r = 0.9 * min(clearance, alpha, inradius)
        mu = 1.0 - r / half_diag
        waypoints, cum = _polyline([tuple(center)] + mids + [tuple(z)])
        pieces.append(GluePiece(rect=rect, center=center, mu=mu, radius=r,
                                waypoints=waypoints, cum_len=cum))
    return tuple(pieces)


def _measure_lambda(h: Homotopy, seed: int = 0, n: int = 512, s_grid: int = 21) -> float:
    if h.kind == "glued":
        return float(max(1.0 / (1.0 - p.mu) ** 2 for p in h.pieces))
    pts = sample_interior(h.domain, n, seed).points
    worst = 0.0
    for s in np.linspace(0.0, 1.0, s_grid):
        det = homotopy_jac_det(h, s, pts)
        worst = max(worst, float((1.0 / np.maximum(det, 1e-300)).max()))
    return worst


def _verify_containment(h: Homotopy, seed: int = 0):
    pts = sample_interior(h.domain, 256, seed).points
    for s in np.linspace(0.0, 1.0, 9):
        img = _apply(h, np.full(len(pts), s), pts)
        if not np.all(contains_closure(h.domain, img, tol=1e-9)):
            raise ValidationError(
                f"homotopy image leaves {h.domain.name} at s={s:.3f}")
    end = _apply(h, np.ones(len(pts)), pts)
    dist = np.hypot(end[:, 0] - h.z[0], end[:, 1] - h.z[1])
    if not np.all(dist <= h.alpha * (1 + 1e-9)):
        raise ValidationError(
            f"h_1 image not inside B(z, alpha) for {h.domain.name}: "
            f"worst {dist.max():.6f} vs alpha {h.alpha:.6f}")


def build_homotopy(domain: DomainSpec, mu: float | None = None,
                   center=None, seed: int = 0) -> Homotopy:
    """Construct the contraction family for a catalog domain.

    The center z defaults to the deepest grid node (distance-transform
    argmax on a 16-node-per-axis grid, lexicographic ties), alpha is half
    its boundary distance, and mu is the smallest contraction placing
    h_1(domain) inside B(z, alpha), from the chart image's reach.
    """
    if domain.name == "two_squares_disjoint":
        raise ValidationError("no contraction family: domain is disconnected")
    glued = domain.name in _GLUED_FAMILIES
    if center is None:
        z = np.asarray(_deepest_node(domain), dtype=float)
    else:
        if glued:
            raise ValidationError("custom center not supported for glued domains")
        z = np.asarray(center, dtype=float)
        if not bool(domain.predicate(z[0:1], z[1:2])[0]):
            raise ValidationError(f"center {tuple(z)} is not inside {domain.name}")
    alpha = 0.5 * boundary_distance(domain, z)
    if alpha <= 0:
        raise ValidationError("center has no interior clearance")

    if glued:
        if mu is not None:
            raise ValidationError("explicit mu not supported for glued domains")
        pieces = _glue_pieces(domain, z, alpha)
        h = Homotopy(domain=domain, z=z, alpha=alpha,
                     mu=max(p.mu for p in pieces), chart=None,
                     pieces=pieces, lambda_bound=0.0)
    else:
        chart = _chart_for(domain)
        if mu is None:
            a_hat = _chart_safe_radius(chart, domain, z, alpha)
            reach = _chart_reach(chart, domain, z, seed)
            mu = float(min(max(1.0 - a_hat / reach, 0.05), 0.995))
        if not (0.0 < mu < 1.0):
            raise ValidationError(f"mu must lie in (0, 1), got {mu}")
        h = Homotopy(domain=domain, z=z, alpha=alpha, mu=float(mu),
                     chart=chart, pieces=(), lambda_bound=0.0)
    _verify_containment(h, seed)
    lam = _measure_lambda(h, seed)
    return Homotopy(domain=h.domain, z=h.z, alpha=h.alpha, mu=h.mu,
                    chart=h.chart, pieces=h.pieces, lambda_bound=lam)

"""Catalog of bounded connected open planar domains with singular boundaries.

Every domain is an open set given by strict inequalities, so boundary
points test as outside.  Each family also knows its exact distance to the
boundary, which the homotopy construction uses to place interior balls.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage

from .errors import CatalogError, DegenerateDomainError, ResolutionError, ValidationError

BBox = tuple[tuple[float, float], tuple[float, float]]

_MC_SEED = 2024
_MC_COUNT = 200_000
_SAMPLE_BATCH = 8192
_MIN_ACCEPT_RATE = 1e-4


@dataclass(frozen=True)
class DomainSpec:
    """A planar domain: membership predicate plus exact geometric metadata.

    The predicate and the boundary-distance callback are vectorized over
    arrays of x and y coordinates.  ``area_stderr`` is zero when the area
    is analytic and carries the Monte Carlo standard error otherwise.
    """

    name: str
    params: dict
    bbox: BBox
    area: float
    area_stderr: float
    predicate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    boundary_dist: Callable[[np.ndarray, np.ndarray], np.ndarray]
    pieces: tuple = ()
    dimension: int = 2

    def __post_init__(self):
        bbox_area = (self.bbox[0][1] - self.bbox[0][0]) * (self.bbox[1][1] - self.bbox[1][0])
        if not (self.area > 0.0 and self.area <= bbox_area * (1 + 1e-12)):
            raise ValidationError(
                f"domain {self.name}: area {self.area} outside (0, bbox area {bbox_area}]")


@dataclass(frozen=True)
class PointSample:
    """Interior points produced by rejection sampling."""

    points: np.ndarray
    seed: int
    count: int


def _as_xy(point):
    p = np.asarray(point, dtype=float)
    if p.ndim == 1:
        return p[0:1], p[1:2], True
    return p[:, 0], p[:, 1], False


def contains(domain: DomainSpec, point) -> bool | np.ndarray:
    """Strict membership: true iff every defining inequality holds strictly."""
    x, y, scalar = _as_xy(point)
    inside = domain.predicate(x, y)
    return bool(inside[0]) if scalar else inside


def contains_closure(domain: DomainSpec, point, tol: float = 1e-9):
    """Membership in the closure, up to ``tol`` in boundary distance."""
    x, y, scalar = _as_xy(point)
    inside = domain.predicate(x, y)
    near = signed_boundary_dist(domain, np.stack([x, y], axis=1)) >= -tol
    out = inside | near
    return bool(out[0]) if scalar else out


def boundary_distance(domain: DomainSpec, point):
    """Unsigned distance from a point to the domain boundary."""
    x, y, scalar = _as_xy(point)
    d = domain.boundary_dist(x, y)
    return float(d[0]) if scalar else d


def signed_boundary_dist(domain: DomainSpec, points: np.ndarray) -> np.ndarray:
    """Positive inside the domain, negative outside."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = domain.boundary_dist(pts[:, 0], pts[:, 1])
    sign = np.where(domain.predicate(pts[:, 0], pts[:, 1]), 1.0, -1.0)
    return sign * d


def area(domain: DomainSpec) -> float:
    """Lebesgue measure of the domain (analytic when the family has one)."""
    return domain.area


def monte_carlo_area(domain: DomainSpec, n: int, seed: int = 0) -> tuple[float, float]:
    """Rejection-count area estimate and its binomial standard error."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    (x0, x1), (y0, y1) = domain.bbox
    box = (x1 - x0) * (y1 - y0)
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    hits = domain.predicate(x0 + pts[:, 0] * (x1 - x0), y0 + pts[:, 1] * (y1 - y0))
    phat = hits.mean()
    return box * phat, box * float(np.sqrt(phat * (1 - phat) / n))


def sample_interior(domain: DomainSpec, n: int, seed: int = 0) -> PointSample:
    """Draw ``n`` interior points by rejection over the bounding box.

    Deterministic in (domain, n, seed).  Raises DegenerateDomainError when
    the acceptance rate falls below 1e-4.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    (x0, x1), (y0, y1) = domain.bbox
    rng = np.random.default_rng(seed)
    kept = []
    accepted = 0
    proposed = 0
    while accepted < n:
        raw = rng.random((_SAMPLE_BATCH, 2))
        px = x0 + raw[:, 0] * (x1 - x0)
        py = y0 + raw[:, 1] * (y1 - y0)
        good = domain.predicate(px, py)
        proposed += _SAMPLE_BATCH
        batch = np.stack([px[good], py[good]], axis=1)
        accepted += len(batch)
        kept.append(batch)
        if proposed >= 1_000_000 and accepted / proposed < _MIN_ACCEPT_RATE:
            raise DegenerateDomainError(
                f"acceptance rate {accepted / proposed:.2e} below {_MIN_ACCEPT_RATE}")
    pts = np.concatenate(kept, axis=0)[:n]
    return PointSample(points=pts, seed=seed, count=n)


def interior_cell_raster(domain: DomainSpec, resolution: float):
    """Boolean raster of cells (over the bbox) whose centers are inside."""
    if resolution <= 0:
        raise ValidationError("resolution must be positive")
    (x0, x1), (y0, y1) = domain.bbox
    nx = max(1, int(round((x1 - x0) / resolution)))
    ny = max(1, int(round((y1 - y0) / resolution)))
    hx = (x1 - x0) / nx
    hy = (y1 - y0) / ny
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    cx = x0 + (ii + 0.5) * hx
    cy = y0 + (jj + 0.5) * hy
    return domain.predicate(cx.ravel(), cy.ravel()).reshape(nx, ny)


def connectivity_check(domain: DomainSpec, resolution: float) -> bool:
    """Flood-fill connectivity of the interior cells at the given cell size."""
    raster = interior_cell_raster(domain, resolution)
    if not raster.any():
        raise ResolutionError(
            f"no interior cell for {domain.name} at resolution {resolution}")
    _, ncomp = ndimage.label(raster)
    return ncomp == 1


# ---------------------------------------------------------------------------
# family constructors


def _rect_predicate(x0, x1, y0, y1):
    def f(x, y):
        return (x > x0) & (x < x1) & (y > y0) & (y < y1)
    return f


def _rect_bdist(x0, x1, y0, y1):
    def f(x, y):
        return np.minimum.reduce([x - x0, x1 - x, y - y0, y1 - y])
    return f


def _segments_bdist(segments):
    segs = np.asarray(segments, dtype=float)
    a = segs[:, 0:2]
    b = segs[:, 2:4]
    ab = b - a
    ab2 = np.maximum((ab ** 2).sum(axis=1), 1e-300)

    def f(x, y):
        p = np.stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)], axis=-1)
        p = p[..., None, :]
        t = np.clip(((p - a) * ab).sum(axis=-1) / ab2, 0.0, 1.0)
        proj = a + t[..., None] * ab
        d = np.sqrt(((p - proj) ** 2).sum(axis=-1))
        return d.min(axis=-1)
    return f


def _union_predicate(rects):
    def f(x, y):
        out = np.zeros(np.shape(x), dtype=bool)
        for (x0, x1, y0, y1) in rects:
            out |= (x > x0) & (x < x1) & (y > y0) & (y < y1)
        return out
    return f


def _build_unit_square(params):
    if params:
        raise ValidationError(f"unit_square takes no parameters, got {params}")
    return DomainSpec(
        name="unit_square", params={}, bbox=((0.0, 1.0), (0.0, 1.0)),
        area=1.0, area_stderr=0.0,
        predicate=_rect_predicate(0, 1, 0, 1),
        boundary_dist=_rect_bdist(0, 1, 0, 1))


def _build_rectangle(params):
    width = float(params.pop("width", 2.0))
    height = float(params.pop("height", 1.0))
    if params:
        raise ValidationError(f"rectangle: unknown parameters {params}")
    if width <= 0 or height <= 0:
        raise ValidationError("rectangle: width and height must be positive")
    return DomainSpec(
        name="rectangle", params={"width": width, "height": height},
        bbox=((0.0, width), (0.0, height)), area=width * height, area_stderr=0.0,
        predicate=_rect_predicate(0, width, 0, height),
        boundary_dist=_rect_bdist(0, width, 0, height))


def _build_disk(params):
    radius = float(params.pop("radius", 1.0))
    if params:
        raise ValidationError(f"disk: unknown parameters {params}")
    if radius <= 0:
        raise ValidationError("disk: radius must be positive")

    def pred(x, y):
        return x * x + y * y < radius * radius

    def bdist(x, y):
        return np.abs(radius - np.hypot(x, y))

    return DomainSpec(
        name="disk", params={"radius": radius},
        bbox=((-radius, radius), (-radius, radius)),
        area=float(np.pi) * radius * radius, area_stderr=0.0,
        predicate=pred, boundary_dist=bdist)


def _cusp_curve_dist(k):
    """Distance to the curve y = x**k over x in [0, 1], minimized numerically."""
    tgrid = np.linspace(0.0, 1.0, 257)

    def f(px, py):
        px = np.atleast_1d(np.asarray(px, dtype=float))
        py = np.abs(np.atleast_1d(np.asarray(py, dtype=float)))
        t = np.broadcast_to(tgrid, (len(px), len(tgrid))).copy()
        for _ in range(3):
            d2 = (t - px[:, None]) ** 2 + (t ** k - py[:, None]) ** 2
            best = np.argmin(d2, axis=1)
            lo = t[np.arange(len(px)), np.maximum(best - 1, 0)]
            hi = t[np.arange(len(px)), np.minimum(best + 1, t.shape[1] - 1)]
            t = lo[:, None] + (hi - lo)[:, None] * np.linspace(0, 1, t.shape[1])
        d2 = (t - px[:, None]) ** 2 + (t ** k - py[:, None]) ** 2
        return np.sqrt(d2.min(axis=1))
    return f


def _build_power_cusp(params):
    k = float(params.pop("k", 2.0))
    if params:
        raise ValidationError(f"power_cusp: unknown parameters {params}")
    if not (k >= 1.5):
        raise ValidationError(f"power_cusp: k must be >= 1.5, got {k}")
    curve = _cusp_curve_dist(k)

    def pred(x, y):
        return (x > 0) & (x < 1) & (np.abs(y) < np.power(np.maximum(x, 0.0), k))

    def bdist(x, y):
        return np.minimum(np.abs(1.0 - np.asarray(x, dtype=float)), curve(x, y))

    return DomainSpec(
        name="power_cusp", params={"k": k}, bbox=((0.0, 1.0), (-1.0, 1.0)),
        area=2.0 / (k + 1.0), area_stderr=0.0,
        predicate=pred, boundary_dist=bdist)


def _validate_delta(delta):
    if not (0 < delta <= 0.5):
        raise ValidationError(f"delta must lie in (0, 0.5], got {delta}")


def _build_dumbbell(params):
    delta = float(params.pop("delta", 0.2))
    if params:
        raise ValidationError(f"dumbbell: unknown parameters {params}")
    _validate_delta(delta)
    b0, b1 = 0.5 - delta / 2, 0.5 + delta / 2
    rects = [(0.0, 1.0, 0.0, 1.0), (0.9, 1.6, b0, b1), (1.5, 2.5, 0.0, 1.0)]
    segments = [
        (0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 1, 1),
        (1, 0, 1, b0), (1, b1, 1, 1),
        (1, b0, 1.5, b0), (1, b1, 1.5, b1),
        (1.5, 0, 1.5, b0), (1.5, b1, 1.5, 1),
        (1.5, 0, 2.5, 0), (1.5, 1, 2.5, 1), (2.5, 0, 2.5, 1),
    ]
    return DomainSpec(
        name="dumbbell", params={"delta": delta}, bbox=((0.0, 2.5), (0.0, 1.0)),
        area=2.0 + 0.5 * delta, area_stderr=0.0,
        predicate=_union_predicate(rects),
        boundary_dist=_segments_bdist(segments),
        pieces=tuple(rects))


def _build_rooms_passages(params):
    delta = float(params.pop("delta", 0.2))
    if params:
        raise ValidationError(f"rooms_passages: unknown parameters {params}")
    _validate_delta(delta)
    w1, w2 = delta / 2, delta / 4
    rects = [
        (0.0, 1.0, 0.0, 1.0),
        (1.25, 1.75, 0.0, 0.5),
        (1.875, 2.125, 0.0, 0.25),
        (0.95, 1.30, 0.0, w1),
        (1.725, 1.90, 0.0, w2),
    ]
    segments = [
        (0, 0, 2.125, 0), (0, 0, 0, 1), (0, 1, 1, 1),
        (1, 1, 1, w1), (1, w1, 1.25, w1), (1.25, w1, 1.25, 0.5),
        (1.25, 0.5, 1.75, 0.5), (1.75, 0.5, 1.75, w2), (1.75, w2, 1.875, w2),
        (1.875, w2, 1.875, 0.25), (1.875, 0.25, 2.125, 0.25),
        (2.125, 0.25, 2.125, 0),
    ]
    pred = _union_predicate(rects)
    est, se = _mc_area_from(pred, ((0.0, 2.125), (0.0, 1.0)))
    return DomainSpec(
        name="rooms_passages", params={"delta": delta},
        bbox=((0.0, 2.125), (0.0, 1.0)), area=est, area_stderr=se,
        predicate=pred, boundary_dist=_segments_bdist(segments),
        pieces=tuple(rects))


def _build_two_squares(params):
    if params:
        raise ValidationError(f"two_squares_disjoint takes no parameters, got {params}")
    rects = [(0.0, 1.0, 0.0, 1.0), (2.0, 3.0, 0.0, 1.0)]
    segments = [
        (0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 1, 1), (1, 0, 1, 1),
        (2, 0, 2, 1), (2, 0, 3, 0), (2, 1, 3, 1), (3, 0, 3, 1),
    ]
    pred = _union_predicate(rects)
    est, se = _mc_area_from(pred, ((0.0, 3.0), (0.0, 1.0)))
    return DomainSpec(
        name="two_squares_disjoint", params={}, bbox=((0.0, 3.0), (0.0, 1.0)),
        area=est, area_stderr=se,
        predicate=pred, boundary_dist=_segments_bdist(segments),
        pieces=tuple(rects))


def _mc_area_from(pred, bbox):
    (x0, x1), (y0, y1) = bbox
    rng = np.random.default_rng(_MC_SEED)
    raw = rng.random((_MC_COUNT, 2))
    hits = pred(x0 + raw[:, 0] * (x1 - x0), y0 + raw[:, 1] * (y1 - y0))
    box = (x1 - x0) * (y1 - y0)
    phat = hits.mean()
    return box * phat, box * float(np.sqrt(phat * (1 - phat) / _MC_COUNT))


_FAMILIES = {
    "unit_square": _build_unit_square,
    "rectangle": _build_rectangle,
    "disk": _build_disk,
    "power_cusp": _build_power_cusp,
    "dumbbell": _build_dumbbell,
    "rooms_passages": _build_rooms_passages,
    "two_squares_disjoint": _build_two_squares,
}


def catalog_names() -> list[str]:
    return list(_FAMILIES)


def instantiate(spec_name: str, **params) -> DomainSpec:
    """Build a catalog domain by name with keyword family parameters."""
    if spec_name not in _FAMILIES:
        raise CatalogError(
            f"unknown domain {spec_name!r}; available: {', '.join(_FAMILIES)}")
    return _FAMILIES[spec_name](dict(params))

"""Cell-center cut grids and discrete Sobolev quantities.

A uniform Cartesian grid is laid over the bounding box and a cell is kept
iff its center satisfies the domain predicate.  Nodal functions live on
the corners of active cells; cell values are the four-corner average and
cell gradients the usual central differences of the corner values, which
is the bilinear gradient at the cell center.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .domains import DomainSpec
from .errors import ResolutionError, ValidationError


@dataclass(frozen=True)
class Grid:
    """Active cells of a uniform grid over a domain's bounding box."""

    domain: DomainSpec
    h: float
    nodes: np.ndarray            # (n_nodes, 2)
    node_inside: np.ndarray      # (n_nodes,) strict-interior flags
    cells: np.ndarray            # (n_cells, 4) node ids, order SW SE NE NW
    cell_centers: np.ndarray     # (n_cells, 2)
    raster: np.ndarray           # (nx, ny) bool, active-cell raster
    shape: tuple[int, int]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def cell_measure(self) -> float:
        return self.h * self.h

    def is_connected(self) -> bool:
        _, ncomp = ndimage.label(self.raster)
        return ncomp == 1


@dataclass(frozen=True)
class DiscreteFunction:
    """Nodal values on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_nodes,):
            raise ValidationError(
                f"value count {v.shape} does not match node count {self.grid.n_nodes}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("nodal values must all be finite")
        object.__setattr__(self, "values", v)


def from_callable(grid: Grid, f: Callable) -> DiscreteFunction:
    """Sample a function f(x, y) at the grid nodes."""
    return DiscreteFunction(grid, np.asarray(
        f(grid.nodes[:, 0], grid.nodes[:, 1]), dtype=float))


def build_grid(domain: DomainSpec, h: float) -> Grid:
    """Lay a cell-size-h grid over the bbox, keeping center-inside cells."""
    if h <= 0:
        raise ValidationError("cell size h must be positive")
    (x0, x1), (y0, y1) = domain.bbox
    nx = max(1, int(round((x1 - x0) / h)))
    ny = max(1, int(round((y1 - y0) / h)))
    hx = (x1 - x0) / nx
    hy = (y1 - y0) / ny
    if abs(hx - hy) > 1e-12 * max(hx, hy):
        # keep cells square: the bbox extents of every catalog family are
        # integer multiples of each other, so this only guards misuse
        nx = max(1, int(round((x1 - x0) / min(hx, hy))))
        ny = max(1, int(round((y1 - y0) / min(hx, hy))))
        hx = (x1 - x0) / nx
        hy = (y1 - y0) / ny
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    cx = x0 + (ii + 0.5) * hx
    cy = y0 + (jj + 0.5) * hy
    raster = domain.predicate(cx.ravel(), cy.ravel()).reshape(nx, ny)
    ci, cj = np.nonzero(raster)
    if len(ci) == 0:
        raise ResolutionError(f"no interior cell for {domain.name} at h={h}")
    flat = np.stack([
        ci * (ny + 1) + cj,
        (ci + 1) * (ny + 1) + cj,
        (ci + 1) * (ny + 1) + cj + 1,
        ci * (ny + 1) + cj + 1,
    ], axis=1)
    used = np.unique(flat)
    remap = -np.ones((nx + 1) * (ny + 1), dtype=np.int64)
    remap[used] = np.arange(len(used))
    cells = remap[flat]
    gi, gj = used // (ny + 1), used % (ny + 1)
    nodes = np.stack([x0 + gi * hx, y0 + gj * hy], axis=1)
    inside = domain.predicate(nodes[:, 0], nodes[:, 1])
    centers = np.stack([x0 + (ci + 0.5) * hx, y0 + (cj + 0.5) * hy], axis=1)
    return Grid(domain=domain, h=hx, nodes=nodes, node_inside=inside,
                cells=cells, cell_centers=centers, raster=raster, shape=(nx, ny))


def cell_values(grid: Grid, u: DiscreteFunction) -> np.ndarray:
    """Cell-center values: bilinear interpolation of the corner nodes."""
    return u.values[grid.cells].mean(axis=1)


def cell_gradients(grid: Grid, u: DiscreteFunction) -> np.ndarray:
    """Cell-center gradients by central differences of the corner nodes."""
    v = u.values[grid.cells]
    gx = (v[:, 1] + v[:, 2] - v[:, 0] - v[:, 3]) / (2 * grid.h)
    gy = (v[:, 3] + v[:, 2] - v[:, 0] - v[:, 1]) / (2 * grid.h)
    return np.stack([gx, gy], axis=1)


def mean_value(grid: Grid, u: DiscreteFunction) -> float:
    """Measure-weighted average of the cell-center values."""
    return float(cell_values(grid, u).mean())


def lp_seminorms(grid: Grid, u: DiscreteFunction, p: float) -> tuple[float, float]:
    """Discrete ||u - mean||_p and ||grad u||_p by midpoint quadrature."""
    if p < 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    w = grid.cell_measure
    vals = cell_values(grid, u)
    dev = vals - vals.mean()
    g = cell_gradients(grid, u)
    gn = np.hypot(g[:, 0], g[:, 1])
    dev_norm = float((w * np.abs(dev) ** p).sum() ** (1.0 / p))
    grad_norm = float((w * gn ** p).sum() ** (1.0 / p))
    return dev_norm, grad_norm


# ---------------------------------------------------------------------------
# Q1 finite element forms on the active cells


_KE = np.array([
    [2 / 3, -1 / 6, -1 / 3, -1 / 6],
    [-1 / 6, 2 / 3, -1 / 6, -1 / 3],
    [-1 / 3, -1 / 6, 2 / 3, -1 / 6],
    [-1 / 6, -1 / 3, -1 / 6, 2 / 3],
])


def assemble_forms(grid: Grid) -> tuple[sp.csc_matrix, sp.csc_matrix]:
    """Stiffness and lumped-mass matrices of the bilinear element space."""
    n = grid.n_nodes
    rows = np.repeat(grid.cells, 4, axis=1).ravel()
    cols = np.tile(grid.cells, (1, 4)).ravel()
    vals = np.tile(_KE.ravel(), grid.n_cells)
    K = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()
    mdiag = np.zeros(n)
    np.add.at(mdiag, grid.cells.ravel(), grid.cell_measure / 4)
    M = sp.diags(mdiag).tocsc()
    return K, M

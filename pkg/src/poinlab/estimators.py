"""Three routes to the Poincare constant of a discretized domain.

* ``neumann_optimal_constant``: the p=2 oracle, C = lambda_1^{-1/2} from
  the first nonzero Neumann eigenvalue of the bilinear element forms;
* ``rayleigh_maximize``: a variational lower bound for general p >= 1 by
  monotone projected gradient ascent on the deviation/gradient ratio;
* ``constructive_bound``: the closed-form upper bound C_gamma (M/eta)^{1/p}
  assembled from the measured arc constants (see docs/bound_derivation.md
  for the reduction).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .domains import DomainSpec
from .errors import OptimizerError, SolverError, ValidationError
from .grid import (DiscreteFunction, Grid, assemble_forms, cell_gradients,
                   cell_values, lp_seminorms)

_EIGEN_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class EstimateResult:
    """A Poincare-constant estimate with its witness and diagnostics."""

    method: str
    p: float
    constant: float
    h: float | None
    witness: DiscreteFunction | None
    diagnostics: dict

    def __post_init__(self):
        if not (self.constant > 0):
            raise ValidationError(f"estimated constant must be positive, got {self.constant}")


def witness_ratio(result: EstimateResult) -> float:
    """Recompute the deviation/gradient ratio of the stored witness."""
    if result.witness is None:
        raise ValidationError(f"{result.method} result carries no witness")
    if result.method == "eigen":
        grid = result.witness.grid
        K, M = assemble_forms(grid)
        v = result.witness.values
        v = v - (M @ v).sum() / M.diagonal().sum()
        num = float(v @ (M @ v))
        den = float(v @ (K @ v))
        return (num / den) ** 0.5
    dev, grad = lp_seminorms(result.witness.grid, result.witness, result.p)
    if grad == 0:
        raise ValidationError("witness has zero gradient norm")
    return dev / grad


def neumann_optimal_constant(grid: Grid, seed: int = 0, tol: float = 1e-12,
                             maxiter: int = 2000) -> EstimateResult:
    """Smallest nonzero Neumann eigenvalue via deflated shift-invert LOBPCG.

    The constant mode is deflated exactly through the constraint argument
    and the iteration is preconditioned with a factorization of K + M.
    """
    if not grid.is_connected():
        raise SolverError(
            "grid is disconnected: the zero eigenvalue is multiple and no "
            "finite Poincare constant exists")
    K, M = assemble_forms(grid)
    n = grid.n_nodes
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 1))
    Y = np.ones((n, 1))
    lu = spla.splu((K + M).tocsc())
    prec = spla.LinearOperator((n, n), matvec=lu.solve)
    vals, vecs = spla.lobpcg(K, X, B=M, M=prec, Y=Y, tol=tol,
                             maxiter=maxiter, largest=False)
    lam = float(vals[0])
    v = vecs[:, 0]
    res = float(np.linalg.norm(K @ v - lam * (M @ v)) / np.linalg.norm(M @ v))
    if not np.isfinite(lam) or lam <= 0 or res > _EIGEN_RESIDUAL_TOL:
        raise SolverError(
            f"eigen solve did not converge: lambda={lam}, residual={res:.2e}")
    witness = DiscreteFunction(grid, v)
    constant = lam ** -0.5
    fem_ratio = witness_ratio(EstimateResult(
        method="eigen", p=2.0, constant=constant, h=grid.h,
        witness=witness, diagnostics={}))
    return EstimateResult(
        method="eigen", p=2.0, constant=constant, h=grid.h, witness=witness,
        diagnostics={"lambda1": lam, "residual": res, "fem_ratio": fem_ratio,
                     "iterations": maxiter, "seed": seed})


def _ratio_and_ascent(u, w, cells, h, p):
    """Deviation/gradient ratio and the ascent direction of its log."""
    v = u[cells]
    uc = v.mean(axis=1)
    gx = (v[:, 1] + v[:, 2] - v[:, 0] - v[:, 3]) / (2 * h)
    gy = (v[:, 3] + v[:, 2] - v[:, 0] - v[:, 1]) / (2 * h)
    d = uc - uc.mean()
    gn = np.hypot(gx, gy)
    dev_p = float((w * np.abs(d) ** p).sum())
    grad_p = float((w * gn ** p).sum())
    if grad_p == 0.0 or dev_p == 0.0:
        return 0.0, None
    # d/du of log(dev_p^{1/p}) - log(grad_p^{1/p}); the mean is re-centered
    # after each step instead of being differentiated through
    dd = w * np.abs(d) ** (p - 1) * np.sign(d) / dev_p
    gsafe = np.where(gn > 0, gn, 1.0)
    fac = w * np.where(gn > 0, gsafe ** (p - 2), 0.0) / grad_p
    gvec = np.zeros_like(u)
    np.add.at(gvec, cells[:, 0], 0.25 * dd - fac * (-gx - gy) / (2 * h))
    np.add.at(gvec, cells[:, 1], 0.25 * dd - fac * (gx - gy) / (2 * h))
    np.add.at(gvec, cells[:, 2], 0.25 * dd - fac * (gx + gy) / (2 * h))
    np.add.at(gvec, cells[:, 3], 0.25 * dd - fac * (-gx + gy) / (2 * h))
    return (dev_p ** (1 / p)) / (grad_p ** (1 / p)), gvec


def _starts(grid: Grid, restarts: int, rng):
    x, y = grid.nodes[:, 0], grid.nodes[:, 1]
    sx = (x - x.min()) / max(np.ptp(x), 1e-300)
    sy = (y - y.min()) / max(np.ptp(y), 1e-300)
    smooth = [sx, sy, sx + sy, sx - sy, np.cos(np.pi * sx), np.cos(np.pi * sy)]
    out = []
    for r in range(restarts):
        u = smooth[r].copy() if r < len(smooth) else rng.standard_normal(grid.n_nodes)
        out.append(u)
    return out


def rayleigh_maximize(grid: Grid, p: float, iters: int = 500,
                      restarts: int = 8, seed: int = 0) -> EstimateResult:
    """Maximize ||u - mean||_p / ||grad u||_p over nodal functions.

    Normalized projected gradient ascent with mean re-centering after each
    step, backtracking steps that only accept improvement, and multi-start
    (coordinate ramps and low modes first, then seeded noise).  The result
    is a lower bound on the discrete optimal constant and is deterministic
    in the seed.
    """
    if p < 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    if iters < 1 or restarts < 1:
        raise ValidationError("iters and restarts must be >= 1")
    w = grid.cell_measure
    cells = grid.cells
    rng = np.random.default_rng(seed)
    best_val, best_u, total_accept = 0.0, None, 0
    for u0 in _starts(grid, restarts, rng):
        u = u0 - u0.mean()
        nrm = np.linalg.norm(u)
        if nrm == 0:
            continue
        u = u / nrm
        val, g = _ratio_and_ascent(u, w, cells, grid.h, p)
        step = 0.25
        for _ in range(iters):
            if g is None:
                break
            gn = np.linalg.norm(g)
            if gn < 1e-14 or step < 1e-13:
                break
            cand = u + step * (g / gn)
            cand -= cand.mean()
            cand /= np.linalg.norm(cand)
            cval, cg = _ratio_and_ascent(cand, w, cells, grid.h, p)
            if cval > val:
                u, val, g = cand, cval, cg
                step *= 1.3
                total_accept += 1
            else:
                step *= 0.5
        if val > best_val:
            best_val, best_u = val, u
    if best_u is None:
        raise OptimizerError("all ascent starts were degenerate")
    witness = DiscreteFunction(grid, best_u)
    return EstimateResult(
        method="rayleigh", p=float(p), constant=best_val, h=grid.h,
        witness=witness,
        diagnostics={"iterations": iters, "restarts": restarts, "seed": seed,
                     "accepted_steps": total_accept})


def holder_conjugate(p: float) -> float:
    """p / (p - 1), with p = 1 mapped to infinity."""
    if p < 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    return float("inf") if p == 1.0 else p / (p - 1.0)


def constructive_bound(domain: DomainSpec, p: float, constants,
                       pprime: float | None = None) -> EstimateResult:
    """Upper bound C_gamma (M / eta)^{1/p} from the measured arc constants.

    ``constants`` is the (C_gamma, eta, M) triple; ``pprime`` may pin the
    Holder conjugate used in the derivation and is validated against p.
    The p = 1 case is the degenerate sup-bound form of the same formula.
    """
    c_gamma, eta, M = constants
    if p < 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    if eta is None or not (eta > 0):
        raise ValidationError(f"invalid constants: eta must be positive, got {eta}")
    if c_gamma is None or not (c_gamma > 0):
        raise ValidationError(f"invalid constants: C_gamma must be positive, got {c_gamma}")
    if M < 1:
        raise ValidationError(f"invalid constants: multiplicity M must be >= 1, got {M}")
    expected = holder_conjugate(p)
    if pprime is not None:
        both_inf = np.isinf(pprime) and np.isinf(expected)
        if not both_inf and abs(pprime - expected) > 1e-9 * max(1.0, expected):
            raise ValidationError(
                f"pprime={pprime} is not the Holder conjugate of p={p}")
    total = float(c_gamma * (M / eta) ** (1.0 / p))
    return EstimateResult(
        method="constructive", p=float(p), constant=total, h=None, witness=None,
        diagnostics={"C_gamma": float(c_gamma), "eta": float(eta), "M": int(M),
                     "pprime": expected})

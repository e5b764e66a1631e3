"""Inequality verification, family sweeps and neck-degradation reports."""
from __future__ import annotations

import numpy as np

from .arcs import estimate_constants, measure_arc_family
from .domains import DomainSpec, instantiate
from .errors import PoinlabError, ValidationError
from .estimators import (EstimateResult, constructive_bound,
                         neumann_optimal_constant, rayleigh_maximize)
from .grid import build_grid, from_callable, lp_seminorms
from .suite import TestFunctionSuite, default_suite

_FAMILY_PARAM = {"power_cusp": "k", "dumbbell": "delta", "rooms_passages": "delta"}


class SweepAborted(PoinlabError):
    """A sweep member failed; the partial report rides on the exception."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


def verify_inequality(domain: DomainSpec, p: float, C: float,
                      suite: TestFunctionSuite, h: float,
                      tolerance: float = 0.05) -> dict:
    """Check dev/grad <= C (1 + tolerance) for every suite function.

    A function with zero gradient but positive deviation is flagged as a
    discretization artifact and fails the run; the all-zero ratio counts
    as a pass (constants deviate nowhere).
    """
    if not (C > 0):
        raise ValidationError(f"constant must be positive, got {C}")
    grid = build_grid(domain, h)
    rows = []
    artifacts = []
    for name, f in zip(suite.names, suite.functions):
        u = from_callable(grid, f)
        dev, grad = lp_seminorms(grid, u, p)
        if grad == 0.0 and dev > 0.0:
            artifacts.append(name)
            rows.append({"name": name, "dev": dev, "grad": grad, "ratio": None})
            continue
        ratio = 0.0 if grad == 0.0 else dev / grad
        rows.append({"name": name, "dev": dev, "grad": grad, "ratio": ratio})
    ratios = [r["ratio"] for r in rows if r["ratio"] is not None]
    max_ratio = max(ratios) if ratios else 0.0
    argmax = ""
    for r in rows:
        if r["ratio"] is not None and r["ratio"] == max_ratio:
            argmax = r["name"]
            break
    passed = (not artifacts) and max_ratio <= C * (1.0 + tolerance)
    return {
        "domain": domain.name, "params": dict(domain.params), "p": p,
        "constant": C, "h": h, "tolerance": tolerance,
        "n_functions": len(suite), "max_ratio": max_ratio,
        "argmax_name": argmax, "pass": passed,
        "artifacts": artifacts, "ratios": rows,
    }


def _estimate(domain: DomainSpec, p: float, method: str, h: float, seed: int,
              rayleigh_iters: int = 400, rayleigh_restarts: int = 8) -> EstimateResult:
    if method == "eigen":
        if p != 2:
            raise ValidationError("the eigen oracle is a p=2 method")
        return neumann_optimal_constant(build_grid(domain, h), seed=seed)
    if method == "rayleigh":
        return rayleigh_maximize(build_grid(domain, h), p,
                                 iters=rayleigh_iters,
                                 restarts=rayleigh_restarts, seed=seed)
    if method == "constructive":
        arcs = measure_arc_family(domain, seed=seed)
        return constructive_bound(domain, p, (arcs.c_gamma, arcs.eta, arcs.M))
    raise ValidationError(
        f"unknown method {method!r}; available: eigen, rayleigh, constructive")


def sweep_family(family: str, values, p: float, method: str, h: float,
                 seed: int = 0, tolerance: float = 0.05) -> dict:
    """One estimate (and suite check) per family parameter value.

    Aborts on the first failing member, attaching the partial report to
    the raised SweepAborted.
    """
    if family not in _FAMILY_PARAM:
        raise ValidationError(
            f"sweepable families: {', '.join(_FAMILY_PARAM)}; got {family!r}")
    pname = _FAMILY_PARAM[family]
    values = [float(v) for v in values]
    if not values:
        raise ValidationError("sweep needs at least one parameter value")
    rows = []
    for v in values:
        try:
            domain = instantiate(family, **{pname: v})
            est = _estimate(domain, p, method, h, seed)
            report = verify_inequality(domain, p, est.constant,
                                       default_suite(domain, seed), h,
                                       tolerance=tolerance)
            rows.append({"param": v, "constant": est.constant,
                         "max_ratio": report["max_ratio"],
                         "pass": report["pass"]})
        except PoinlabError as exc:
            partial = _sweep_report(family, pname, p, method, h, seed, rows)
            partial["error"] = f"{type(exc).__name__}: {exc}"
            partial["failed_value"] = v
            raise SweepAborted(str(exc), partial) from exc
    return _sweep_report(family, pname, p, method, h, seed, rows)


def _sweep_report(family, pname, p, method, h, seed, rows):
    consts = [r["constant"] for r in rows]
    return {
        "family": family, "parameter": pname, "p": p, "method": method,
        "h": h, "seed": seed, "rows": rows,
        "nondecreasing": all(b >= a for a, b in zip(consts, consts[1:])),
        "nonincreasing": all(b <= a for a, b in zip(consts, consts[1:])),
    }


def neck_scaling_check(family: str, values, p: float, h: float,
                       seed: int = 0) -> dict:
    """Log-log slope of the eigen constant against the neck parameter,
    with growth factors across quartered values."""
    values = sorted((float(v) for v in values), reverse=True)
    if len(values) < 3:
        raise ValidationError("need at least 3 parameter values")
    if values[0] / values[-1] < 4.0 - 1e-12:
        raise ValidationError("values must span at least a factor of 4")
    report = sweep_family(family, values, p, "eigen", h, seed=seed)
    consts = np.array([r["constant"] for r in report["rows"]])
    if np.any(consts <= 0):
        raise ValidationError("non-positive constants in sweep data")
    slope = float(np.polyfit(np.log(values), np.log(consts), 1)[0])
    growth = []
    for i, vi in enumerate(values):
        for j, vj in enumerate(values):
            if abs(vi / vj - 4.0) < 1e-9:
                growth.append({"delta_from": vi, "delta_to": vj,
                               "factor": float(consts[j] / consts[i])})
    return {"family": family, "p": p, "h": h, "values": list(values),
            "constants": [float(c) for c in consts], "slope": slope,
            "growth_factors": growth}

"""Command-line front end: catalog, constants, estimates, verification, sweeps.

Exit codes: 0 success / verification pass, 1 verification or solver
failure, 2 usage or validation errors.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import __version__
from .arcs import measure_arc_family
from .conic import certify_conic
from .domains import catalog_names, instantiate
from .errors import (CatalogError, PoinlabError, ResolutionError, ValidationError)
from .grid import build_grid
from .reports import fmt_num, to_csv, to_json, write_report
from .suite import default_suite
from .verify import SweepAborted, _estimate, neck_scaling_check, sweep_family, verify_inequality

_USAGE_ERRORS = (CatalogError, ValidationError, ResolutionError)


@dataclass
class RunConfig:
    """Validated flags shared by the estimation-style commands."""

    domain: str = "unit_square"
    params: dict = None
    p: float = 2.0
    method: str = "eigen"
    h: float = 1.0 / 64.0
    seed: int = 0
    tolerance: float = 0.05
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.params is None:
            self.params = {}
        if self.p < 1:
            raise ValidationError(f"p must be >= 1, got {self.p}")
        if self.h <= 0:
            raise ValidationError(f"h must be positive, got {self.h}")
        if self.tolerance < 0:
            raise ValidationError("tolerance must be nonnegative")
        if self.fmt not in ("json", "csv"):
            raise ValidationError(f"format must be json or csv, got {self.fmt}")


def _parse_h(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ValidationError(f"--param expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = float(val)
    return out


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad --values list {text!r}") from exc


def _add_common(sub, h_default="1/64"):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    sub.add_argument("--h", type=_parse_h, default=_parse_h(h_default))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="poinlab",
        description="Poincare-constant laboratory on singular planar domains")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("list-domains", help="catalog dump").add_argument(
        "--out", default=None)

    c = sub.add_parser("constants", help="measured arc/homotopy constants")
    c.add_argument("--domain", default=None)
    c.add_argument("--param", action="append", default=[])
    c.add_argument("--check", choices=("conic",), default=None)
    c.add_argument("--pairs", type=int, default=1000)
    c.add_argument("--s-grid", type=int, default=21, dest="s_grid")
    c.add_argument("--mu", type=float, default=None)
    _add_common(c)

    e = sub.add_parser("estimate", help="Poincare-constant estimate")
    e.add_argument("--domain", required=True)
    e.add_argument("--param", action="append", default=[])
    e.add_argument("--p", type=float, default=2.0)
    e.add_argument("--method", choices=("eigen", "rayleigh", "constructive"),
                   default="eigen")
    e.add_argument("--iters", type=int, default=400)
    e.add_argument("--restarts", type=int, default=8)
    e.add_argument("--witness-out", default=None)
    _add_common(e)

    v = sub.add_parser("verify", help="suite check against a constant")
    v.add_argument("--domain", required=True)
    v.add_argument("--param", action="append", default=[])
    v.add_argument("--p", type=float, default=2.0)
    v.add_argument("--constant", default="auto")
    v.add_argument("--suite", choices=("default",), default="default")
    v.add_argument("--tolerance", type=float, default=0.05)
    _add_common(v)

    s = sub.add_parser("sweep", help="per-parameter estimates for a family")
    s.add_argument("--family", required=True)
    s.add_argument("--values", required=True)
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--method", choices=("eigen", "rayleigh", "constructive"),
                   default="eigen")
    _add_common(s)

    d = sub.add_parser("demo-neck", help="neck-degradation scaling report")
    d.add_argument("--family", default="dumbbell")
    d.add_argument("--values", default="0.4,0.2,0.1,0.05")
    d.add_argument("--p", type=float, default=2.0)
    _add_common(d, h_default="1/128")
    return ap


def _cmd_list_domains(args) -> int:
    rows = []
    for name in catalog_names():
        dom = instantiate(name)
        rows.append({"name": name, "params": dict(dom.params), "area": dom.area})
    write_report(to_json(rows), args.out)
    return 0


def _cmd_constants(args) -> int:
    if args.check == "conic":
        report = certify_conic(n=100_000, seed=args.seed)
        write_report(to_json(report), args.out)
        return 0
    if args.domain is None:
        raise ValidationError("constants needs --domain or --check conic")
    domain = instantiate(args.domain, **_parse_params(args.param))
    arcs = measure_arc_family(domain, mu=args.mu, n_pairs=args.pairs,
                              s_grid=args.s_grid, seed=args.seed)
    h = arcs.homotopy
    report = {
        "C_gamma": arcs.c_gamma, "eta": arcs.eta, "lambda": arcs.lam,
        "M": arcs.M, "z": [float(h.z[0]), float(h.z[1])],
        "alpha": h.alpha, "mu": h.mu,
        "n_pairs": arcs.n_pairs, "seed": arcs.seed,
    }
    write_report(to_json(report), args.out)
    return 0


def _cmd_estimate(args) -> int:
    cfg = RunConfig(domain=args.domain, params=_parse_params(args.param),
                    p=args.p, method=args.method, h=args.h, seed=args.seed,
                    out=args.out, fmt=args.fmt or "json")
    domain = instantiate(cfg.domain, **cfg.params)
    est = _estimate(domain, cfg.p, cfg.method, cfg.h, cfg.seed,
                    rayleigh_iters=args.iters, rayleigh_restarts=args.restarts)
    report = {
        "method": est.method, "p": est.p, "h": est.h,
        "domain": cfg.domain, "params": cfg.params,
        "constant": est.constant, "diagnostics": est.diagnostics,
    }
    write_report(to_json(report), cfg.out)
    if args.witness_out and est.witness is not None:
        rows = [{"x": x, "y": y, "value": v} for (x, y), v in
                zip(est.witness.grid.nodes, est.witness.values)]
        write_report(to_csv(rows, ["x", "y", "value"]), args.witness_out)
    return 0


def _cmd_verify(args) -> int:
    cfg = RunConfig(domain=args.domain, params=_parse_params(args.param),
                    p=args.p, h=args.h, seed=args.seed,
                    tolerance=args.tolerance, out=args.out, fmt=args.fmt or "json")
    domain = instantiate(cfg.domain, **cfg.params)
    if args.constant == "auto":
        method = "eigen" if cfg.p == 2 else "constructive"
        C = _estimate(domain, cfg.p, method, cfg.h, cfg.seed).constant
    else:
        C = float(args.constant)
    suite = default_suite(domain, seed=cfg.seed)
    report = verify_inequality(domain, cfg.p, C, suite, cfg.h,
                               tolerance=cfg.tolerance)
    write_report(to_json(report), cfg.out)
    return 0 if report["pass"] else 1


def _cmd_sweep(args) -> int:
    fmt = args.fmt or "csv"
    try:
        report = sweep_family(args.family, _parse_values(args.values),
                              args.p, args.method, args.h, seed=args.seed)
    except SweepAborted as exc:
        write_report(to_json(exc.partial), args.out)
        print(f"sweep aborted: {exc}", file=sys.stderr)
        return 1
    if fmt == "csv":
        text = to_csv(report["rows"], ["param", "constant", "max_ratio", "pass"])
    else:
        text = to_json(report)
    write_report(text, args.out)
    return 0 if all(r["pass"] for r in report["rows"]) else 1


def _cmd_demo_neck(args) -> int:
    report = neck_scaling_check(args.family, _parse_values(args.values),
                                args.p, args.h, seed=args.seed)
    out = {"family": report["family"], "slope": report["slope"],
           "growth_factors": report["growth_factors"],
           "values": report["values"], "constants": report["constants"]}
    write_report(to_json(out), args.out)
    return 0


_COMMANDS = {
    "list-domains": _cmd_list_domains,
    "constants": _cmd_constants,
    "estimate": _cmd_estimate,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "demo-neck": _cmd_demo_neck,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PoinlabError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

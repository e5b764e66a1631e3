"""Deterministic suites of smooth test functions for inequality checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domains import DomainSpec, sample_interior
from .errors import ValidationError

GENERATOR_KINDS = ("polynomial", "trigonometric", "radial_bump", "cusp_concentrator")

_POLY_BASIS = [
    ("poly_x", lambda x, y: x),
    ("poly_y", lambda x, y: y),
    ("poly_x_plus_y", lambda x, y: x + y),
    ("poly_x2", lambda x, y: x * x),
    ("poly_xy", lambda x, y: x * y),
    ("poly_y2", lambda x, y: y * y),
    ("poly_x2_minus_y2", lambda x, y: x * x - y * y),
    ("poly_x3", lambda x, y: x ** 3),
]


@dataclass(frozen=True)
class TestFunctionSuite:
    """Named smooth functions, regenerated identically from the seed."""

    domain: DomainSpec
    names: tuple[str, ...]
    functions: tuple[Callable, ...]
    seed: int

    def __len__(self) -> int:
        return len(self.functions)


def _trig(domain, rng):
    (x0, x1), (y0, y1) = domain.bbox
    a = float(rng.integers(1, 4))
    b = float(rng.integers(1, 4))
    phase = float(rng.uniform(0, 2 * np.pi))
    lx = max(x1 - x0, 1e-300)
    ly = max(y1 - y0, 1e-300)

    def f(x, y, a=a, b=b, phase=phase):
        return np.cos(a * np.pi * (x - x0) / lx + b * np.pi * (y - y0) / ly + phase)
    return f, f"trig_a{int(a)}_b{int(b)}"


def _radial_bump(center, width):
    cx, cy = center

    def f(x, y):
        r2 = (x - cx) ** 2 + (y - cy) ** 2
        return np.exp(-r2 / (2 * width * width))
    return f


def _cusp_concentrator(domain, beta, cutoff):
    """Smoothly truncated negative power of the distance to the tip side.

    Behaves like xi**(-beta) near the bounding box's left edge and levels
    off at cutoff**(-beta) away from it; on cusp domains this probes the
    singular tip.  A hard floor keeps nodal values finite on domains whose
    grids touch the left edge.
    """
    x_left = domain.bbox[0][0]
    m = 4.0

    def f(x, y):
        xi = np.maximum(np.asarray(x, dtype=float) - x_left, 1e-9)
        return (xi ** (-m) + cutoff ** (-m)) ** (beta / m)
    return f


def generate_suite(domain: DomainSpec, spec: list[dict], seed: int = 0) -> TestFunctionSuite:
    """Build a suite from generator descriptors.

    Each descriptor is {"kind": name, "count": n, ...params}; unknown kinds
    raise ValidationError.  The same (domain, spec, seed) always produces
    the same suite.
    """
    rng = np.random.default_rng(seed)
    names: list[str] = []
    funcs: list[Callable] = []
    for item in spec:
        kind = item.get("kind")
        count = int(item.get("count", 1))
        if kind not in GENERATOR_KINDS:
            raise ValidationError(
                f"unknown generator {kind!r}; available: {', '.join(GENERATOR_KINDS)}")
        if kind == "polynomial":
            for name, f in _POLY_BASIS[:count]:
                names.append(name)
                funcs.append(f)
        elif kind == "trigonometric":
            for i in range(count):
                f, label = _trig(domain, rng)
                names.append(f"{label}_{i}")
                funcs.append(f)
        elif kind == "radial_bump":
            width = float(item.get("width", 0.15 * max(
                domain.bbox[0][1] - domain.bbox[0][0],
                domain.bbox[1][1] - domain.bbox[1][0])))
            centers = item.get("centers")
            if centers is None:
                centers = sample_interior(domain, count, seed + 101).points
            for i in range(count):
                c = np.asarray(centers[i], dtype=float)
                names.append(f"bump_{i}_w{width:.3g}")
                funcs.append(_radial_bump(c, width))
        else:
            betas = item.get("betas", [0.1, 0.2, 0.3])
            cutoffs = item.get("cutoffs", [0.25, 0.5])
            made = 0
            for beta in betas:
                for cutoff in cutoffs:
                    if made >= count:
                        break
                    names.append(f"concentrator_b{beta:g}_c{cutoff:g}")
                    funcs.append(_cusp_concentrator(domain, beta, cutoff))
                    made += 1
    return TestFunctionSuite(domain=domain, names=tuple(names),
                             functions=tuple(funcs), seed=seed)


def default_suite(domain: DomainSpec, seed: int = 0) -> TestFunctionSuite:
    """The shipped 30-function suite: polynomials, low trigonometric modes,
    radial bumps and cusp concentrators."""
    return generate_suite(domain, [
        {"kind": "polynomial", "count": 8},
        {"kind": "trigonometric", "count": 12},
        {"kind": "radial_bump", "count": 4},
        {"kind": "cusp_concentrator", "count": 6},
    ], seed=seed)

"""Smooth scalar profiles of the collar coordinate, with exact derivatives.

Every profile carries its first and second derivative in closed form and is
vectorized over numpy arrays, which the mollification quadrature relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ScalarFunction:
    """A C^2 scalar function t -> f(t) with analytic derivatives."""

    f: Callable
    d1: Callable
    d2: Callable
    name: str = ""

    def __call__(self, t):
        return self.f(t)


def constant(c: float) -> ScalarFunction:
    return ScalarFunction(
        f=lambda t: np.full_like(np.asarray(t, dtype=float), c),
        d1=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        d2=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        name=f"const({c})",
    )


def affine(a: float, b: float) -> ScalarFunction:
    return ScalarFunction(
        f=lambda t: a + b * np.asarray(t, dtype=float),
        d1=lambda t: np.full_like(np.asarray(t, dtype=float), b),
        d2=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        name=f"affine({a},{b})",
    )


def polynomial(coeffs) -> ScalarFunction:
    """coeffs in increasing-degree order, c0 + c1 t + c2 t^2 + ..."""
    p = np.polynomial.Polynomial(list(coeffs))
    dp = p.deriv()
    d2p = dp.deriv()
    return ScalarFunction(f=p, d1=dp, d2=d2p, name=f"poly({list(coeffs)})")


def sin_shifted(r: float, sign: float = -1.0) -> ScalarFunction:
    """phi(t) = sin(r + sign*t); sign=-1 models a geodesic ball seen from M2."""
    s = float(sign)
    return ScalarFunction(
        f=lambda t: np.sin(r + s * np.asarray(t, dtype=float)),
        d1=lambda t: s * np.cos(r + s * np.asarray(t, dtype=float)),
        d2=lambda t: -(s * s) * np.sin(r + s * np.asarray(t, dtype=float)),
        name=f"sin({r}{'+' if s > 0 else '-'}t)",
    )


def cosh_profile() -> ScalarFunction:
    return ScalarFunction(f=np.cosh, d1=np.sinh, d2=np.cosh, name="cosh(t)")


def exp_rate(lam: float) -> ScalarFunction:
    return ScalarFunction(
        f=lambda t: np.exp(lam * np.asarray(t, dtype=float)),
        d1=lambda t: lam * np.exp(lam * np.asarray(t, dtype=float)),
        d2=lambda t: lam * lam * np.exp(lam * np.asarray(t, dtype=float)),
        name=f"exp({lam}t)",
    )


def reflect(fn: ScalarFunction) -> ScalarFunction:
    """t -> fn(-t), with the chain-rule derivatives."""
    return ScalarFunction(
        f=lambda t: fn.f(-np.asarray(t, dtype=float)),
        d1=lambda t: -fn.d1(-np.asarray(t, dtype=float)),
        d2=lambda t: fn.d2(-np.asarray(t, dtype=float)),
        name=f"reflect({fn.name})",
    )


_PRESETS = {
    "constant": lambda p: constant(p.get("value", 1.0)),
    "affine": lambda p: affine(p["a"], p["b"]),
    "poly": lambda p: polynomial(p["coeffs"]),
    "sin_shifted": lambda p: sin_shifted(p["r"], p.get("sign", -1.0)),
    "cosh": lambda p: cosh_profile(),
    "exp": lambda p: exp_rate(p["rate"]),
}


def from_spec(spec: dict) -> ScalarFunction:
    """Build a profile from a scenario-file dictionary, e.g.
    {"preset": "sin_shifted", "r": 1.047}."""
    kind = spec.get("preset")
    if kind not in _PRESETS:
        raise KeyError(f"unknown scalar preset {kind!r}; known: {sorted(_PRESETS)}")
    return _PRESETS[kind](spec)

"""C^1 -> C-infinity smoothing by mollification on a small band.

A piecewise function that is C^1 at its junction is replaced, inside the band
[t0-nu, t0+nu], by h + chi * (K_rho * h - h): a bump-kernel convolution
blended back into the original by a smooth cutoff chi.  The convolution
radius rho is found by a halving search until the C^1 budget mu and the
second-derivative interval bound hold on a measurement grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .chart import CollarChart, Region, is_positive_definite
from .errors import BandTooWide, BudgetInfeasible, NotPositiveDefinite
from .gluing import GluedMetric, default_x_samples
from .scalars import ScalarFunction

QUAD_POINTS = 64
MAX_HALVINGS = 60

_GL_X, _GL_W = np.polynomial.legendre.leggauss(QUAD_POINTS)


def _bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    mask = np.abs(u) < 1.0
    out[mask] = np.exp(-1.0 / (1.0 - u[mask] ** 2))
    return out


def _bump_d1(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    mask = np.abs(u) < 1.0
    w = 1.0 - u[mask] ** 2
    out[mask] = np.exp(-1.0 / w) * (-2.0 * u[mask] / w**2)
    return out


def _gl_segment(a, b):
    y = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
    w = 0.5 * (b - a) * _GL_W
    return y, w


def _norm_const():
    y1, w1 = _gl_segment(-1.0, 0.0)
    y2, w2 = _gl_segment(0.0, 1.0)
    return 1.0 / (np.sum(w1 * _bump(y1)) + np.sum(w2 * _bump(y2)))


_BUMP_NORM = _norm_const()


def kernel(u):
    """Even, compactly supported, unit-mass mollifier kernel."""
    return _BUMP_NORM * _bump(u)


def _step_integral(y: float) -> float:
    """S(y) = integral of the kernel from -1 to y; smooth 0 -> 1 ramp."""
    if y <= -1.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    total = 0.0
    for a, b in ((-1.0, min(y, 0.0)), (0.0, y)) if y > 0 else ((-1.0, y),):
        if b > a:
            ys, ws = _gl_segment(a, b)
            total += float(np.sum(ws * kernel(ys)))
    return total


class Cutoff:
    """Smooth even cutoff: 1 on [-nu/2, nu/2], 0 outside [-nu, nu]."""

    def __init__(self, nu: float):
        self.nu = nu

    def _ramp_coord(self, a: float) -> float:
        # maps |tau| in [nu/2, nu] onto [-1, 1]
        return (a - 0.75 * self.nu) / (0.25 * self.nu)

    def value(self, tau: float) -> float:
        a = abs(tau)
        if a <= 0.5 * self.nu:
            return 1.0
        if a >= self.nu:
            return 0.0
        return 1.0 - _step_integral(self._ramp_coord(a))

    def d1(self, tau: float) -> float:
        a = abs(tau)
        if a <= 0.5 * self.nu or a >= self.nu:
            return 0.0
        slope = -float(kernel(np.array(self._ramp_coord(a)))) * 4.0 / self.nu
        return slope if tau > 0 else -slope

    def d2(self, tau: float) -> float:
        a = abs(tau)
        if a <= 0.5 * self.nu or a >= self.nu:
            return 0.0
        return -float(_BUMP_NORM * _bump_d1(np.array(self._ramp_coord(a)))) * (4.0 / self.nu) ** 2


# ---------------------------------------------------------------------------
# scalar junctions


@dataclass(frozen=True)
class PiecewiseC1Scalar:
    """Smooth pieces left/right of a junction, C^1 where they meet."""

    left: ScalarFunction
    right: ScalarFunction
    t0: float = 0.0

    def __post_init__(self):
        scale = max(1.0, abs(float(self.left.f(self.t0))))
        if abs(float(self.left.f(self.t0)) - float(self.right.f(self.t0))) > 1e-10 * scale:
            raise ValueError("pieces disagree in value at the junction (not C^0)")
        dscale = max(1.0, abs(float(self.left.d1(self.t0))))
        if abs(float(self.left.d1(self.t0)) - float(self.right.d1(self.t0))) > 1e-10 * dscale:
            raise ValueError("pieces disagree in slope at the junction (not C^1)")

    def _pick(self, which: str, t):
        t = np.asarray(t, dtype=float)
        left_mask = t <= self.t0
        fl = getattr(self.left, which)
        fr = getattr(self.right, which)
        out = np.where(left_mask, np.asarray(fl(t), float), np.asarray(fr(t), float))
        return out

    def f(self, t):
        return self._pick("f", t)

    def d1(self, t):
        return self._pick("d1", t)

    def d2(self, t):
        return self._pick("d2", t)


class _Convolver:
    """Quadrature evaluation of (K_rho * h)(t) and its derivatives.

    The u-integral is split at the junction preimage so every segment has a
    smooth integrand; each segment uses the fixed Gauss-Legendre rule.
    """

    def __init__(self, h, rho: float, quad_factor: int = 1):
        self.h = h
        self.rho = rho
        if quad_factor == 1:
            self.gx, self.gw = _GL_X, _GL_W
        else:
            self.gx, self.gw = np.polynomial.legendre.leggauss(QUAD_POINTS * quad_factor)

    def _segments(self, t: float):
        # split at 0 (where the normalization rule splits) and at the
        # junction preimage, so every panel has a smooth integrand and the
        # quadrature mass matches the kernel normalization exactly
        ustar = (t - self.h.t0) / self.rho
        cuts = sorted({-1.0, 0.0, 1.0} | ({ustar} if -1.0 < ustar < 1.0 else set()))
        return list(zip(cuts[:-1], cuts[1:]))

    def _conv(self, which: str, t: float) -> np.ndarray:
        total = None
        for a, b in self._segments(t):
            y = 0.5 * (b - a) * self.gx + 0.5 * (a + b)
            w = 0.5 * (b - a) * self.gw * kernel(y)
            vals = np.asarray(getattr(self.h, which)(t - self.rho * y), dtype=float)
            contrib = np.tensordot(w, vals, axes=([0], [0])) if vals.ndim > 1 else np.sum(
                w * vals
            )
            total = contrib if total is None else total + contrib
        return total

    def value(self, t: float):
        return self._conv("f", t)

    def d1(self, t: float):
        return self._conv("d1", t)

    def d2(self, t: float):
        return self._conv("d2", t)


class SmoothedScalar:
    """The C-infinity replacement of a PiecewiseC1Scalar on its band."""

    def __init__(self, h: PiecewiseC1Scalar, nu: float, rho: float):
        self.h = h
        self.nu = nu
        self.rho = rho
        self.chi = Cutoff(nu)
        self.conv = _Convolver(h, rho)

    def _eval_one(self, t: float):
        tau = t - self.h.t0
        if abs(tau) >= self.nu:
            return float(self.h.f(t)), float(self.h.d1(t)), float(self.h.d2(t))
        c, c1, c2 = self.chi.value(tau), self.chi.d1(tau), self.chi.d2(tau)
        q, q1, q2 = self.conv.value(t), self.conv.d1(t), self.conv.d2(t)
        f, f1, f2 = float(self.h.f(t)), float(self.h.d1(t)), float(self.h.d2(t))
        val = f + c * (q - f)
        d1 = f1 + c1 * (q - f) + c * (q1 - f1)
        d2 = f2 + c2 * (q - f) + 2.0 * c1 * (q1 - f1) + c * (q2 - f2)
        return val, d1, d2

    def f(self, t):
        return self._vec(t, 0)

    def d1(self, t):
        return self._vec(t, 1)

    def d2(self, t):
        return self._vec(t, 2)

    def _vec(self, t, idx):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return self._eval_one(float(t))[idx]
        return np.array([self._eval_one(float(s))[idx] for s in t.ravel()]).reshape(t.shape)


def _interval_bound(h: PiecewiseC1Scalar, nu: float, mu: float, grid: int = 81):
    # interval spanned by the pieces' second derivatives over the band
    ts = h.t0 + np.linspace(-nu, nu, grid)
    d2s = h.d2(ts)
    return float(np.min(d2s)) - mu, float(np.max(d2s)) + mu


def mollify_c1(h: PiecewiseC1Scalar, nu: float, mu: float, grid: int = 161) -> SmoothedScalar:
    """Smooth h on [t0-nu, t0+nu] within the C^1 budget mu.

    The smoothing radius is halved until both the C^1 distance and the
    second-derivative interval bound are met; exhaustion raises
    BudgetInfeasible rather than silently violating the budget.
    """
    if nu <= 0 or mu <= 0:
        raise ValueError("nu and mu must be positive")
    ts = h.t0 + np.linspace(-nu, nu, grid)
    lo, hi = _interval_bound(h, nu, mu)
    rho = nu / 4.0
    for _ in range(MAX_HALVINGS):
        sm = SmoothedScalar(h, nu, rho)
        vals = sm.f(ts)
        d1s = sm.d1(ts)
        d2s = sm.d2(ts)
        c1_dist = max(
            float(np.max(np.abs(vals - h.f(ts)))), float(np.max(np.abs(d1s - h.d1(ts))))
        )
        in_interval = bool(np.all(d2s >= lo - 1e-12) and np.all(d2s <= hi + 1e-12))
        if c1_dist <= mu and in_interval:
            return sm
        rho *= 0.5
    raise BudgetInfeasible(
        f"no smoothing radius met mu={mu} on band nu={nu} after {MAX_HALVINGS} halvings"
    )


# ---------------------------------------------------------------------------
# metric blocks


class _BlockJunction:
    """Piecewise (m, m) block family around one interface, C^1 in t."""

    def __init__(self, x, t0, left_triple, right_triple):
        self.x = x
        self.t0 = t0
        self.left = left_triple  # (value, d1, d2) callables of (x, t)
        self.right = right_triple

    def _pick(self, idx: int, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            fn = self.left[idx] if float(t) <= self.t0 else self.right[idx]
            return np.asarray(fn(self.x, float(t)), dtype=float)
        out = None
        left_mask = t <= self.t0
        for mask, fns in ((left_mask, self.left), (~left_mask, self.right)):
            if np.any(mask):
                vals = np.asarray(fns[idx](self.x, t[mask]), dtype=float)
                if out is None:
                    mm = vals.shape[-1]
                    out = np.zeros(t.shape + (mm, mm))
                out[mask] = vals
        return out

    def f(self, t):
        return self._pick(0, t)

    def d1(self, t):
        return self._pick(1, t)

    def d2(self, t):
        return self._pick(2, t)


class SmoothedBandBlock:
    """Region block functions for a smoothing band around one interface."""

    def __init__(self, t0, nu, rho, left_triple, right_triple):
        self.t0 = t0
        self.nu = nu
        self.rho = rho
        self.left = left_triple
        self.right = right_triple
        self.chi = Cutoff(nu)

    def _smoothed(self, x):
        h = _BlockJunction(x, self.t0, self.left, self.right)
        conv = _Convolver(h, self.rho)
        return h, conv

    def _eval(self, x, t: float):
        h, conv = self._smoothed(x)
        tau = t - self.t0
        f, f1, f2 = h.f(t), h.d1(t), h.d2(t)
        if abs(tau) >= self.nu:
            return f, f1, f2
        c, c1, c2 = self.chi.value(tau), self.chi.d1(tau), self.chi.d2(tau)
        q, q1, q2 = conv.value(t), conv.d1(t), conv.d2(t)
        val = f + c * (q - f)
        d1 = f1 + c1 * (q - f) + c * (q1 - f1)
        d2 = f2 + c2 * (q - f) + 2.0 * c1 * (q1 - f1) + c * (q2 - f2)
        return val, d1, d2

    def _vec(self, x, t, idx):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return self._eval(x, float(t))[idx]
        flat = [self._eval(x, float(s))[idx] for s in t.ravel()]
        return np.asarray(flat).reshape(t.shape + flat[0].shape)

    def value(self, x, t):
        return self._vec(x, t, 0)

    def d1(self, x, t):
        return self._vec(x, t, 1)

    def d2(self, x, t):
        return self._vec(x, t, 2)


@dataclass(frozen=True)
class SmoothedGlued:
    """Five-region C-infinity chart plus the radii the search settled on."""

    chart: CollarChart
    glued: GluedMetric
    nu: float
    mu: float
    rho_left: float
    rho_right: float


def _band_budget_ok(block: SmoothedBandBlock, raw: _BlockJunction, x, mu, lo, hi, ts):
    for t in ts:
        val, d1, d2 = block._eval(x, float(t))
        f, f1, _ = raw.f(t), raw.d1(t), None
        if np.max(np.abs(val - f)) > mu or np.max(np.abs(d1 - f1)) > mu:
            return False
        if np.any(d2 < lo - 1e-12) or np.any(d2 > hi + 1e-12):
            return False
        if not is_positive_definite(0.5 * (val + val.T)):
            return False
    return True


def _search_band(t0, nu, mu, left_triple, right_triple, x_samples, grid: int = 41):
    ts = t0 + np.linspace(-nu, nu, grid)
    rho = nu / 4.0
    for _ in range(MAX_HALVINGS):
        block = SmoothedBandBlock(t0, nu, rho, left_triple, right_triple)
        ok = True
        for x in x_samples:
            raw = _BlockJunction(x, t0, left_triple, right_triple)
            # elementwise interval spanned by the raw second derivative on the band
            raw_d2 = np.stack([raw.d2(float(t)) for t in ts])
            lo = np.min(raw_d2, axis=0) - mu
            hi = np.max(raw_d2, axis=0) + mu
            if not _band_budget_ok(block, raw, x, mu, lo, hi, ts):
                ok = False
                break
        if ok:
            return block
        rho *= 0.5
    raise BudgetInfeasible(f"band at t={t0}: no radius met mu={mu} within {MAX_HALVINGS} halvings")


def smooth_glued(gm: GluedMetric, nu: float, mu: float) -> SmoothedGlued:
    """Replace the two C^1 interfaces of a glued metric by smooth bands.

    Every metric coefficient is mollified in t; smoothness in x is inherited
    from the smooth x-dependence of the pieces and the x-independent radius.
    """
    eps, iota = gm.params.eps, gm.params.iota
    if nu >= min(eps, iota):
        raise BandTooWide(f"nu={nu} must be smaller than min(eps, iota)={min(eps, iota)}")
    h1, h2, fam = gm.h1, gm.h2, gm.family
    # convolution reaches nu + rho <= nu + nu/4 past each interface
    reach = 1.25 * nu
    if h1.interval[0] > -eps - nu - reach or h2.interval[1] < eps + nu + reach:
        raise BandTooWide("collars too short for the smoothing band plus kernel reach")

    xs = default_x_samples(h1.section, per_axis=2)
    left_triple_1 = (h1.value, h1.d1, h1.d2)
    spline_triple = (fam.g, fam.g1, fam.g2)
    right_triple_2 = (h2.value, h2.d1, h2.d2)

    band1 = _search_band(-eps, nu, mu, left_triple_1, spline_triple, xs)
    band2 = _search_band(eps, nu, mu, spline_triple, right_triple_2, xs)

    regions = [
        Region(-(eps + iota), -eps - nu, "h1", h1.value, h1.d1, h1.d2),
        Region(-eps - nu, -eps + nu, "band1", band1.value, band1.d1, band1.d2),
        Region(-eps + nu, eps - nu, "spline", fam.g, fam.g1, fam.g2),
        Region(eps - nu, eps + nu, "band2", band2.value, band2.d1, band2.d2),
        Region(eps + nu, eps + iota, "h2", h2.value, h2.d1, h2.d2),
    ]
    chart = CollarChart(h1.section, regions)

    # final positive-definiteness sweep with witness
    for x in xs:
        for t in np.linspace(-(eps + iota), eps + iota, 33):
            g = chart.region_at(float(t)).value(x, float(t))
            if not is_positive_definite(0.5 * (g + g.T)):
                raise NotPositiveDefinite(
                    "smoothed metric lost definiteness; mu too large",
                    witness=(x.tolist(), float(t)),
                )
    return SmoothedGlued(
        chart=chart, glued=gm, nu=nu, mu=mu, rho_left=band1.rho, rho_right=band2.rho
    )

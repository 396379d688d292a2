"""C^1 cubic interpolation between two collar metrics.

The interpolated family on [-eps, eps] matches values and first t-derivatives
of the outer collars at the interfaces, and exposes its first and second
t-derivatives in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chart import (
    CollarChart,
    CollarMetric,
    Region,
    is_positive_definite,
    sections_compatible,
)
from .curvature import k_positive_sum, whiten
from .errors import CollarTooShallow, DimensionMismatch, NotPositiveDefinite


@dataclass(frozen=True)
class GluingParams:
    """All widths and budgets of one gluing run."""

    eps: float  # spline half-width
    iota: float  # collar depth kept beyond the spline
    nu: float  # smoothing half-width around t = +-eps
    mu: float  # C^1 closeness budget for the smoothing
    kappa: float = 0.0  # curvature floor to certify against
    delta: float = 0.1  # almost-nonnegativity budget

    def __post_init__(self):
        if min(self.eps, self.iota, self.nu, self.mu, self.delta) <= 0:
            raise ValueError("eps, iota, nu, mu, delta must all be positive")
        if self.nu >= self.iota:
            raise ValueError("smoothing half-width nu must be smaller than iota")


@dataclass(frozen=True)
class SplineFamily:
    """The cubic family g_t with closed-form g_t' and g_t''."""

    eps: float
    h1: CollarMetric
    h2: CollarMetric

    def _endpoint_data(self, x):
        e = self.eps
        h1m = self.h1.value(x, -e)
        h2p = self.h2.value(x, e)
        d = h2p - h1m
        a = self.h1.d1(x, -e) - d / (2.0 * e)
        b = self.h2.d1(x, e) - d / (2.0 * e)
        return h1m, h2p, d, a, b

    def g(self, x, t):
        e = self.eps
        t = np.asarray(t, dtype=float)
        h1m, h2p, _, a, b = self._endpoint_data(x)
        c1 = ((t + e) / (2 * e))[..., None, None] if t.ndim else (t + e) / (2 * e)
        c2 = ((t - e) / (2 * e))[..., None, None] if t.ndim else (t - e) / (2 * e)
        c3 = ((t - e) ** 2 * (t + e) / (4 * e**2))[..., None, None] if t.ndim else (
            (t - e) ** 2 * (t + e) / (4 * e**2)
        )
        c4 = ((t + e) ** 2 * (t - e) / (4 * e**2))[..., None, None] if t.ndim else (
            (t + e) ** 2 * (t - e) / (4 * e**2)
        )
        return c1 * h2p - c2 * h1m + c3 * a + c4 * b

    def g1(self, x, t):
        e = self.eps
        t = np.asarray(t, dtype=float)
        h1m, h2p, d, a, b = self._endpoint_data(x)
        fa = (2 * (t**2 - e**2) + (t - e) ** 2) / (4 * e**2)
        fb = (2 * (t**2 - e**2) + (t + e) ** 2) / (4 * e**2)
        if t.ndim:
            fa, fb = fa[..., None, None], fb[..., None, None]
        return d / (2 * e) + fa * a + fb * b

    def g2(self, x, t):
        e = self.eps
        t = np.asarray(t, dtype=float)
        _, _, _, a, b = self._endpoint_data(x)
        fa = (3 * t - e) / (2 * e**2)
        fb = (3 * t + e) / (2 * e**2)
        if t.ndim:
            fa, fb = fa[..., None, None], fb[..., None, None]
        return fa * a + fb * b

    def linear_d1_model(self, x, t):
        """The linear interpolation ((eps-t) h1'(0) + (eps+t) h2'(0)) / 2 eps."""
        e = self.eps
        t = np.asarray(t, dtype=float)
        p1 = self.h1.d1(x, 0.0)
        p2 = self.h2.d1(x, 0.0)
        ca, cb = (e - t) / (2 * e), (e + t) / (2 * e)
        if t.ndim:
            ca, cb = ca[..., None, None], cb[..., None, None]
        return ca * p1 + cb * p2


def spline_family(h1: CollarMetric, h2: CollarMetric, eps: float) -> SplineFamily:
    """Build the C^1 interpolation family; rejects too-shallow collars."""
    if not sections_compatible(h1.section, h2.section) or h1.dim != h2.dim:
        raise DimensionMismatch("collars must share dimension and cross-section chart")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if h1.interval[0] > -eps or h2.interval[1] < eps:
        raise CollarTooShallow(
            f"eps={eps} exceeds collar coverage h1 {h1.interval}, h2 {h2.interval}"
        )
    return SplineFamily(eps=float(eps), h1=h1, h2=h2)


def second_fundamental_form(family, x, t):
    """II_t = -1/2 * (t-derivative of the slice metric)."""
    if isinstance(family, SplineFamily):
        return -0.5 * family.g1(x, t)
    return -0.5 * family.d1(x, t)


def spline_d1_check(family: SplineFamily, x_samples, t_count: int = 21) -> dict:
    """Max deviation of g' from the linear interpolation of h_i'(0)."""
    e = family.eps
    ts = np.linspace(-e, e, t_count)
    worst = 0.0
    for x in x_samples:
        dev = family.g1(x, ts) - family.linear_d1_model(x, ts)
        worst = max(worst, float(np.max(np.abs(dev))))
    return {"eps": e, "max_deviation": worst}


def boundary_condition_check(
    h1: CollarMetric, h2: CollarMetric, mode: str, k: int, x_samples=None
) -> dict:
    """Strict positivity margin of h1'(0) - h2'(0) in the mode's sense.

    RicK: smallest eigenvalue of the difference form (must be > 0).
    ScK:  sum of the k' smallest eigenvalues in an h(0)-orthonormal basis,
          with k' = k for k <= n-2 and k' = k-1 for k in {n-1, n}.
    """
    if not sections_compatible(h1.section, h2.section) or h1.dim != h2.dim:
        raise DimensionMismatch("collars must share dimension and cross-section chart")
    n = h1.dim
    if mode not in ("RicK", "ScK"):
        raise ValueError("mode must be 'RicK' or 'ScK'")
    if x_samples is None:
        x_samples = default_x_samples(h1.section)
    margin = np.inf
    for x in x_samples:
        p = h1.d1(x, 0.0) - h2.d1(x, 0.0)
        p = 0.5 * (p + p.T)
        if mode == "RicK":
            val = float(np.min(np.linalg.eigvalsh(p)))
        else:
            kp = k if k <= n - 2 else k - 1
            kp = max(1, min(kp, n - 1))
            h0 = 0.5 * (h1.value(x, 0.0) + h2.value(x, 0.0))
            val = k_positive_sum(whiten(p, h0), kp)
        margin = min(margin, val)
    return {"satisfied": bool(margin > 0), "margin": float(margin), "mode": mode, "k": k}


def default_x_samples(section, per_axis: int = 3):
    m = section.lo.shape[0]
    axes = []
    for j in range(m):
        lo, hi = section.lo[j], section.hi[j]
        if section.periodic[j]:
            axes.append(np.linspace(lo, hi, per_axis, endpoint=False))
        else:
            pad = 0.05 * (hi - lo)
            axes.append(np.linspace(lo + pad, hi - pad, per_axis))
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    return [np.asarray(g) for g in grid]


@dataclass(frozen=True)
class GluedMetric:
    """The C^1 piecewise chart: h1 region, spline region, h2 region."""

    h1: CollarMetric
    h2: CollarMetric
    family: SplineFamily
    params: GluingParams
    chart: CollarChart = field(repr=False, default=None)


def assemble_glued(
    h1: CollarMetric,
    h2: CollarMetric,
    params: GluingParams,
    posdef_samples: int = 9,
) -> GluedMetric:
    """Three-region C^1 chart over t in [-eps-iota, eps+iota].

    Positive definiteness of the spline is verified on a sample grid; the
    first failing sample is reported as witness.
    """
    eps, iota = params.eps, params.iota
    if h1.interval[0] > -(eps + iota) or h2.interval[1] < eps + iota:
        raise CollarTooShallow(
            f"need t in [-{eps + iota}, {eps + iota}] but collars cover "
            f"{h1.interval} and {h2.interval}"
        )
    fam = spline_family(h1, h2, eps)

    xs = default_x_samples(h1.section)
    for x in xs:
        for t in np.linspace(-eps, eps, posdef_samples):
            gm = fam.g(x, float(t))
            if not is_positive_definite(0.5 * (gm + gm.T)):
                raise NotPositiveDefinite(
                    "spline metric lost definiteness; eps too large",
                    witness=(x.tolist(), float(t)),
                )

    regions = [
        Region(-(eps + iota), -eps, "h1", h1.value, h1.d1, h1.d2),
        Region(-eps, eps, "spline", fam.g, fam.g1, fam.g2),
        Region(eps, eps + iota, "h2", h2.value, h2.d1, h2.d2),
    ]
    chart = CollarChart(h1.section, regions)
    return GluedMetric(h1=h1, h2=h2, family=fam, params=params, chart=chart)


def c0_glued_chart(h1: CollarMetric, h2: CollarMetric, half_width: float) -> CollarChart:
    """The raw C^0 union chart (no spline): h1 for t < 0, h2 for t > 0."""
    if h1.interval[0] > -half_width or h2.interval[1] < half_width:
        raise CollarTooShallow("collars do not cover the requested half-width")
    regions = [
        Region(-half_width, 0.0, "h1", h1.value, h1.d1, h1.d2),
        Region(0.0, half_width, "h2", h2.value, h2.d1, h2.d2),
    ]
    return CollarChart(h1.section, regions)

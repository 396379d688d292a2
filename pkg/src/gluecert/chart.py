"""Single-chart metrics with a distinguished collar coordinate.

A collar chart carries coordinates (x_1, ..., x_{n-1}, t) where t is the
normal distance to the gluing hypersurface and the metric has the block form
dt^2 + g_t(x).  Two model cross-sections are supported: round spheres in a
polar chart (poles excluded by a margin) and flat tori.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, OutOfDomain
from .scalars import ScalarFunction, reflect

POLE_MARGIN = 0.1
SYM_TOL = 1e-12


# ---------------------------------------------------------------------------
# points and symmetric-form helpers


@dataclass(frozen=True)
class Point:
    """Chart point: cross-section coordinates x plus collar coordinate t."""

    x: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if not np.all(np.isfinite(self.x)) or not np.isfinite(self.t):
            raise ValueError("point coordinates must be finite")

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.x, [self.t]])


def check_symmetric(a: np.ndarray, tol: float = SYM_TOL) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > tol * scale:
        from .errors import NonSymmetric

        raise NonSymmetric(f"matrix asymmetry exceeds {tol} (relative)")
    return 0.5 * (a + a.T)


def is_positive_definite(a: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(a)
        return True
    except np.linalg.LinAlgError:
        return False


# ---------------------------------------------------------------------------
# cross-sections


class SphereSection:
    """Round unit S^m in hyperspherical coordinates (theta_1,...,theta_m).

    Metric: diag(1, sin^2 th_1, sin^2 th_1 sin^2 th_2, ...).  The chart box
    keeps every angle in [margin, pi - margin] to stay clear of the poles.
    """

    def __init__(self, m: int, margin: float = POLE_MARGIN):
        if m < 1:
            raise ValueError("sphere dimension must be >= 1")
        self.m = m
        self.margin = margin
        self.lo = np.full(m, margin)
        self.hi = np.full(m, np.pi - margin)
        self.periodic = np.zeros(m, dtype=bool)

    def metric(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = np.ones(self.m)
        for j in range(1, self.m):
            d[j] = d[j - 1] * np.sin(x[j - 1]) ** 2
        return np.diag(d)

    def describe(self):
        return {"kind": "sphere", "m": self.m, "margin": self.margin}


class TorusSection:
    """Flat m-torus chart; coordinates are periodic with the given periods."""

    def __init__(self, m: int, periods: Optional[Sequence[float]] = None):
        if m < 1:
            raise ValueError("torus dimension must be >= 1")
        self.m = m
        per = np.asarray(periods if periods is not None else [2 * np.pi] * m, float)
        self.lo = np.zeros(m)
        self.hi = per.copy()
        self.periodic = np.ones(m, dtype=bool)

    def metric(self, x: np.ndarray) -> np.ndarray:
        return np.eye(self.m)

    def describe(self):
        return {"kind": "torus", "m": self.m, "periods": list(self.hi)}


def sections_compatible(a, b) -> bool:
    da, db = a.describe(), b.describe()
    return da == db


# ---------------------------------------------------------------------------
# collar metrics (one-parameter families of cross-section metrics)


@dataclass(frozen=True)
class CollarMetric:
    """Family t -> h(t) of metrics on the cross-section, with exact t-derivatives.

    `value`, `d1`, `d2` map (x, t) -> (m, m) block; t may be an array, in which
    case the result has shape (..., m, m).  `side` records which half-line of
    the glued coordinate the collar occupies ("left" = M1, "right" = M2).
    """

    dim: int
    section: object
    interval: tuple
    depth: float
    side: str
    value: Callable
    d1: Callable
    d2: Optional[Callable] = None
    label: str = ""

    def __post_init__(self):
        if self.depth <= 0:
            raise ValueError("collar depth must be positive")
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    @property
    def m(self) -> int:
        return self.dim - 1


def _side_depth(interval: tuple, side: str) -> float:
    """Usable collar length from the boundary t=0 into the collar's side."""
    lo, hi = interval
    depth = hi if side == "right" else -lo
    if depth <= 0:
        raise ValueError(f"collar interval {interval} does not extend into side {side!r}")
    return depth


def _warped_block(phi: ScalarFunction, section) -> tuple:
    def value(x, t):
        s = section.metric(x)
        f = np.asarray(phi.f(t), dtype=float)
        return f[..., None, None] ** 2 * s

    def d1(x, t):
        s = section.metric(x)
        f = np.asarray(phi.f(t), dtype=float)
        df = np.asarray(phi.d1(t), dtype=float)
        return (2.0 * f * df)[..., None, None] * s

    def d2(x, t):
        s = section.metric(x)
        f = np.asarray(phi.f(t), dtype=float)
        df = np.asarray(phi.d1(t), dtype=float)
        d2f = np.asarray(phi.d2(t), dtype=float)
        return (2.0 * df**2 + 2.0 * f * d2f)[..., None, None] * s

    return value, d1, d2


def make_warped_product(
    phi: ScalarFunction,
    n: int,
    interval: tuple,
    side: str = "right",
    margin: float = POLE_MARGIN,
) -> CollarMetric:
    """Collar h(t) = phi(t)^2 * (round unit S^{n-1} metric in a polar chart)."""
    if n < 3:
        raise ValueError("warped-product collar needs dimension n >= 3")
    lo, hi = float(interval[0]), float(interval[1])
    probe = np.linspace(lo, hi, 257)
    if np.min(phi.f(probe)) <= 0:
        raise ValueError("warping profile must be positive on the interval")
    section = SphereSection(n - 1, margin)
    value, d1, d2 = _warped_block(phi, section)
    return CollarMetric(
        dim=n,
        section=section,
        interval=(lo, hi),
        depth=_side_depth((lo, hi), side),
        side=side,
        value=value,
        d1=d1,
        d2=d2,
        label=f"warped[{phi.name}]",
    )


def make_diagonal_torus(
    profiles: Sequence[ScalarFunction],
    interval: tuple,
    side: str = "right",
    periods: Optional[Sequence[float]] = None,
) -> CollarMetric:
    """Collar h(t) = diag(a_1(t)^2, ..., a_{n-1}(t)^2) on a periodic chart."""
    m = len(profiles)
    lo, hi = float(interval[0]), float(interval[1])
    probe = np.linspace(lo, hi, 257)
    for a in profiles:
        if np.min(a.f(probe)) <= 0:
            raise ValueError("all torus scale profiles must be positive")
    section = TorusSection(m, periods)

    def value(x, t):
        f = np.stack([np.asarray(a.f(t), dtype=float) for a in profiles], axis=-1)
        return f[..., :, None] ** 2 * np.eye(m)

    def d1(x, t):
        f = np.stack([np.asarray(a.f(t), dtype=float) for a in profiles], axis=-1)
        df = np.stack([np.asarray(a.d1(t), dtype=float) for a in profiles], axis=-1)
        return (2.0 * f * df)[..., :, None] * np.eye(m)

    def d2(x, t):
        f = np.stack([np.asarray(a.f(t), dtype=float) for a in profiles], axis=-1)
        df = np.stack([np.asarray(a.d1(t), dtype=float) for a in profiles], axis=-1)
        d2f = np.stack([np.asarray(a.d2(t), dtype=float) for a in profiles], axis=-1)
        return (2.0 * df**2 + 2.0 * f * d2f)[..., :, None] * np.eye(m)

    return CollarMetric(
        dim=m + 1,
        section=section,
        interval=(lo, hi),
        depth=_side_depth((lo, hi), side),
        side=side,
        value=value,
        d1=d1,
        d2=d2,
        label="torus[" + ",".join(a.name for a in profiles) + "]",
    )


def mirror_collar(c: CollarMetric) -> CollarMetric:
    """Reflect the collar across t=0: value'(x,t) = value(x,-t), d1' = -d1(x,-t)."""
    lo, hi = c.interval

    def value(x, t):
        return c.value(x, -np.asarray(t, dtype=float))

    def d1(x, t):
        return -c.d1(x, -np.asarray(t, dtype=float))

    d2 = None
    if c.d2 is not None:

        def d2(x, t):  # noqa: F811
            return c.d2(x, -np.asarray(t, dtype=float))

    return CollarMetric(
        dim=c.dim,
        section=c.section,
        interval=(-hi, -lo),
        depth=c.depth,
        side="left" if c.side == "right" else "right",
        value=value,
        d1=d1,
        d2=d2,
        label=f"mirror({c.label})",
    )


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class Region:
    """One t-interval of a piecewise collar chart, with analytic t-derivatives."""

    t_lo: float
    t_hi: float
    name: str
    value: Callable  # (x, t) -> (m, m), vectorized over t
    d1: Callable
    d2: Optional[Callable] = None


class CollarChart:
    """Chart with metric dt^2 + g_t(x), g_t defined piecewise in t.

    Coordinates are ordered (x_1, ..., x_{n-1}, t); the t index is dim-1.
    """

    def __init__(self, section, regions: Sequence[Region], scale: float = 1.0):
        if not regions:
            raise ValueError("chart needs at least one region")
        self.section = section
        self.regions = sorted(regions, key=lambda r: r.t_lo)
        self.m = section.lo.shape[0]
        self.dim = self.m + 1
        self.t_index = self.m
        self.scale = scale
        self.box_lo = np.concatenate([section.lo, [self.regions[0].t_lo]])
        self.box_hi = np.concatenate([section.hi, [self.regions[-1].t_hi]])
        self.periodic = np.concatenate([section.periodic, [False]])

    # region lookup: interfaces belong to the region on their left, except the
    # very first interval which owns its left endpoint
    def region_at(self, t: float) -> Region:
        if t < self.regions[0].t_lo - 1e-12 or t > self.regions[-1].t_hi + 1e-12:
            raise OutOfDomain(f"t={t} outside [{self.regions[0].t_lo}, {self.regions[-1].t_hi}]")
        for r in self.regions:
            if t <= r.t_hi:
                return r
        return self.regions[-1]

    def contains(self, z: np.ndarray) -> bool:
        z = np.asarray(z, dtype=float)
        inside = (z >= self.box_lo - 1e-12) & (z <= self.box_hi + 1e-12)
        return bool(np.all(inside | self.periodic))

    def block(self, x, t):
        return self.region_at(float(np.atleast_1d(t)[0]) if np.ndim(t) else t).value(x, t)

    def _full(self, blk: np.ndarray, corner: float) -> np.ndarray:
        g = np.zeros(blk.shape[:-2] + (self.dim, self.dim))
        g[..., : self.m, : self.m] = blk
        g[..., self.m, self.m] = corner
        return g

    def metric_at(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        x, t = z[: self.m], float(z[self.m])
        r = self.region_at(t)
        return self._full(r.value(x, t), 1.0)

    def metric_t1_at(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        x, t = z[: self.m], float(z[self.m])
        r = self.region_at(t)
        return self._full(r.d1(x, t), 0.0)

    def metric_t2_at(self, z: np.ndarray) -> Optional[np.ndarray]:
        z = np.asarray(z, dtype=float)
        x, t = z[: self.m], float(z[self.m])
        r = self.region_at(t)
        if r.d2 is None:
            return None
        return self._full(r.d2(x, t), 0.0)

    def interfaces(self):
        return [r.t_lo for r in self.regions[1:]]


class SliceChart:
    """Cross-section X x {t} with the induced metric g_t, as its own chart."""

    def __init__(self, collar_chart: CollarChart, t: float):
        self.parent = collar_chart
        self.t = float(t)
        self.dim = collar_chart.m
        self.t_index = None
        self.scale = collar_chart.scale
        self.box_lo = collar_chart.box_lo[: self.dim].copy()
        self.box_hi = collar_chart.box_hi[: self.dim].copy()
        self.periodic = collar_chart.periodic[: self.dim].copy()
        self._region = collar_chart.region_at(self.t)

    def contains(self, z):
        z = np.asarray(z, dtype=float)
        inside = (z >= self.box_lo - 1e-12) & (z <= self.box_hi + 1e-12)
        return bool(np.all(inside | self.periodic))

    def metric_at(self, z: np.ndarray) -> np.ndarray:
        return self._region.value(np.asarray(z, dtype=float), self.t)


def collar_chart(c: CollarMetric, interval: Optional[tuple] = None) -> CollarChart:
    """Single-region chart dt^2 + h(t) for one collar metric."""
    lo, hi = interval if interval is not None else c.interval
    if lo < c.interval[0] - 1e-12 or hi > c.interval[1] + 1e-12:
        raise OutOfDomain("requested interval exceeds the collar's definition range")
    region = Region(lo, hi, "collar", c.value, c.d1, c.d2)
    return CollarChart(c.section, [region])


def round_sphere_chart(n: int, margin: float = POLE_MARGIN) -> CollarChart:
    """The round unit S^n as a polar collar chart dt^2 + sin(t)^2 ds^2_{n-1}."""
    from .scalars import ScalarFunction as SF

    phi = SF(f=np.sin, d1=np.cos, d2=lambda t: -np.sin(t), name="sin(t)")
    c = make_warped_product(phi, n, (margin, np.pi - margin), margin=margin)
    return collar_chart(c)


def evaluate_metric(chart, p: Point) -> np.ndarray:
    """Full metric matrix at p; validates domain, symmetry and definiteness."""
    z = p.z
    if z.shape[0] != chart.dim:
        raise DimensionMismatch(f"point has {z.shape[0]} coords, chart is {chart.dim}-dim")
    if not chart.contains(z):
        raise OutOfDomain(f"point {z} outside chart box")
    g = check_symmetric(chart.metric_at(z))
    if not is_positive_definite(g):
        raise NotPositiveDefinite("metric lost positive definiteness", witness=z)
    return g

"""Curvature quantities of a chart metric.

Derivatives in the collar direction use the chart's analytic formulas when
available; cross-section derivatives use central finite differences with one
Richardson extrapolation level.  Sign convention: the round unit sphere has
sectional curvature +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegeneratePlane, EmptySampling, NonSymmetric, OutOfDomain

DEFAULT_FD_STEP = 1e-4
PLANE_TOL = 1e-14


@dataclass(frozen=True)
class FDConfig:
    """Finite-difference policy for metric derivatives."""

    step: float = DEFAULT_FD_STEP  # relative to chart.scale
    richardson: bool = True
    use_analytic_t: bool = True


@dataclass(frozen=True)
class SamplingPlan:
    """Grid and direction counts for curvature certification sweeps."""

    x_per_axis: int = 3
    t_per_region: int = 7
    directions: int = 200
    refine_rounds: int = 1
    refine_directions: int = 50
    refine_radius: float = 0.1
    interface_margin: float = 0.05  # fraction of region width kept clear

    def scaled(self, factor: int) -> "SamplingPlan":
        return SamplingPlan(
            x_per_axis=self.x_per_axis * factor,
            t_per_region=self.t_per_region * factor,
            directions=self.directions,
            refine_rounds=self.refine_rounds,
            refine_directions=self.refine_directions,
            refine_radius=self.refine_radius,
            interface_margin=self.interface_margin,
        )


# ---------------------------------------------------------------------------
# metric jets


def _central(f, z, c, h, richardson):
    e = np.zeros_like(z)
    e[c] = 1.0

    def d(step):
        return (f(z + step * e) - f(z - step * e)) / (2.0 * step)

    if not richardson:
        return d(h)
    return (4.0 * d(h / 2) - d(h)) / 3.0


def _second_diag(f, z, c, h, richardson, f0):
    e = np.zeros_like(z)
    e[c] = 1.0

    def d(step):
        return (f(z + step * e) - 2.0 * f0 + f(z - step * e)) / step**2

    if not richardson:
        return d(h)
    return (4.0 * d(h / 2) - d(h)) / 3.0


def _second_mixed(f, z, c1, c2, h, richardson):
    e1 = np.zeros_like(z)
    e1[c1] = 1.0
    e2 = np.zeros_like(z)
    e2[c2] = 1.0

    def d(step):
        return (
            f(z + step * (e1 + e2))
            - f(z + step * (e1 - e2))
            - f(z - step * (e1 - e2))
            + f(z - step * (e1 + e2))
        ) / (4.0 * step**2)

    if not richardson:
        return d(h)
    return (4.0 * d(h / 2) - d(h)) / 3.0


def metric_jet(chart, z: np.ndarray, cfg: FDConfig = FDConfig()):
    """Return (g, dg, d2g) at z: dg[c] = d_c g, d2g[c1,c2] = d_c1 d_c2 g."""
    z = np.asarray(z, dtype=float)
    n = chart.dim
    if not chart.contains(z):
        raise OutOfDomain(f"point {z} outside chart box")
    h = cfg.step * getattr(chart, "scale", 1.0)
    f = chart.metric_at
    g = f(z)
    dg = np.zeros((n, n, n))
    d2g = np.zeros((n, n, n, n))

    t_index = getattr(chart, "t_index", None)
    analytic_t = (
        cfg.use_analytic_t
        and t_index is not None
        and hasattr(chart, "metric_t1_at")
        and chart.metric_t2_at(z) is not None
    )

    for c in range(n):
        if analytic_t and c == t_index:
            dg[c] = chart.metric_t1_at(z)
        else:
            dg[c] = _central(f, z, c, h, cfg.richardson)

    for c in range(n):
        if analytic_t and c == t_index:
            d2g[c, c] = chart.metric_t2_at(z)
        else:
            d2g[c, c] = _second_diag(f, z, c, h, cfg.richardson, g)
    for c1 in range(n):
        for c2 in range(c1 + 1, n):
            if analytic_t and c2 == t_index:
                # d_x d_t g via finite difference of the analytic t-derivative
                val = _central(chart.metric_t1_at, z, c1, h, cfg.richardson)
            else:
                val = _second_mixed(f, z, c1, c2, h, cfg.richardson)
            d2g[c1, c2] = val
            d2g[c2, c1] = val
    return g, dg, d2g


# ---------------------------------------------------------------------------
# tensors


def christoffel_from_jet(g, dg):
    """Gamma^c_{ab} = 1/2 g^{cd} (d_a g_{db} + d_b g_{da} - d_d g_{ab})."""
    ginv = np.linalg.inv(g)
    # dg has layout dg[c, a, b] = d_c g_{ab}
    term = np.einsum("adb->dab", dg) + np.einsum("bda->dab", dg) - dg
    return 0.5 * np.einsum("cd,dab->cab", ginv, term)


def riemann_lowered_from_jet(g, dg, d2g):
    """Fully lowered curvature R_{abcd}; symmetries hold algebraically.

    Convention: K(u, v) = R(u, v, u, v) / |u ^ v|^2, round sphere gives +1.
    """
    gamma = christoffel_from_jet(g, dg)
    # second-derivative block, d2g[p, q, a, b] = d_p d_q g_{ab}
    sec = 0.5 * (
        np.einsum("bcad->abcd", d2g)
        + np.einsum("adbc->abcd", d2g)
        - np.einsum("acbd->abcd", d2g)
        - np.einsum("bdac->abcd", d2g)
    )
    lowered = np.einsum("ef,ebc,fad->abcd", g, gamma, gamma) - np.einsum(
        "ef,eac,fbd->abcd", g, gamma, gamma
    )
    return sec + lowered


def ricci_from_riemann(g, riem):
    """Ric_{ab} = g^{cd} R_{c a d b}."""
    ginv = np.linalg.inv(g)
    return np.einsum("cd,cadb->ab", ginv, riem)


@dataclass(frozen=True)
class CurvatureAtPoint:
    """Cached tensors at one chart point."""

    z: np.ndarray
    g: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray = field(default=None)

    @property
    def ric(self):
        return self.ricci


def curvature_at(chart, z, cfg: FDConfig = FDConfig()) -> CurvatureAtPoint:
    g, dg, d2g = metric_jet(chart, z, cfg)
    riem = riemann_lowered_from_jet(g, dg, d2g)
    ric = ricci_from_riemann(g, riem)
    return CurvatureAtPoint(z=np.asarray(z, float), g=g, riemann=riem, ricci=ric)


def christoffel(chart, p, cfg: FDConfig = FDConfig()):
    """Gamma^c_{ab} at a point (Point or raw coordinate vector)."""
    z = p.z if hasattr(p, "z") else np.asarray(p, float)
    g, dg, _ = metric_jet(chart, z, cfg)
    return christoffel_from_jet(g, dg)


def sectional_from_tensors(g, riem, u, v):
    num = np.einsum("abcd,a,b,c,d->", riem, u, v, u, v)
    area2 = u @ g @ u * (v @ g @ v) - (u @ g @ v) ** 2
    norm2 = (u @ g @ u) * (v @ g @ v)
    if area2 < PLANE_TOL * max(norm2, 1.0):
        raise DegeneratePlane("plane spanned by u, v is numerically degenerate")
    return num / area2


def sectional(chart, p, u, v, cfg: FDConfig = FDConfig()):
    z = p.z if hasattr(p, "z") else np.asarray(p, float)
    cp = curvature_at(chart, z, cfg)
    return sectional_from_tensors(cp.g, cp.riemann, np.asarray(u, float), np.asarray(v, float))


def orthonormal_complement(g, v):
    """g-orthonormal basis of the g-orthogonal complement of unit vector v."""
    n = g.shape[0]
    basis = [v / np.sqrt(v @ g @ v)]
    for k in range(n):
        w = np.zeros(n)
        w[k] = 1.0
        for b in basis:
            w = w - (b @ g @ w) * b
        nrm = np.sqrt(max(w @ g @ w, 0.0))
        if nrm > 1e-8:
            basis.append(w / nrm)
        if len(basis) == n:
            break
    if len(basis) < n:
        raise np.linalg.LinAlgError("failed to complete orthonormal basis")
    return np.stack(basis[1:], axis=1)  # (n, n-1)


def jacobi_from_tensors(g, riem, v):
    """Symmetric matrix of e -> R(e, v, v, .) on the complement of v."""
    b = orthonormal_complement(g, v)
    mv = np.einsum("abcd,b,d->ac", riem, v, v)
    j = b.T @ mv @ b
    return 0.5 * (j + j.T), b


def jacobi_operator(chart, p, v, cfg: FDConfig = FDConfig()):
    z = p.z if hasattr(p, "z") else np.asarray(p, float)
    cp = curvature_at(chart, z, cfg)
    v = np.asarray(v, float)
    v = v / np.sqrt(v @ cp.g @ v)
    j, _ = jacobi_from_tensors(cp.g, cp.riemann, v)
    return j


# ---------------------------------------------------------------------------
# eigen-sum machinery


def k_positive_sum(form, k: int) -> float:
    """Sum of the k smallest eigenvalues of a symmetric operator."""
    a = np.asarray(form, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetric("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > 1e-10 * scale:
        raise NonSymmetric("matrix is not symmetric")
    if not 1 <= k <= a.shape[0]:
        raise ValueError(f"k={k} out of range for size {a.shape[0]}")
    w = np.linalg.eigvalsh(0.5 * (a + a.T))
    return float(np.sum(w[:k]))


def whiten(form, metric):
    """Express a bilinear form in a metric-orthonormal basis (L^-1 P L^-T)."""
    l = np.linalg.cholesky(metric)
    li = np.linalg.inv(l)
    return li @ form @ li.T


# ---------------------------------------------------------------------------
# deterministic direction sets


def _halton_normals(dim: int, count: int, skip: int = 20) -> np.ndarray:
    from scipy.stats import qmc
    from scipy.special import ndtri

    sampler = qmc.Halton(d=dim, scramble=False)
    pts = sampler.random(count + skip)[skip:]
    normals = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    return normals


def unit_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic low-discrepancy set of Euclidean unit vectors."""
    normals = _halton_normals(dim, count)
    norms = np.linalg.norm(normals, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    return normals / norms


def refine_directions(center: np.ndarray, count: int, radius: float) -> np.ndarray:
    """Perturbed unit vectors at angular radius around a running minimizer."""
    dim = center.shape[0]
    offsets = unit_directions(dim, count) * radius
    cands = center[None, :] + offsets
    return cands / np.linalg.norm(cands, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# grid minima


def _eigsum_k_jacobi(cp: CurvatureAtPoint, v: np.ndarray, k: int) -> float:
    v = v / np.sqrt(v @ cp.g @ v)
    j, _ = jacobi_from_tensors(cp.g, cp.riemann, v)
    w = np.linalg.eigvalsh(j)
    return float(np.sum(w[:k]))


def min_ric_k_at_point(cp: CurvatureAtPoint, k: int, plan: SamplingPlan):
    """Min over sampled g-unit directions v of the k-smallest Jacobi eigensum."""
    n = cp.g.shape[0]
    best_val, best_dir = np.inf, None
    dirs = unit_directions(n, plan.directions)
    for v in dirs:
        val = _eigsum_k_jacobi(cp, v, k)
        if val < best_val:
            best_val, best_dir = val, v
    for _ in range(plan.refine_rounds):
        for v in refine_directions(best_dir, plan.refine_directions, plan.refine_radius):
            val = _eigsum_k_jacobi(cp, v, k)
            if val < best_val:
                best_val, best_dir = val, v
    return best_val, best_dir


def sc_k_at_point(cp: CurvatureAtPoint, k: int) -> float:
    """Sum of the k smallest eigenvalues of the Ricci endomorphism."""
    from scipy.linalg import eigh

    w = eigh(cp.ricci, cp.g, eigvals_only=True)
    return float(np.sum(np.sort(w)[:k]))


def grid_points(chart, plan: SamplingPlan, regions=None):
    """Deterministic evaluation grid, per region, away from interfaces."""
    m = chart.dim - 1 if getattr(chart, "t_index", None) is not None else chart.dim
    axes = []
    for j in range(m):
        lo, hi = chart.box_lo[j], chart.box_hi[j]
        if chart.periodic[j]:
            axes.append(np.linspace(lo, hi, plan.x_per_axis, endpoint=False))
        else:
            pad = 0.05 * (hi - lo)
            axes.append(np.linspace(lo + pad, hi - pad, plan.x_per_axis))
    xs = (
        np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
        if m > 0
        else np.zeros((1, 0))
    )

    if getattr(chart, "t_index", None) is None:
        return [("all", [np.asarray(x) for x in xs])]

    region_list = regions if regions is not None else chart.regions
    out = []
    for r in region_list:
        width = r.t_hi - r.t_lo
        pad = plan.interface_margin * width
        ts = np.linspace(r.t_lo + pad, r.t_hi - pad, plan.t_per_region)
        pts = [np.concatenate([x, [t]]) for x in xs for t in ts]
        out.append((r.name, pts))
    return out


def ric_k_min(chart, k: int, plan: SamplingPlan, cfg: FDConfig = FDConfig()):
    """Min over sampled (point, direction) of the k-th intermediate Ricci sum."""
    n = chart.dim
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} out of range 1..{n - 1}")
    groups = grid_points(chart, plan)
    best = (np.inf, None, None, None)  # value, z, v, region
    count = 0
    for name, pts in groups:
        for z in pts:
            count += 1
            cp = curvature_at(chart, z, cfg)
            val, v = min_ric_k_at_point(cp, k, plan)
            if val < best[0]:
                best = (val, z, v, name)
    if count == 0:
        raise EmptySampling("sampling plan produced no points")
    return best


def sc_k_min(chart, k: int, plan: SamplingPlan, cfg: FDConfig = FDConfig()):
    """Min over sampled points of the k smallest Ricci-endomorphism eigensum."""
    n = chart.dim
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    groups = grid_points(chart, plan)
    best = (np.inf, None, None)
    count = 0
    for name, pts in groups:
        for z in pts:
            count += 1
            cp = curvature_at(chart, z, cfg)
            val = sc_k_at_point(cp, k)
            if val < best[0]:
                best = (val, z, name)
    if count == 0:
        raise EmptySampling("sampling plan produced no points")
    return best

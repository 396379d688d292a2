import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gluecert import (
    FDConfig,
    SamplingPlan,
    collar_chart,
    curvature_at,
    jacobi_operator,
    make_diagonal_torus,
    round_sphere_chart,
    sectional,
)
from gluecert.curvature import (
    grid_points,
    k_positive_sum,
    min_ric_k_at_point,
    orthonormal_complement,
    ric_k_min,
    sc_k_at_point,
    unit_directions,
    whiten,
)
from gluecert.errors import DegeneratePlane
from gluecert.scalars import constant, cosh_profile

RNG = np.random.default_rng(7)


def test_round_sphere_sectional_is_one():
    chart = round_sphere_chart(4)
    z = np.array([1.1, 0.9, 1.3, 1.2])
    for _ in range(5):
        u = RNG.standard_normal(4)
        v = RNG.standard_normal(4)
        assert sectional(chart, z, u, v) == pytest.approx(1.0, abs=5e-7)


def test_round_sphere_ricci_is_three_g():
    chart = round_sphere_chart(4)
    z = np.array([0.8, 1.4, 0.6, 1.9])
    cp = curvature_at(chart, z)
    assert np.allclose(cp.ric, 3.0 * cp.g, atol=5e-7)


def test_hyperbolic_collar_sectional_minus_one():
    # dt^2 + cosh(t)^2 dx^2 has constant curvature -1
    c = make_diagonal_torus([cosh_profile()], (-0.6, 0.0), side="left")
    chart = collar_chart(c)
    z = np.array([0.3, -0.25])
    u = np.array([1.0, 0.0])
    v = np.array([0.3, 1.0])
    assert sectional(chart, z, u, v) == pytest.approx(-1.0, abs=1e-8)


def test_flat_torus_collar_is_flat():
    c = make_diagonal_torus([constant(1.0), constant(2.0)], (-0.5, 0.0), side="left")
    chart = collar_chart(c)
    z = np.array([0.2, 0.4, -0.3])
    cp = curvature_at(chart, z)
    assert np.max(np.abs(cp.riemann)) < 1e-9
    assert np.max(np.abs(cp.ric)) < 1e-9


def test_degenerate_plane_raises():
    chart = round_sphere_chart(3)
    z = np.array([1.0, 1.0, 1.5])
    u = np.array([1.0, 2.0, 0.5])
    with pytest.raises(DegeneratePlane):
        sectional(chart, z, u, 2.0 * u)


def test_jacobi_operator_round_sphere():
    chart = round_sphere_chart(4)
    z = np.array([1.2, 1.0, 0.7, 1.1])
    v = RNG.standard_normal(4)
    j = jacobi_operator(chart, z, v)
    # the operator lives on the g-orthonormal complement of v; curvature 1
    assert j.shape == (3, 3)
    assert np.allclose(np.linalg.eigvalsh(j), 1.0, atol=1e-6)


def test_min_ric_k_matches_full_ricci_for_k_max():
    chart = round_sphere_chart(4)
    z = np.array([1.0, 1.2, 0.9, 1.4])
    cp = curvature_at(chart, z)
    val, direction = min_ric_k_at_point(cp, 3, SamplingPlan(directions=64))
    assert val == pytest.approx(3.0, abs=1e-5)
    assert direction.shape == (4,)


def test_sc_k_full_equals_scalar_curvature():
    chart = round_sphere_chart(4)
    z = np.array([1.3, 0.8, 1.1, 1.6])
    # Sc_n = scalar curvature = n(n-1) on the unit n-sphere
    assert sc_k_at_point(curvature_at(chart, z), 4) == pytest.approx(12.0, abs=1e-5)


@given(st.integers(0, 500), st.integers(1, 5))
@settings(max_examples=40, deadline=None)
def test_k_positive_sum_is_sum_of_smallest_eigenvalues(seed, k):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((5, 5))
    form = a + a.T
    k = min(k, 5)
    ev = np.sort(np.linalg.eigvalsh(form))
    assert k_positive_sum(form, k) == pytest.approx(float(np.sum(ev[:k])))


@given(st.integers(0, 500))
@settings(max_examples=40, deadline=None)
def test_whiten_gives_generalized_eigenvalues(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((4, 4))
    p = a + a.T
    b = rng.standard_normal((4, 4))
    h = b @ b.T + 4 * np.eye(4)
    from scipy.linalg import eigh

    assert np.allclose(
        np.linalg.eigvalsh(whiten(p, h)), eigh(p, h, eigvals_only=True), atol=1e-10
    )


def test_unit_directions_deterministic_unit_norm():
    d1 = unit_directions(4, 50)
    d2 = unit_directions(4, 50)
    assert np.array_equal(d1, d2)
    assert np.allclose(np.linalg.norm(d1, axis=1), 1.0)


def test_orthonormal_complement():
    g = np.diag([1.0, 4.0, 9.0])
    v = np.array([1.0, 0.0, 0.0])
    comp = orthonormal_complement(g, v)
    assert comp.shape == (3, 2)
    assert np.allclose(comp.T @ g @ comp, np.eye(2), atol=1e-12)
    assert np.allclose(comp.T @ g @ v, 0.0, atol=1e-12)


def test_grid_points_stay_inside_chart():
    chart = round_sphere_chart(4)
    groups = grid_points(chart, SamplingPlan(x_per_axis=2, t_per_region=3))
    assert len(groups) > 0
    for _name, pts in groups:
        assert len(pts) > 0
        for z in pts:
            assert chart.contains(z)


def test_ric_k_min_round_sphere():
    chart = round_sphere_chart(3)
    plan = SamplingPlan(x_per_axis=2, t_per_region=3, directions=32, refine_rounds=0)
    value, z, v, region = ric_k_min(chart, 1, plan)
    assert value == pytest.approx(1.0, abs=1e-4)
    assert chart.contains(z)
    assert region == "collar"

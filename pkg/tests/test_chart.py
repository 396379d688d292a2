import numpy as np
import pytest
from hypothesis import given, strategies as st

from gluecert import (
    CollarChart,
    collar_chart,
    make_diagonal_torus,
    make_warped_product,
    mirror_collar,
    round_sphere_chart,
)
from gluecert.chart import Region, check_symmetric, is_positive_definite
from gluecert.errors import NonSymmetric, OutOfDomain
from gluecert.scalars import affine, constant, polynomial


def test_warped_product_metric_block():
    phi = affine(1.0, 0.5)
    c = make_warped_product(phi, 4, (-0.8, 0.0), side="left")
    x = np.array([1.2, 0.9, 0.4])
    g = c.value(x, -0.3)
    # diag(phi^2 * round-sphere metric)
    s = c.section.metric(x)
    assert np.allclose(g, phi.f(-0.3) ** 2 * s)
    assert np.allclose(c.d1(x, -0.3), 2 * phi.f(-0.3) * phi.d1(-0.3) * s)


def test_warped_product_rejects_nonpositive_profile():
    with pytest.raises(ValueError):
        make_warped_product(affine(0.1, 1.0), 4, (-0.8, 0.0), side="left")


def test_mirror_collar_reflects():
    c = make_warped_product(polynomial([1.0, 0.3, 0.1]), 4, (-0.8, 0.0), side="left")
    m = mirror_collar(c)
    x = np.array([1.0, 1.1, 0.7])
    assert np.allclose(m.value(x, 0.3), c.value(x, -0.3))
    assert np.allclose(m.d1(x, 0.3), -c.d1(x, -0.3))
    assert m.interval == (0.0, 0.8)


def test_diagonal_torus_block():
    c = make_diagonal_torus([affine(1.0, 0.2), constant(2.0)], (-0.5, 0.0), side="left")
    x = np.zeros(2)
    g = c.value(x, -0.1)
    assert np.allclose(g, np.diag([(1.0 - 0.02) ** 2, 4.0]))


def test_collar_chart_metric_includes_dt2_corner():
    c = make_warped_product(affine(1.0, 0.5), 4, (-0.8, 0.0), side="left")
    chart = collar_chart(c)
    z = np.array([1.2, 0.9, 0.4, -0.3])
    g = chart.metric_at(z)
    assert g.shape == (4, 4)
    assert g[3, 3] == 1.0
    assert np.allclose(g[:3, 3], 0.0)
    assert np.allclose(g[:3, :3], c.value(z[:3], z[3]))


def test_chart_out_of_domain():
    c = make_warped_product(affine(1.0, 0.5), 4, (-0.8, 0.0), side="left")
    chart = collar_chart(c)
    with pytest.raises(OutOfDomain):
        chart.region_at(0.5)


def test_region_lookup_at_interface_is_deterministic():
    r1 = Region(-1.0, 0.0, "a", None, None, None)
    r2 = Region(0.0, 1.0, "b", None, None, None)
    c = make_warped_product(affine(1.0, 0.5), 4, (-0.8, 0.0), side="left")
    chart = CollarChart(c.section, [r1, r2])
    assert chart.region_at(0.0).name == "a"
    assert chart.interfaces() == [0.0]


def test_round_sphere_chart_is_unit_sphere_metric():
    chart = round_sphere_chart(4)
    z = np.array([1.0, 1.2, 0.8, 1.4])
    g = chart.metric_at(z)
    # polar chart: dt^2 + sin(t)^2 * round S^3
    assert g[3, 3] == 1.0
    s3 = np.diag([1.0, np.sin(z[0]) ** 2, np.sin(z[0]) ** 2 * np.sin(z[1]) ** 2])
    assert np.allclose(g[:3, :3], np.sin(z[3]) ** 2 * s3)


def test_check_symmetric_raises():
    with pytest.raises(NonSymmetric):
        check_symmetric(np.array([[1.0, 0.1], [0.0, 1.0]]))


@given(st.integers(2, 5), st.integers(0, 1000))
def test_is_positive_definite_gram_matrices(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    gram = a @ a.T + 1e-6 * np.eye(n)
    assert is_positive_definite(gram)
    assert not is_positive_definite(gram - np.linalg.eigvalsh(gram)[-1] * np.eye(n))

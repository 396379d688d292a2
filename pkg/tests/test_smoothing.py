import numpy as np
import pytest
from scipy.integrate import quad

from gluecert import GluingParams, PiecewiseC1Scalar, assemble_glued, mollify_c1, smooth_glued
from gluecert.errors import BandTooWide
from gluecert.scalars import constant, polynomial
from gluecert.smoothing import Cutoff, kernel

X = np.array([1.2, 0.9, 0.5])


def test_kernel_unit_mass_and_support():
    mass, err = quad(lambda u: float(kernel(np.array(u))), -1.0, 1.0, points=[0.0])
    assert mass == pytest.approx(1.0, abs=max(1e-12, 10 * err))
    assert kernel(np.array([-1.0, 1.0, 1.5])).tolist() == [0.0, 0.0, 0.0]
    u = np.linspace(-0.99, 0.99, 101)
    assert np.all(kernel(u) > 0)
    assert np.allclose(kernel(u), kernel(-u))


def test_cutoff_plateau_support_and_derivatives():
    chi = Cutoff(0.2)
    assert chi.value(0.0) == 1.0
    assert chi.value(0.09) == 1.0
    assert chi.value(0.21) == 0.0
    assert 0.0 < chi.value(0.15) < 1.0
    fd = 1e-6
    for tau in (-0.17, -0.12, 0.13, 0.18):
        d1_fd = (chi.value(tau + fd) - chi.value(tau - fd)) / (2 * fd)
        d2_fd = (chi.d1(tau + fd) - chi.d1(tau - fd)) / (2 * fd)
        assert chi.d1(tau) == pytest.approx(d1_fd, abs=1e-5)
        assert chi.d2(tau) == pytest.approx(d2_fd, abs=1e-4)


def test_piecewise_c1_validation():
    with pytest.raises(ValueError):
        PiecewiseC1Scalar(constant(0.0), constant(1.0))  # value jump
    with pytest.raises(ValueError):
        PiecewiseC1Scalar(polynomial([0.0, 1.0]), polynomial([0.0, 2.0]))  # slope jump
    PiecewiseC1Scalar(constant(0.0), polynomial([0.0, 0.0, 1.0]))  # ok: 0 vs t^2


def test_mollify_c1_canonical_scalar():
    h = PiecewiseC1Scalar(constant(0.0), polynomial([0.0, 0.0, 1.0]))
    nu, mu = 0.1, 0.01
    sm = mollify_c1(h, nu, mu)
    ts = np.linspace(-nu, nu, 401)
    assert float(np.max(np.abs(sm.f(ts) - h.f(ts)))) <= mu
    assert float(np.max(np.abs(sm.d1(ts) - h.d1(ts)))) <= mu
    d2 = sm.d2(ts)
    # second derivative stays in [min(0,2) - mu, max(0,2) + mu]
    assert np.all(d2 >= -mu - 1e-9) and np.all(d2 <= 2.0 + mu + 1e-9)
    # untouched outside the band
    for t in (-0.2, -0.11, 0.11, 0.2):
        assert sm.f(t) == h.f(t)
        assert sm.d1(t) == h.d1(t)


def test_mollified_derivatives_are_consistent():
    h = PiecewiseC1Scalar(polynomial([0.0, 1.0, 2.0]), polynomial([0.0, 1.0, -1.0]))
    sm = mollify_c1(h, 0.1, 1e-3)
    fd = 1e-6
    for t in np.linspace(-0.09, 0.09, 19):
        d1_fd = (sm.f(t + fd) - sm.f(t - fd)) / (2 * fd)
        d2_fd = (sm.d1(t + fd) - sm.d1(t - fd)) / (2 * fd)
        assert sm.d1(t) == pytest.approx(d1_fd, abs=1e-7)
        assert sm.d2(t) == pytest.approx(d2_fd, abs=1e-6)


def test_mollify_trivially_smooth_input():
    # both pieces the same polynomial: any budget is attainable
    p = polynomial([1.0, 0.5, 0.25])
    h = PiecewiseC1Scalar(p, p)
    sm = mollify_c1(h, 0.1, 1e-10)
    ts = np.linspace(-0.1, 0.1, 101)
    assert float(np.max(np.abs(sm.f(ts) - h.f(ts)))) <= 1e-10


def test_mollify_rejects_bad_budgets():
    h = PiecewiseC1Scalar(constant(0.0), polynomial([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        mollify_c1(h, -0.1, 0.01)
    with pytest.raises(ValueError):
        mollify_c1(h, 0.1, 0.0)


def test_smooth_glued_five_regions_and_exact_joins(generic_pair):
    h1, h2 = generic_pair
    gm = assemble_glued(h1, h2, GluingParams(eps=0.1, iota=0.3, nu=0.02, mu=1e-3))
    sg = smooth_glued(gm, 0.02, 1e-3)
    chart = sg.chart
    assert [r.name for r in chart.regions] == ["h1", "band1", "spline", "band2", "h2"]
    assert sg.rho_left > 0 and sg.rho_right > 0
    for t0 in chart.interfaces():
        left = chart.region_at(t0)
        right = next(r for r in chart.regions if r.t_lo == t0)
        assert np.allclose(left.value(X, t0), right.value(X, t0), atol=1e-12)
        assert np.allclose(left.d1(X, t0), right.d1(X, t0), atol=1e-12)
        assert np.allclose(left.d2(X, t0), right.d2(X, t0), atol=1e-10)


def test_smooth_glued_band_budget(generic_pair):
    h1, h2 = generic_pair
    nu, mu = 0.02, 1e-3
    gm = assemble_glued(h1, h2, GluingParams(eps=0.1, iota=0.3, nu=nu, mu=mu))
    sg = smooth_glued(gm, nu, mu)
    chart = sg.chart
    raw = gm.chart
    for t in np.linspace(-0.1 - nu, -0.1 + nu, 21):
        g_s = chart.region_at(float(t)).value(X, float(t))
        g_r = raw.region_at(float(t)).value(X, float(t))
        assert float(np.max(np.abs(g_s - g_r))) <= mu + 1e-12


def test_smooth_glued_rejects_wide_band(generic_pair):
    h1, h2 = generic_pair
    gm = assemble_glued(h1, h2, GluingParams(eps=0.1, iota=0.3, nu=0.02, mu=1e-3))
    with pytest.raises(BandTooWide):
        smooth_glued(gm, 0.15, 1e-3)

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gluecert.scalars import (
    affine,
    constant,
    cosh_profile,
    exp_rate,
    from_spec,
    polynomial,
    reflect,
    sin_shifted,
)

FD = 1e-6


def _fd_check(fn, ts, tol=1e-5):
    for t in ts:
        d1_fd = (fn.f(t + FD) - fn.f(t - FD)) / (2 * FD)
        d2_fd = (fn.d1(t + FD) - fn.d1(t - FD)) / (2 * FD)
        assert abs(fn.d1(t) - d1_fd) < tol * max(1.0, abs(fn.d1(t)))
        assert abs(fn.d2(t) - d2_fd) < tol * max(1.0, abs(fn.d2(t)))


@pytest.mark.parametrize(
    "fn",
    [
        constant(2.5),
        affine(1.0, 0.5),
        polynomial([1.0, 0.3, 0.1, -0.02]),
        sin_shifted(np.pi / 3, 1.0),
        cosh_profile(),
        exp_rate(0.7),
    ],
)
def test_derivatives_match_finite_differences(fn):
    _fd_check(fn, np.linspace(-0.7, 0.7, 9))


def test_polynomial_values():
    p = polynomial([1.0, 2.0, 3.0])  # 1 + 2t + 3t^2
    assert p.f(0.5) == pytest.approx(1 + 1 + 0.75)
    assert p.d1(0.5) == pytest.approx(2 + 3.0)
    assert p.d2(0.5) == pytest.approx(6.0)


@given(st.floats(-0.9, 0.9))
def test_reflect_is_pullback_by_negation(t):
    fn = polynomial([1.0, 0.4, -0.2, 0.05])
    r = reflect(fn)
    assert r.f(t) == pytest.approx(fn.f(-t))
    assert r.d1(t) == pytest.approx(-fn.d1(-t))
    assert r.d2(t) == pytest.approx(fn.d2(-t))


def test_from_spec_round_trip():
    fn = from_spec({"preset": "sin_shifted", "r": 1.0, "sign": 1.0})
    assert fn.f(0.0) == pytest.approx(np.sin(1.0))
    fn = from_spec({"preset": "poly", "coeffs": [2.0, 1.0]})
    assert fn.f(1.0) == pytest.approx(3.0)
    with pytest.raises((KeyError, TypeError)):
        from_spec({"preset": "nope"})

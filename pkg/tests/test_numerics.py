import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from relsemcom.numerics import lambert_w0, lambert_w0_array

# bisection on w*exp(w) - 1 over [0, 1], 200 halvings
OMEGA = 0.5671432904097838


def bisect_w(x, lo=0.0, hi=None):
    hi = hi if hi is not None else max(1.0, math.log1p(x))
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) > x:
            hi = mid
        else:
            lo = mid
    return lo


def test_zero():
    assert lambert_w0(0.0) == 0.0


def test_e():
    assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-15)


def test_omega_constant():
    assert lambert_w0(1.0) == pytest.approx(OMEGA, abs=1e-15)


def test_negative_rejected():
    with pytest.raises(ValueError):
        lambert_w0(-1e-9)
    with pytest.raises(ValueError):
        lambert_w0_array([1.0, -2.0])


def test_nan_rejected():
    with pytest.raises(ValueError):
        lambert_w0(float("nan"))


@pytest.mark.parametrize("x", [1e-6, 0.3, 2.0, 10.0, 1e3, 1e9])
def test_matches_bisection(x):
    assert lambert_w0(x) == pytest.approx(bisect_w(x), rel=1e-12)


def test_identity_and_monotone_on_log_grid():
    xs = np.concatenate([[0.0], np.logspace(-6, 9, 200)])
    ws = np.array([lambert_w0(x) for x in xs])
    resid = np.abs(ws * np.exp(ws) - xs)
    assert np.all(resid <= 1e-12 * np.maximum(1.0, xs))
    assert np.all(np.diff(ws) > 0)


def test_array_version_agrees():
    xs = np.concatenate([[0.0], np.logspace(-8, 12, 101)])
    scalar = np.array([lambert_w0(x) for x in xs])
    np.testing.assert_allclose(lambert_w0_array(xs), scalar, rtol=1e-14, atol=0)


@settings(max_examples=300)
@given(st.floats(min_value=0.0, max_value=1e12, allow_nan=False))
def test_defining_identity(x):
    w = lambert_w0(x)
    assert w >= 0
    assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, x)

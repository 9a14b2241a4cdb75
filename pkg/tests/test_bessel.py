import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymrabi.bessel import bessel_j, bessel_row

from oracles import bessel_series, bessel_series_signed

# first zero of J_1, bisection on the 40-term series
J1_ZERO = 3.8317059702075125


def test_origin():
    assert bessel_j(0, 0.0) == 1.0
    for n in (1, 2, 7, -3):
        assert bessel_j(n, 0.0) == 0.0
    assert list(bessel_row(3, 0.0).values) == [1.0, 0.0, 0.0, 0.0]


def test_first_zero_of_j1():
    assert abs(bessel_j(1, J1_ZERO)) < 1e-10
    assert abs(bessel_j(1, 3.831705970207512)) < 1e-10


def test_row_matches_series_oracle():
    row = bessel_row(20, 1.5)
    ref = [bessel_series(n, 1.5, 30) for n in range(21)]
    assert np.max(np.abs(row.values - ref)) <= 1e-12


@pytest.mark.parametrize("x", [0.01, 0.3, 1.0, 2.5, 3.83, -4.2, 5.0])
def test_series_agreement_small_argument(x):
    for n in range(-12, 31):
        assert abs(bessel_j(n, x) - bessel_series_signed(n, x, 40)) <= 1e-12


@pytest.mark.parametrize("x", [0.7, 9.3, 24.0, 49.5, -31.1])
def test_against_mpmath_wide_range(x):
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    row = bessel_row(60, x)
    ref = np.array([float(mpmath.besselj(n, x)) for n in range(61)])
    assert np.max(np.abs(row.values - ref)) <= 1e-12


@pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 20.0])
def test_normalisation(x):
    n = int(abs(x)) + 20
    v = bessel_row(n, x).values
    assert 1.0 - (v[0] ** 2 + 2 * np.sum(v[1:] ** 2)) <= 1e-10


@given(st.floats(0.1, 30.0), st.integers(2, 40))
@settings(max_examples=60, deadline=None)
def test_recurrence(x, order_max):
    v = bessel_row(order_max, x).values
    n = np.arange(1, order_max)
    resid = v[n - 1] + v[n + 1] - (2 * n / x) * v[n]
    assert np.max(np.abs(resid)) <= 1e-10


@given(st.floats(-50.0, 50.0), st.integers(0, 60))
@settings(max_examples=80, deadline=None)
def test_reflection_and_bound(x, n):
    a, b = bessel_j(n, x), bessel_j(n, -x)
    assert b == pytest.approx((-1) ** n * a, abs=1e-15)
    assert bessel_j(-n, x) == pytest.approx((-1) ** n * a, abs=1e-15)
    assert abs(a) <= 1.0


def test_row_lookup_and_entrywise_consistency():
    row = bessel_row(10, 2.2)
    for n in range(-10, 11):
        assert row[n] == pytest.approx(bessel_j(n, 2.2), abs=1e-14)
    with pytest.raises(IndexError):
        row[11]


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_nonfinite_rejected(bad):
    with pytest.raises(ValueError):
        bessel_j(1, bad)
    with pytest.raises(ValueError):
        bessel_row(3, bad)


def test_tiny_argument_does_not_overflow():
    v = bessel_row(60, 1e-200).values
    assert v[0] == 1.0
    assert v[1] == pytest.approx(5e-201)
    assert np.all(np.isfinite(v))

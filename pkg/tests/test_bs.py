import math

import numpy as np
import pytest
from scipy.special import ndtr

from cgmyasym.bs import BsQuote, ImpliedVolError, bs_call, bs_char_fn, bs_vega, implied_vol


def phi(x):
    # normal CDF from the complementary error function
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def test_atm_closed_form():
    assert bs_call(0.2, 0.25, 0.0) == pytest.approx(2 * phi(0.05) - 1, rel=1e-14)


def test_atm_identity_grid():
    for s in np.linspace(0.01, 2, 40):
        for t in (1 / 2520, 1 / 252, 0.1, 1.0, 4.0):
            x = s * math.sqrt(t) / 2
            assert abs(bs_call(s, t, 0.0) - math.erf(x / math.sqrt(2))) < 1e-14


def test_large_vol_limit():
    assert abs(bs_call(5.0, 4.0, 0.0) - 1.0) < 1e-6


def test_general_formula():
    s, t, k = 0.3, 0.5, 0.01
    d1 = (-k + 0.5 * s * s * t) / (s * math.sqrt(t))
    expect = ndtr(d1) - math.exp(k) * ndtr(d1 - s * math.sqrt(t))
    assert bs_call(s, t, k) == pytest.approx(expect, rel=1e-13)


def test_monotone_in_sigma():
    sig = np.linspace(0.01, 2, 400)
    for t, k in ((1 / 252, 0.0), (0.25, 0.03), (1.0, -0.05)):
        prices = np.array([bs_call(s, t, k) for s in sig])
        assert np.all(np.diff(prices) > 0)


def test_vega_matches_difference():
    s, t, k, h = 0.25, 0.3, 0.02, 1e-6
    fd = (bs_call(s + h, t, k) - bs_call(s - h, t, k)) / (2 * h)
    assert bs_vega(s, t, k) == pytest.approx(fd, rel=1e-7)


def test_char_fn():
    assert bs_char_fn(0.2, 1.0, 0.0) == 1.0
    assert abs(bs_char_fn(0.2, 1.0, -1j) - 1.0) < 1e-15
    assert bs_char_fn(0.2, 1.0, 1.0) == pytest.approx(np.exp(-0.02 * (1 + 1j)), rel=1e-15)


def test_iv_round_trip_example():
    assert implied_vol(bs_call(0.3, 0.5, 0.01), 0.5, 0.01) == pytest.approx(0.3, abs=1e-10)


def test_iv_atm_example():
    assert implied_vol(2 * phi(0.05) - 1, 0.25, 0.0) == pytest.approx(0.2, abs=1e-10)


def test_iv_residual():
    price = bs_call(0.37, 0.1, -0.01)
    s = implied_vol(price, 0.1, -0.01)
    assert abs(bs_call(s, 0.1, -0.01) - price) < 1e-12


@pytest.mark.parametrize("price, k", [(1 - math.exp(-0.02), -0.02), (1.0, 0.0), (-1e-3, 0.01), (0.0, 0.01)])
def test_iv_rejects_out_of_bounds(price, k):
    with pytest.raises(ImpliedVolError):
        implied_vol(price, 0.5, k)


def test_iv_round_trip_grid():
    """implied_vol of bs_call returns the input vol to 1e-10 over the whole grid."""
    worst, bad = 0.0, []
    for s in np.linspace(0.05, 1.0, 20):
        for t in np.geomspace(1 / 252, 1.0, 10):
            for k in np.linspace(-0.05, 0.05, 11):
                try:
                    err = abs(implied_vol(bs_call(s, t, k), t, k) - s)
                except ImpliedVolError:
                    # time value lost below double precision
                    err = math.inf
                worst = max(worst, err)
                if err > 1e-10:
                    bad.append((round(s, 3), round(t, 5), round(k, 3), err))
    assert not bad, f"{len(bad)} grid points exceed 1e-10 (worst {worst:.2e}): {bad[:5]}"


def test_quote_bounds():
    BsQuote(0.25, 0.0, 0.05)
    with pytest.raises(ValueError):
        BsQuote(0.25, -0.1, 0.01)
    with pytest.raises(ValueError):
        BsQuote(0.25, 0.0, 1.0)

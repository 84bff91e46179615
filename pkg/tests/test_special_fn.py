import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from realginibre.special_fn import LogScaledReal, cosh_truncated, erfc, log_gamma


def test_log_gamma_trivial_values():
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-15)
    assert log_gamma(1.0) == 0.0


def test_log_gamma_recurrence_oracle():
    # Gamma(7.5) = 6.5 * 5.5 * ... * 0.5 * Gamma(0.5)
    value = math.sqrt(math.pi)
    x = 0.5
    while x < 7.5:
        value *= x
        x += 1.0
    assert log_gamma(7.5) == pytest.approx(math.log(value), rel=1e-13)


def test_log_gamma_large_argument_stirling():
    x = 1e6
    stirling = (x - 0.5) * math.log(x) - x + 0.5 * math.log(2 * math.pi) + 1 / (12 * x)
    assert log_gamma(x) == pytest.approx(stirling, rel=1e-13)


def test_log_gamma_domain():
    with pytest.raises(ValueError):
        log_gamma(0.0)
    with pytest.raises(ValueError):
        log_gamma(np.array([1.0, -2.0]))


@given(st.floats(0.5, 50.0))
def test_log_gamma_ratio_property(x):
    assert math.exp(log_gamma(x + 1) - log_gamma(x)) == pytest.approx(x, rel=1e-12)


def test_cosh_truncated_examples():
    assert cosh_truncated(3.0, 1) == 1.0
    assert cosh_truncated(1.0, 50) == pytest.approx(math.cosh(1.0), rel=1e-15)
    assert cosh_truncated(2.0, 3) == pytest.approx(1 + 2 + 16 / 24, rel=1e-15)


@given(st.floats(-30, 30), st.integers(1, 40))
def test_cosh_truncated_bounded_and_monotone(x, n):
    a = cosh_truncated(x, n)
    assert a <= math.cosh(x) * (1 + 1e-14)
    assert cosh_truncated(x, n + 1) >= a


def test_cosh_truncated_saturation_is_flagged():
    value, saturated = cosh_truncated(1e200, 5, full_output=True)
    assert math.isinf(value) and saturated
    value, saturated = cosh_truncated(2.0, 5, full_output=True)
    assert not saturated
    with pytest.raises(ValueError):
        cosh_truncated(1.0, 0)


def _erfc_oracle(x):
    val, _ = integrate.quad(lambda t: math.exp(-t * t), x, np.inf, epsabs=1e-15, epsrel=1e-13)
    return 2 / math.sqrt(math.pi) * val


def test_erfc_examples():
    assert erfc(0.0) == 1.0
    assert erfc(10.0) < 1e-40
    assert erfc(1.0) == pytest.approx(_erfc_oracle(1.0), abs=1e-12)
    assert erfc(1.0) == pytest.approx(0.1572992071, abs=1e-10)


def test_erfc_grid_against_quadrature_and_monotone():
    grid = np.arange(0.0, 4.01, 0.25)
    vals = erfc(grid)
    for x, v in zip(grid, vals):
        assert v == pytest.approx(_erfc_oracle(x), abs=1e-10)
    assert np.all(np.diff(vals) < 0)
    assert np.allclose(erfc(grid) + erfc(-grid), 2.0, rtol=0, atol=1e-15)


def test_log_scaled_real_algebra():
    a = LogScaledReal.from_float(3.0)
    b = LogScaledReal.from_float(-0.5)
    assert float(a * b) == pytest.approx(-1.5)
    assert float(a + b) == pytest.approx(2.5)
    assert float(a / b) == pytest.approx(-6.0)
    zero = LogScaledReal.from_float(0.0)
    assert zero.sign == 0 and float(zero * a) == 0.0
    assert float(a + LogScaledReal.from_float(-3.0)) == 0.0
    huge = LogScaledReal.from_log(2000.0)
    assert (huge / huge).log_magnitude == 0.0
    with pytest.raises(ValueError):
        LogScaledReal(2, 0.0)

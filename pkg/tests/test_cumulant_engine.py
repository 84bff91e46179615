import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from realginibre.asymptotics import scaling_exponent
from realginibre.cumulant_engine import (
    CapacityError,
    EvenPolynomial,
    compositions,
    covariance_monomials,
    cumulant,
    m_nu_matrix,
    mean_nr_exact,
    mgf_determinant,
    trace_sum_z,
    variance_nr_exact,
)
from realginibre.skew_basis import a_inner_quadrature

SQRT2 = math.sqrt(2.0)
ONE = EvenPolynomial.parse("1")
X2 = EvenPolynomial.parse("x2")


def _variance_oracle(n):
    """Direct summation of the exact variance formula with plain gamma values."""
    single = sum(gamma(2 * k - 1.5) / gamma(2 * k - 1) for k in range(1, n + 1))
    double = sum(gamma(a + b - 1.5) ** 2 / (gamma(2 * a - 1) * gamma(2 * b - 1))
                 for a in range(1, n + 1) for b in range(1, n + 1))
    return 2 * SQRT2 / math.sqrt(math.pi) * single - 2 / math.pi * double


# ---------------------------------------------------------------- EvenPolynomial

@pytest.mark.parametrize("spec, x, expected", [
    ("1", 3.0, 1.0), ("x2", 3.0, 9.0), ("x2+0.5x4", 2.0, 12.0), ("2-x2", 1.0, 1.0)])
def test_even_polynomial_parse(spec, x, expected):
    P = EvenPolynomial.parse(spec)
    assert P(x) == pytest.approx(expected)
    assert P(-x) == P(x)


@pytest.mark.parametrize("spec", ["x", "x3", "x2+x", "", "y2"])
def test_even_polynomial_rejects_bad_specs(spec):
    with pytest.raises(ValueError):
        EvenPolynomial.parse(spec)


# ---------------------------------------------------------------- M^(nu)

def test_m_nu_examples():
    assert m_nu_matrix(ONE, 1, 1).entries == pytest.approx(np.array([[SQRT2]]), rel=1e-14)
    assert m_nu_matrix(ONE, 2, 1).entries == pytest.approx(np.array([[2 * SQRT2]]), rel=1e-14)


def test_m_nu_x2_against_quadrature():
    n, N = 2, 4
    M = m_nu_matrix(X2, 1, n).entries
    for j in (1, 2):
        for k in (1, 2):
            a = a_inner_quadrature(lambda x, y: (x * x + y * y) / N, 2 * j - 2, 2 * k - 1)
            expected = a / math.sqrt(2 * math.pi * gamma(2 * j - 1) * gamma(2 * k - 1))
            assert M[j - 1, k - 1] == pytest.approx(expected, rel=1e-8)


def test_m_nu_capacity():
    with pytest.raises(CapacityError):
        m_nu_matrix(EvenPolynomial.parse("x10"), 5, 3)
    assert m_nu_matrix(EvenPolynomial.parse("x10"), 5, 3, degree_cap=50).entries.shape == (3, 3)


# ---------------------------------------------------------------- cumulants

def test_cumulant_examples():
    k1 = cumulant(ONE, 1, 1)
    assert k1.value == pytest.approx(SQRT2, abs=1e-14)
    assert k1.method == "trace_formula"
    assert cumulant(ONE, 2, 1).value == pytest.approx(2 * SQRT2 - 2, abs=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20, 50])
def test_kappa2_matches_exact_variance(n):
    assert cumulant(ONE, 2, n).value == pytest.approx(variance_nr_exact(n), rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_variance_exact_against_direct_summation(n):
    assert variance_nr_exact(n) == pytest.approx(_variance_oracle(n), rel=1e-12)


def test_mean_exact_matches_kappa1():
    for n in (1, 4, 30):
        assert mean_nr_exact(n) == pytest.approx(cumulant(ONE, 1, n).value, rel=1e-12)


def test_scaling_invariance_for_constant_statistic():
    for l in (1, 2, 3):
        assert cumulant(ONE, l, 6, scaled=False).value == pytest.approx(
            cumulant(ONE, l, 6, scaled=True).value, rel=1e-12)


def test_scaled_cumulant_homogeneity():
    # X(x^2) with lambda/sqrt(N) is X_raw / N, so kappa_l scales as N^-l
    n = 5
    raw = cumulant(X2, 3, n, scaled=False).value
    assert cumulant(X2, 3, n).value == pytest.approx(raw / (2 * n) ** 3, rel=1e-11)


@given(st.integers(1, 12))
def test_composition_count(l):
    comps = list(compositions(l))
    assert len(comps) == 2 ** (l - 1)
    assert len(set(comps)) == len(comps)
    assert all(sum(c) == l and min(c) >= 1 for c in comps)
    assert comps == sorted(comps)


# ---------------------------------------------------------------- covariances

@pytest.mark.parametrize("n", [1, 3, 9])
def test_c00_is_variance(n):
    assert covariance_monomials(0, 0, n) == pytest.approx(variance_nr_exact(n), rel=1e-12)


@pytest.mark.parametrize("p, q", [(2, 0), (2, 4), (4, 4), (0, 4)])
def test_covariance_polarization(p, q):
    n = 3
    P = EvenPolynomial.monomial(p)
    Q = EvenPolynomial.monomial(q)
    k = lambda R: cumulant(R, 2, n).value  # noqa: E731
    expected = (k(P + Q) - k(P) - k(Q)) / 2
    assert covariance_monomials(p, q, n) == pytest.approx(expected, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([0, 2, 4, 6]), st.sampled_from([0, 2, 4, 6]), st.integers(1, 40))
def test_covariance_symmetric(p, q, n):
    assert covariance_monomials(p, q, n) == pytest.approx(covariance_monomials(q, p, n), rel=1e-12)


def test_covariance_scale_conventions():
    n = 4
    raw = covariance_monomials(2, 4, n, scale="raw")
    assert covariance_monomials(2, 4, n, scale="n") == pytest.approx(raw / n ** 3, rel=1e-14)
    assert covariance_monomials(2, 4, n, scale="N") == pytest.approx(raw / (2 * n) ** 3, rel=1e-14)
    with pytest.raises(ValueError):
        covariance_monomials(1, 2, n)


# ---------------------------------------------------------------- MGF determinant

def test_mgf_trivial_cases():
    assert mgf_determinant(lambda x: x * x, 0.0, 3) == 1.0
    s = 0.3
    assert mgf_determinant(lambda x: 1.0, s, 1) == pytest.approx(
        1 + math.expm1(2 * s) / SQRT2, rel=1e-8)
    with pytest.raises(ValueError):
        mgf_determinant(lambda x: 1.0, 0.1, 9)


def test_mgf_finite_differences_reproduce_cumulants():
    n, N, h = 2, 4, 0.05
    f = lambda x: x * x / N  # noqa: E731
    lp = math.log(mgf_determinant(f, h, n))
    lm = math.log(mgf_determinant(f, -h, n))
    k1 = cumulant(X2, 1, n).value
    k2 = cumulant(X2, 2, n).value
    k3 = cumulant(X2, 3, n).value
    k4 = cumulant(X2, 4, n).value
    # truncation budgets: kappa3 h^2/6 and kappa4 h^2/12, plus quadrature noise
    assert (lp - lm) / (2 * h) == pytest.approx(k1, abs=abs(k3) * h * h / 6 * 1.5 + 1e-6)
    assert (lp + lm) / h ** 2 == pytest.approx(k2, abs=abs(k4) * h * h / 12 * 1.5 + 1e-5)


# ---------------------------------------------------------------- trace sums

def test_trace_sum_examples():
    assert trace_sum_z([(0, 0)], 1) == pytest.approx(1 / SQRT2, rel=1e-14)


def test_trace_sum_double_sum_oracle():
    n = 6
    double = sum(gamma(a + b - 1.5) ** 2 / (2 * math.pi * gamma(2 * a - 1) * gamma(2 * b - 1))
                 for a in range(1, n + 1) for b in range(1, n + 1))
    assert trace_sum_z([(0, 0), (0, 0)], n) == pytest.approx(double, rel=1e-12)


def test_trace_sum_leading_only_drops_error_term():
    assert trace_sum_z([(0, 2)], 5, leading_only=True) < trace_sum_z([(0, 2)], 5)
    assert trace_sum_z([(2, 0)], 5, leading_only=True) == pytest.approx(trace_sum_z([(2, 0)], 5))


def test_trace_sum_growth_exponent():
    grid = [8, 16, 32, 64]
    vals = [(n, trace_sum_z([(2, 0), (0, 2)], n)) for n in grid]
    assert scaling_exponent(vals) <= 0.75


@pytest.mark.parametrize("powers", [[(2, 0), (0, 2)], [(0, 2)], [(0, 4), (0, 0)]])
def test_error_term_is_subleading(powers):
    grid = [16, 32, 64, 128]
    full = [(n, trace_sum_z(powers, n)) for n in grid]
    diff = [(n, v - trace_sum_z(powers, n, leading_only=True)) for n, v in full]
    assert scaling_exponent(diff) <= scaling_exponent(full) - 0.25


def test_trace_sum_capacity():
    with pytest.raises(CapacityError):
        trace_sum_z([(0, 0)] * 4, 10000, max_cost=1e9)

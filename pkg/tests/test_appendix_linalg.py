import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from realginibre.appendix_linalg import (
    SingularMatrixError,
    build_cyclic,
    det_closed_form,
    det_cyclic,
    gaussian_moment,
    invert_cyclic,
    pairings,
    tridiagonal_inverse,
)


def _cofactor_det(a):
    """Laplace expansion along the first row (independent of any factorisation)."""
    if a.shape == (1, 1):
        return a[0, 0]
    return sum((-1) ** j * a[0, j] * _cofactor_det(np.delete(a[1:], j, axis=1))
               for j in range(a.shape[0]))


# ---------------------------------------------------------------- construction

def test_build_examples():
    a = build_cyclic(3, (1, 1), 0).toarray()
    assert np.array_equal(a, np.array([[1, -0.5, 0], [-0.5, 1, -0.5], [0, -0.5, 1]]))
    a = build_cyclic(3, (1, 1), 1).toarray()
    assert a[0, 2] == a[2, 0] == -0.5
    a = build_cyclic(4, (1, -1, 1), 0.3).toarray()
    expected = np.array([[1, -0.5, 0, -0.15],
                         [-0.5, 1, 0.5, 0],
                         [0, 0.5, 1, -0.5],
                         [-0.15, 0, -0.5, 1]])
    assert np.allclose(a, expected, rtol=0, atol=1e-16)
    assert np.array_equal(a, a.T)


@pytest.mark.parametrize("m, alpha", [(2, (1,)), (4, (1, 1)), (3, (1, 2))])
def test_build_rejects_bad_input(m, alpha):
    with pytest.raises(ValueError):
        build_cyclic(m, alpha, 0.1)


# ---------------------------------------------------------------- determinant

@pytest.mark.parametrize("z", [-0.9, -0.3, 0.0, 0.4, 1.0, 2.5])
def test_det_m3_against_cofactor_oracle(z):
    A = build_cyclic(3, (1, 1), z)
    d = det_cyclic(A)
    assert d.value == pytest.approx(-(z - 1) * (z + 2) / 4, abs=1e-15)
    assert d.value == pytest.approx(_cofactor_det(A.toarray()), abs=1e-15)
    assert d.closed_form == pytest.approx((z - 1) * (z + 2) / 2, abs=1e-15)
    if z != 1.0:
        assert d.ratio == pytest.approx(-0.5, rel=1e-13)


def test_det_singular_point_returns_zero():
    d = det_cyclic(build_cyclic(3, (1, 1), 1.0))
    assert d.value == pytest.approx(0.0, abs=1e-15) and d.closed_form == 0.0
    assert math.isnan(d.ratio)


def test_det_tridiagonal_base_case():
    A = build_cyclic(5, (1,) * 4, 0.0)
    piv = np.linalg.qr(A.toarray())[1]
    assert det_cyclic(A).value == pytest.approx(abs(np.prod(np.diag(piv))), rel=1e-13)
    assert det_cyclic(A).value == pytest.approx(6 / 32, rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 9), st.data())
def test_det_is_quadratic_in_z(m, data):
    alpha = data.draw(st.lists(st.sampled_from([1, -1]), min_size=m - 1, max_size=m - 1))
    zs = [-0.7, 0.1, 0.8]
    vals = [det_cyclic(build_cyclic(m, alpha, z)).value for z in zs]
    coef = np.polyfit(zs, vals, 2)
    assert np.polyval(coef, 0.45) == pytest.approx(det_cyclic(build_cyclic(m, alpha, 0.45)).value,
                                                   abs=1e-13)
    # the exact closed form: -2^{-m} ((m-1) z^2 + 2 A_m z - (m+1))
    s = int(np.prod(alpha))
    assert coef == pytest.approx(-(2.0 ** -m) * np.array([m - 1, 2 * s, -(m + 1)]), abs=1e-13)


@pytest.mark.parametrize("m, alpha", [(4, (1, -1, 1)), (7, (-1, 1, 1, -1, -1, 1))])
def test_det_formula_ratio_constant_in_z(m, alpha):
    ratios = [det_cyclic(build_cyclic(m, alpha, z)).ratio for z in np.linspace(-0.9, 0.9, 7)]
    assert np.allclose(ratios, -1.0 / (m - 1), rtol=1e-12, atol=0)
    assert det_closed_form(build_cyclic(m, alpha, 0.2)) != 0


# ---------------------------------------------------------------- inverse

def test_tridiagonal_inverse_m3_positive():
    inv = invert_cyclic(build_cyclic(3, (1, 1), 0))
    # 2 r (m + 1 - s) / (m + 1) for r <= s, m = 3
    expected = np.array([[1.5, 1.0, 0.5], [1.0, 2.0, 1.0], [0.5, 1.0, 1.5]])
    assert np.allclose(inv, expected, atol=1e-15) and np.all(inv > 0)
    assert np.allclose(inv, np.linalg.inv(build_cyclic(3, (1, 1), 0).toarray()), atol=1e-14)


@pytest.mark.parametrize("alpha", list(itertools.product([1, -1], repeat=3)))
def test_inverse_m4_any_alpha(alpha):
    A = build_cyclic(4, alpha, 0.5)
    assert np.max(np.abs(A.toarray() @ invert_cyclic(A) - np.eye(4))) <= 1e-12
    assert np.allclose(tridiagonal_inverse(4, alpha), np.linalg.inv(build_cyclic(4, alpha, 0).toarray()),
                       atol=1e-14)


def test_inverse_entries_are_quadratic_over_det():
    m, alpha = 6, (1, -1, 1, -1, 1)
    zs = [-0.5, 0.0, 0.6]
    num = np.array([invert_cyclic(build_cyclic(m, alpha, z)) * det_cyclic(build_cyclic(m, alpha, z)).value
                    for z in zs])
    coef = np.polyfit(zs, num.reshape(3, -1), 2)  # (3, m*m) coefficients of a + b z + c z^2
    z = 0.2
    predicted = np.array([np.polyval(coef[:, i], z) for i in range(m * m)]).reshape(m, m)
    predicted /= det_cyclic(build_cyclic(m, alpha, z)).value
    assert np.allclose(predicted, invert_cyclic(build_cyclic(m, alpha, z)), atol=1e-12)


def test_randomised_inverse_against_direct_factorisation():
    rng = np.random.default_rng(11)
    for _ in range(200):
        m = int(rng.integers(3, 13))
        alpha = rng.choice([1, -1], size=m - 1)
        A = build_cyclic(m, alpha, float(rng.uniform(-0.9, 0.9)))
        inv = invert_cyclic(A)
        assert np.max(np.abs(inv - np.linalg.inv(A.toarray()))) <= 1e-12


def test_inverse_complex_z():
    A = build_cyclic(5, (1, -1, -1, 1), complex(0.3, 0.4))
    assert np.max(np.abs(A.toarray() @ invert_cyclic(A) - np.eye(5))) <= 1e-12


def test_singular_inverse_reports_z():
    with pytest.raises(SingularMatrixError) as info:
        invert_cyclic(build_cyclic(5, (1, 1, 1, 1), 1.0))
    assert info.value.z == 1.0


# ---------------------------------------------------------------- Wick

@pytest.mark.parametrize("M", range(1, 6))
def test_pairing_count(M):
    found = list(pairings(range(2 * M)))
    assert len(found) == math.prod(range(1, 2 * M, 2))
    assert len({tuple(p) for p in found}) == len(found)


def test_gaussian_moment_examples():
    A = np.array([[2.0, 0.3, 0.0], [0.3, 1.5, -0.2], [0.0, -0.2, 1.0]])
    assert gaussian_moment([0, 0, 0], A) == pytest.approx(math.pi ** 1.5 / math.sqrt(np.linalg.det(A)))
    d = np.diag([2.0, 3.0, 0.5])
    assert gaussian_moment([2, 0, 0], d) == pytest.approx(math.pi ** 1.5 / math.sqrt(3.0) / 4.0)
    assert gaussian_moment([1, 2, 0], A) == 0.0
    with pytest.raises(ValueError):
        gaussian_moment([2, 0, 0], np.diag([1.0, -1.0, 1.0]))


def test_gaussian_moment_2d_against_quadrature():
    A = np.array([[1.2, 0.4], [0.4, 0.9]])
    val, _ = integrate.dblquad(lambda y, x: x ** 2 * y ** 2 * math.exp(-(A[0, 0] * x * x + 2 * A[0, 1] * x * y
                                                                          + A[1, 1] * y * y)),
                               -9, 9, -9, 9, epsabs=1e-13, epsrel=1e-11)
    assert gaussian_moment([2, 2], A) == pytest.approx(val, rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=3, max_size=3), st.permutations([0, 1, 2]), st.integers(0, 10_000))
def test_gaussian_moment_permutation_symmetry(mult, perm, seed):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(3, 3))
    A = B @ B.T + 3 * np.eye(3)
    perm = list(perm)
    a = gaussian_moment(mult, A)
    b = gaussian_moment([mult[i] for i in perm], A[np.ix_(perm, perm)])
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)

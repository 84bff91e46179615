"""Skew-orthogonal polynomials and the real/complex skew inner products.

Index convention: ``A[h]_{a,b}`` pairs ``P_a(x)`` with ``P_b(y)``, i.e. ``a`` and
``b`` are polynomial indices (not the 1-based matrix indices of a block
matrix). With this convention ``A[1]_{0,1} = sqrt(pi)``.

The closed forms (:func:`f_entry`, :func:`e_term`, :func:`log_f_matrix`) are
checked against the brute-force quadratures :func:`a_inner_quadrature` and
:func:`b_inner_quadrature`, which share no code with them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gammaln, erfcx

from .special_fn import LogScaledReal

__all__ = [
    "AccuracyError",
    "SkewEntry",
    "skew_poly_coeffs",
    "skew_poly_eval",
    "a_inner_quadrature",
    "b_inner_quadrature",
    "e_term",
    "log_e_term",
    "f_entry",
    "log_f_matrix",
    "f_matrix",
    "skew_norm_constant",
    "fit_error_bound_constant",
]

LOG2 = math.log(2.0)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class AccuracyError(ArithmeticError):
    """Raised when a quadrature cannot certify the requested accuracy."""

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class SkewEntry:
    """``f^{(r,s)}_{a,b} = A[x^r y^s]_{a,b}`` stored in log-scaled form."""

    r: int
    s: int
    a: int
    b: int
    value: LogScaledReal

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def skew_poly_coeffs(j: int) -> tuple:
    """Coefficients of ``P_j`` in increasing powers (numpy.polynomial order)."""
    if j < 0:
        raise ValueError("polynomial index must be nonnegative")
    c = [0.0] * (j + 1)
    c[j] = 1.0
    if j % 2 == 1 and j >= 3:
        c[j - 2] = -float(j - 1)
    return tuple(c)


def skew_poly_eval(j: int, x):
    """Evaluate ``P_j``: ``x**j`` for even ``j``, ``x**j - (j-1) x**(j-2)`` for odd ``j``."""
    if j < 0:
        raise ValueError("polynomial index must be nonnegative")
    if j % 2 == 0 or j == 1:
        return x ** j
    return x ** j - (j - 1) * x ** (j - 2)


# ---------------------------------------------------------------------------
# brute-force quadrature oracles
# ---------------------------------------------------------------------------

def _check(value, err, atol, rtol, what):
    if not np.isfinite(value) or err > max(atol, rtol * abs(value)):
        raise AccuracyError(
            f"{what}: estimated error {err:.3g} exceeds tolerance "
            f"(value {value:.12g})", value=value, error_estimate=err)


def a_inner_quadrature(h, a: int, b: int, *, atol: float = 1e-8, rtol: float = 1e-9) -> float:
    """Real skew inner product by adaptive 2-D quadrature.

    Computes ``(1/2) iint h(x, y) exp(-x^2/2 - y^2/2) P_a(x) P_b(y) sign(y - x) dx dy``.

    The plane is split along ``y = x``. In the rotated coordinates
    ``u = (y - x)/sqrt(2) > 0``, ``v = (x + y)/sqrt(2)`` the two halves combine
    into one integral of the antisymmetrised integrand over ``u > 0``; both
    coordinates are then mapped to bounded intervals by ``u = tan(theta)``.

    Parameters
    ----------
    h : callable
        ``h(x, y)`` returning a float.
    a, b : int
        Polynomial indices.
    atol, rtol : float
        Required accuracy; the outer quadrature's error estimate must not
        exceed ``max(atol, rtol * |value|)``.

    Raises
    ------
    AccuracyError
        If the error estimate is above tolerance.
    """
    if a > 12 or b > 12:
        raise ValueError("quadrature oracle is limited to polynomial indices <= 12")
    ca = np.array(skew_poly_coeffs(a))
    cb = np.array(skew_poly_coeffs(b))
    pa = np.polynomial.polynomial.polyval
    r2 = 1.0 / math.sqrt(2.0)

    def g(x, y):
        w = math.exp(-0.5 * (x * x + y * y))
        if w == 0.0:
            # h is never evaluated where the weight has underflowed
            return 0.0
        return h(x, y) * w * pa(x, ca) * pa(y, cb)

    def inner(theta):
        u = math.tan(theta)
        ju = 1.0 + u * u

        def f(phi):
            v = math.tan(phi)
            x, y = (v - u) * r2, (v + u) * r2
            return (g(x, y) - g(y, x)) * (1.0 + v * v)

        val, _ = integrate.quad(f, -0.5 * math.pi, 0.5 * math.pi,
                                epsabs=atol * 1e-2, epsrel=rtol * 1e-1, limit=200)
        return val * ju

    val, err = integrate.quad(inner, 0.0, 0.5 * math.pi,
                              epsabs=atol * 1e-2, epsrel=rtol * 1e-1, limit=200)
    val *= 0.5
    err *= 0.5
    _check(val, err, atol, rtol, f"A[h]_{{{a},{b}}}")
    return val


def b_inner_quadrature(g, a: int, b: int, *, atol: float = 1e-8, rtol: float = 1e-9,
                       tail: float = 1e-12) -> float:
    """Complex skew inner product by adaptive 2-D quadrature.

    Normalised so that ``A[1] + B[1]`` is exactly block diagonal with
    ``(A[1] + B[1])_{2j-2, 2j-1} = sqrt(2 pi) Gamma(2j - 1)``:

    ``B[g]_{a,b} = i int_C g(z) g(conj z) P_a(z) P_b(conj z) sign(Im z)
    exp(-(z^2 + conj(z)^2)/2) erfc(sqrt(2) |Im z|) d^2 z``.

    The integrand is reduced to the upper half plane using the
    ``z -> conj z`` symmetry and truncated to ``[-R, R] x [0, R]`` where the
    Gaussian tail ``exp(-R^2) R^deg`` falls below ``tail``.

    Parameters
    ----------
    g : callable
        Complex function ``g(z)``; ``g(z) g(conj z)`` must be bounded on the disc.
    a, b : int
        Polynomial indices, at most 5.
    """
    if a > 5 or b > 5:
        raise ValueError("quadrature oracle is limited to polynomial indices <= 5")
    ca = np.array(skew_poly_coeffs(a))
    cb = np.array(skew_poly_coeffs(b))
    pa = np.polynomial.polynomial.polyval
    deg = a + b + 1
    R = 3.0
    while math.exp(-R * R) * R ** deg > tail:
        R += 0.25
    s2 = math.sqrt(2.0)

    def f(x, y):
        z = complex(x, y)
        zc = z.conjugate()
        gz = g(z) * g(zc)
        q = gz * pa(z, ca) * pa(zc, cb)
        qc = g(zc) * g(z) * pa(zc, ca) * pa(z, cb)
        # e^{y^2 - x^2} erfc(sqrt2 y) = e^{-x^2 - y^2} erfcx(sqrt2 y)
        w = math.exp(-x * x - y * y) * erfcx(s2 * y)
        return (1j * (q - qc)).real * w

    def inner(y):
        val, _ = integrate.quad(lambda x: f(x, y), -R, R,
                                epsabs=atol * 1e-2, epsrel=rtol * 1e-1, limit=200)
        return val

    val, err = integrate.quad(inner, 0.0, R, epsabs=atol * 1e-2, epsrel=rtol * 1e-1, limit=200)
    _check(val, err, atol, rtol, f"B[g]_{{{a},{b}}}")
    return val


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def log_e_term(j: float, k: int) -> float:
    """Log of ``E(j, k) = (k-1)! 2^(k-1) sum_{i<k} Gamma(i + j - 1/2) / (2^i i!)``."""
    if k < 1:
        raise ValueError("E(j, k) needs k >= 1")
    i = np.arange(k)
    terms = gammaln(i + j - 0.5) - i * LOG2 - gammaln(i + 1.0)
    return float(gammaln(k) + (k - 1) * LOG2 + np.logaddexp.reduce(terms))


def e_term(j: float, k: int) -> float:
    """The error term ``E(j, k)`` of the monomial skew entries."""
    return math.exp(log_e_term(j, k))


def _check_even(r, s):
    if r < 0 or s < 0 or r % 2 or s % 2:
        raise ValueError(f"monomial powers must be even and nonnegative, got ({r}, {s})")


def f_entry(r: int, s: int, k1: int, k2: int, include_error_term: bool = True) -> SkewEntry:
    """Closed form of ``A[x^r y^s]_{2k1-2, 2k2-1}``.

    Equals ``Gamma(k1 + k2 + (r+s)/2 - 3/2) + s E(k1 + r/2, k2 + s/2 - 1)``.
    With ``include_error_term=False`` only the leading gamma factor is returned.
    """
    _check_even(r, s)
    if k1 < 1 or k2 < 1:
        raise ValueError("k1, k2 must be positive")
    value = LogScaledReal.from_log(float(gammaln(k1 + k2 + (r + s) / 2 - 1.5)))
    if include_error_term and s > 0:
        err = LogScaledReal.from_log(math.log(s) + log_e_term(k1 + r // 2, k2 + s // 2 - 1))
        value = value + err
    return SkewEntry(r, s, 2 * k1 - 2, 2 * k2 - 1, value)


def skew_norm_constant(j: int) -> float:
    """``r_{j-1} = sqrt(2 pi) Gamma(2j - 1)``, the j-th skew normalisation (j >= 1)."""
    return math.sqrt(2.0 * math.pi) * math.gamma(2 * j - 1)


def log_f_matrix(r: int, s: int, n: int, include_error_term: bool = True,
                 normalized: bool = True) -> np.ndarray:
    """Log of the ``n x n`` matrix of entries ``f^{(r,s)}_{2j-2, 2k-1}``.

    With ``normalized`` the entries are divided by
    ``sqrt(2 pi Gamma(2j-1) Gamma(2k-1))``. All entries are positive.
    """
    _check_even(r, s)
    k = np.arange(1, n + 1, dtype=float)
    lead = gammaln(k[:, None] + k[None, :] + (r + s) / 2 - 1.5)
    out = lead
    if include_error_term and s > 0:
        # E(k1 + r/2, k2 + s/2 - 1): cumulative log-sums over i for every k1
        kk = np.arange(1, n + 1) + s // 2 - 1
        kmax = int(kk[-1])
        i = np.arange(kmax, dtype=float)
        jj = k + r // 2
        terms = gammaln(i[None, :] + jj[:, None] - 0.5) - i * LOG2 - gammaln(i + 1.0)
        cum = np.logaddexp.accumulate(terms, axis=1)
        log_e = (gammaln(kk) + (kk - 1) * LOG2)[None, :] + cum[:, kk - 1]
        out = np.logaddexp(lead, math.log(s) + log_e)
    if normalized:
        half = 0.5 * gammaln(2 * k - 1)
        out = out - LOG_SQRT_2PI - half[:, None] - half[None, :]
    return out


def f_matrix(r: int, s: int, n: int, include_error_term: bool = True,
             log_scale: float = 0.0) -> np.ndarray:
    """Normalised entry matrix ``exp(log_f_matrix + log_scale)``."""
    return np.exp(log_f_matrix(r, s, n, include_error_term) + log_scale)


def fit_error_bound_constant(p: int, q: int, kmax: int = 20) -> float:
    """Smallest ``c`` making the factorial bound on ``E`` hold on a grid.

    The bound reads ``E(k1 + p/2, k2 + q/2 - 1) <= c (k2 + q/2 - 2)! 2^{k2}
    sum_{i>=0} Gamma(i + k1 + p/2 - 1/2) / (2^i i!)``; the infinite sum is
    ``Gamma(a) 2^a`` with ``a = k1 + p/2 - 1/2``. Returns the maximum of the
    ratio over ``1 <= k1, k2 <= kmax`` (pairs with ``k2 + q/2 - 1 < 1`` skipped).
    """
    _check_even(p, q)
    best = 0.0
    for k1 in range(1, kmax + 1):
        a = k1 + p / 2 - 0.5
        log_tail = float(gammaln(a)) + a * LOG2
        for k2 in range(1, kmax + 1):
            k = k2 + q // 2 - 1
            if k < 1:
                continue
            log_bound = float(gammaln(k)) + k2 * LOG2 + log_tail
            best = max(best, math.exp(log_e_term(k1 + p // 2, k) - log_bound))
    return best

"""Exact finite-n statistics of even linear statistics of the real spectrum.

For a ``2n x 2n`` real Ginibre matrix and an even function ``f``, the moment
generating function of ``X(f) = sum_j f(lambda_j)`` over the real eigenvalues
is an ``n x n`` determinant

    E exp(s X(f)) = det(I + K(s)),
    K(s)_{jk} = A[exp(s f(x) + s f(y)) - 1]_{2j-2, 2k-1} / sqrt(2 pi Gamma(2j-1) Gamma(2k-1)).

Expanding ``log det`` gives the cumulants as traces of products of the
matrices ``M^(nu)`` built from ``(f(x) + f(y))**nu`` (see :func:`cumulant`).
For polynomial ``f`` every entry is a finite combination of the closed-form
monomial entries of :mod:`realginibre.skew_basis`.

Scaling: unless stated otherwise, statistics use ``P(lambda / sqrt(N))``
with ``N = 2n``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

from .skew_basis import LOG_SQRT_2PI, a_inner_quadrature, f_matrix

__all__ = [
    "CapacityError",
    "EvenPolynomial",
    "MNuMatrix",
    "CumulantReport",
    "compositions",
    "m_nu_matrix",
    "cumulant",
    "mean_nr_exact",
    "variance_nr_exact",
    "covariance_monomials",
    "mgf_determinant",
    "trace_sum_z",
]

DEFAULT_DEGREE_CAP = 40


class CapacityError(RuntimeError):
    """The requested expansion exceeds the configured size limits."""


@dataclass(frozen=True)
class EvenPolynomial:
    """An even real polynomial ``sum_d c_d x**d`` (only even ``d``)."""

    coefficients: tuple  # sorted ((degree, coeff), ...)

    def __init__(self, coefficients):
        if isinstance(coefficients, dict):
            items = coefficients.items()
        else:
            items = coefficients
        merged = {}
        for d, c in items:
            d = int(d)
            if d < 0 or d % 2:
                raise ValueError(f"EvenPolynomial accepts only even degrees, got x^{d}")
            merged[d] = merged.get(d, 0.0) + float(c)
        merged = {d: c for d, c in merged.items() if c != 0.0}
        object.__setattr__(self, "coefficients", tuple(sorted(merged.items())))

    @classmethod
    def monomial(cls, degree: int, coeff: float = 1.0) -> "EvenPolynomial":
        return cls({degree: coeff})

    @classmethod
    def parse(cls, spec: str) -> "EvenPolynomial":
        """Parse the micro-syntax ``1``, ``x2``, ``x2+0.5x4``, ``2-x2``.

        Odd powers are rejected with ``ValueError``.
        """
        text = spec.replace(" ", "")
        if not text:
            raise ValueError("empty statistic spec")
        if text[0] not in "+-":
            text = "+" + text
        terms = re.findall(r"[+-][^+-]+", text)
        if "".join(terms) != text:
            raise ValueError(f"cannot parse statistic spec {spec!r}")
        coeffs = {}
        for term in terms:
            sign = -1.0 if term[0] == "-" else 1.0
            body = term[1:]
            m = re.fullmatch(r"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\*?(?:x(?:\^?(\d+))?)?", body)
            if not m or not body:
                raise ValueError(f"cannot parse term {term!r} in {spec!r}")
            num, power = m.group(1), m.group(2)
            has_x = "x" in body
            coeff = float(num) if num else 1.0
            degree = (int(power) if power else 1) if has_x else 0
            if degree % 2:
                raise ValueError(f"odd power x^{degree} in statistic spec {spec!r}")
            coeffs[degree] = coeffs.get(degree, 0.0) + sign * coeff
        return cls(coeffs)

    @property
    def max_degree(self) -> int:
        return max((d for d, _ in self.coefficients), default=0)

    def as_dict(self) -> dict:
        return dict(self.coefficients)

    def scaled(self, factor: float) -> "EvenPolynomial":
        """Polynomial ``x -> P(factor * x)``."""
        return EvenPolynomial({d: c * factor ** d for d, c in self.coefficients})

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for d, c in self.coefficients:
            out = out + c * x ** d
        return out if out.ndim else float(out)

    def __mul__(self, a: float) -> "EvenPolynomial":
        return EvenPolynomial({d: a * c for d, c in self.coefficients})

    __rmul__ = __mul__

    def __add__(self, other: "EvenPolynomial") -> "EvenPolynomial":
        return EvenPolynomial(list(self.coefficients) + list(other.coefficients))

    def __str__(self):
        if not self.coefficients:
            return "0"
        parts = []
        for d, c in self.coefficients:
            mono = "" if d == 0 else f"x{d}"
            if d == 0:
                txt = f"{c:g}"
            elif c == 1.0:
                txt = mono
            elif c == -1.0:
                txt = "-" + mono
            else:
                txt = f"{c:g}{mono}"
            parts.append(txt)
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


@dataclass
class MNuMatrix:
    n: int
    nu: int
    entries: np.ndarray
    statistic: EvenPolynomial
    scaled: bool = True


@dataclass
class CumulantReport:
    """One emitted cumulant together with how it was obtained."""

    n: int
    l: int
    statistic: EvenPolynomial
    scaling: str  # "raw" | "by_sqrt_N"
    value: float
    method: str  # trace_formula | covariance_formula | mgf_derivative | monte_carlo
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "quantity": f"kappa_{self.l}",
            "n": self.n,
            "N": 2 * self.n,
            "l": self.l,
            "statistic": str(self.statistic),
            "scaling": self.scaling,
            "value": self.value,
            "method": self.method,
            **self.meta,
        }


# ---------------------------------------------------------------------------
# matrix assembly
# ---------------------------------------------------------------------------

def _log_scale(degree_sum: int, n: int, scaled: bool) -> float:
    return -0.5 * degree_sum * math.log(2 * n) if scaled else 0.0


@lru_cache(maxsize=128)
def _f_matrix_small(r, s, n, include_error_term, scaled):
    m = f_matrix(r, s, n, include_error_term, _log_scale(r + s, n, scaled))
    m.setflags(write=False)
    return m


def _f_matrix_cached(r, s, n, include_error_term, scaled):
    # only small matrices are worth keeping around
    if n <= 256:
        return _f_matrix_small(r, s, n, include_error_term, scaled)
    return f_matrix(r, s, n, include_error_term, _log_scale(r + s, n, scaled))


def _bivariate_power(P: EvenPolynomial, nu: int) -> dict:
    """Monomial expansion ``{(r, s): c}`` of ``(P(x) + P(y))**nu``."""
    base = {}
    for d, c in P.coefficients:
        base[(d, 0)] = base.get((d, 0), 0.0) + c
        base[(0, d)] = base.get((0, d), 0.0) + c
    out = {(0, 0): 1.0}
    for _ in range(nu):
        nxt = {}
        for (r1, s1), c1 in out.items():
            for (r2, s2), c2 in base.items():
                key = (r1 + r2, s1 + s2)
                nxt[key] = nxt.get(key, 0.0) + c1 * c2
        out = nxt
    return out


def m_nu_matrix(P: EvenPolynomial, nu: int, n: int, scaled: bool = True,
                degree_cap: int = DEFAULT_DEGREE_CAP,
                include_error_term: bool = True) -> MNuMatrix:
    """The ``n x n`` matrix ``M^(nu)[P]``.

    Entry ``(j, k)`` is ``A[(P(x) + P(y))**nu]_{2j-2, 2k-1}`` normalised by
    ``sqrt(2 pi Gamma(2j-1) Gamma(2k-1))``. With ``scaled`` the polynomial is
    applied to ``x / sqrt(2n)``.
    """
    if nu < 1 or n < 1:
        raise ValueError("nu and n must be positive")
    if nu * P.max_degree > degree_cap:
        raise CapacityError(f"nu * deg(P) = {nu * P.max_degree} exceeds cap {degree_cap}")
    entries = np.zeros((n, n))
    for (r, s), c in sorted(_bivariate_power(P, nu).items()):
        if c != 0.0:
            entries = entries + c * _f_matrix_cached(r, s, n, include_error_term, scaled)
    return MNuMatrix(n, nu, entries, P, scaled)


def compositions(l: int):
    """All ordered tuples of positive integers summing to ``l``, lexicographically."""
    if l < 1:
        raise ValueError("l must be positive")
    comp = [1] * l
    while True:
        yield tuple(comp)
        # next composition in lexicographic order
        if len(comp) == 1:
            return
        last = comp.pop()
        comp[-1] += 1
        comp.extend([1] * (last - 1))


def _trace_cumulant(mats: dict, l: int) -> float:
    total = 0.0
    for comp in compositions(l):
        m = len(comp)
        prod = mats[comp[0]]
        for nu in comp[1:]:
            prod = prod @ mats[nu]
        denom = math.prod(math.factorial(v) for v in comp)
        total += (-1) ** (m + 1) / m * np.trace(prod) / denom
    return math.factorial(l) * total


def cumulant(P: EvenPolynomial, l: int, n: int, scaled: bool = True,
             degree_cap: int = DEFAULT_DEGREE_CAP) -> CumulantReport:
    """Exact ``l``-th cumulant of ``X(P) = sum_j P(lambda_j / sqrt(2n))``.

    Uses ``kappa_l = l! sum_m (-1)^(m+1)/m sum_{nu_1+...+nu_m=l}
    Tr(M^(nu_1) ... M^(nu_m)) / (nu_1! ... nu_m!)``.
    """
    if l < 1:
        raise ValueError("cumulant order must be >= 1")
    mats = {nu: m_nu_matrix(P, nu, n, scaled, degree_cap).entries for nu in range(1, l + 1)}
    value = _trace_cumulant(mats, l)
    return CumulantReport(n, l, P, "by_sqrt_N" if scaled else "raw", float(value), "trace_formula")


# ---------------------------------------------------------------------------
# closed-form sums
# ---------------------------------------------------------------------------

def _log_diag_ratio(n: int, shift: float = 0.0) -> np.ndarray:
    k = np.arange(1, n + 1, dtype=float)
    return gammaln(2 * k - 1.5 + shift) - gammaln(2 * k - 1)


def mean_nr_exact(n: int) -> float:
    """Exact ``E(N_R)`` for ``N = 2n``: ``(2/sqrt(2 pi)) sum_k Gamma(2k-3/2)/Gamma(2k-1)``."""
    if n < 1:
        raise ValueError("n must be positive")
    return float(np.exp(logsumexp(_log_diag_ratio(n)) + math.log(2.0) - LOG_SQRT_2PI))


def _blocked_logsumexp(fn, n: int, block: int = 1024) -> float:
    """``logsumexp`` over an ``n x n`` grid of log terms ``fn(k1_block, k2)``, row blocks in order."""
    k = np.arange(1, n + 1, dtype=float)
    parts = []
    for start in range(0, n, block):
        k1 = k[start:start + block, None]
        parts.append(logsumexp(fn(k1, k[None, :])))
    return float(logsumexp(parts))


def variance_nr_exact(n: int) -> float:
    """Exact ``Var(N_R)`` for ``N = 2n``.

    ``(2 sqrt2 / sqrt(pi)) sum_k Gamma(2k-3/2)/Gamma(2k-1)
    - (2/pi) sum_{k1,k2} Gamma(k1+k2-3/2)^2 / (Gamma(2k1-1) Gamma(2k2-1))``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    single = math.exp(logsumexp(_log_diag_ratio(n))) * 2.0 * math.sqrt(2.0 / math.pi)
    log_double = _blocked_logsumexp(
        lambda a, b: 2 * gammaln(a + b - 1.5) - gammaln(2 * a - 1) - gammaln(2 * b - 1), n)
    return single - 2.0 / math.pi * math.exp(log_double)


def covariance_monomials(p: int, q: int, n: int, scale: str = "N") -> float:
    """Exact ``Cov(X(x^p), X(x^q))`` for even ``p, q``.

    ``scale`` picks the eigenvalue normalisation: ``"N"`` (``lambda/sqrt(2n)``,
    the default), ``"n"`` (``lambda/sqrt(n)``) or ``"raw"``.

    The diagonal (single-sum) part collects
    ``f^{(p,q)} + f^{(q,p)} + f^{(0,p+q)} + f^{(p+q,0)}``; the double sum is
    ``Tr(F_p F_q)`` with ``F_p = f^{(p,0)} + f^{(0,p)}`` (all four cross terms).
    """
    if p % 2 or q % 2 or p < 0 or q < 0:
        raise ValueError("p and q must be even and nonnegative")
    if scale not in ("N", "n", "raw"):
        raise ValueError("scale must be 'N', 'n' or 'raw'")

    def F(r, s):
        return _f_matrix_cached(r, s, n, True, False)

    diag = (np.diag(F(p, q)) + np.diag(F(q, p)) + np.diag(F(0, p + q)) + np.diag(F(p + q, 0))).sum()
    Fp = F(p, 0) + F(0, p)
    Fq = F(q, 0) + F(0, q)
    double = float(np.sum(Fp * Fq.T))
    value = float(diag) - double
    base = {"N": 2 * n, "n": n, "raw": 1}[scale]
    return value * float(base) ** (-(p + q) / 2)


# ---------------------------------------------------------------------------
# determinant MGF
# ---------------------------------------------------------------------------

def mgf_determinant(f, s: float, n: int, **quad_kwargs) -> float:
    """``E exp(s X(f))`` for ``2n x 2n`` matrices, as an ``n x n`` determinant.

    ``f`` is an even callable applied to the *unscaled* eigenvalues (pass
    ``lambda x: x**2 / N`` for the ``sqrt(N)``-scaled square). Each entry is a
    2-D quadrature, so ``n <= 8``.
    """
    if n < 1 or n > 8:
        raise ValueError("mgf_determinant supports 1 <= n <= 8")
    if s == 0:
        return 1.0

    def h(x, y):
        return math.expm1(s * (f(x) + f(y)))

    K = np.empty((n, n))
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            a = a_inner_quadrature(h, 2 * j - 2, 2 * k - 1, **quad_kwargs)
            K[j - 1, k - 1] = a / math.sqrt(2 * math.pi * math.gamma(2 * j - 1) * math.gamma(2 * k - 1))
    # LU with partial pivoting
    return float(np.linalg.det(np.eye(n) + K))


# ---------------------------------------------------------------------------
# cyclic trace sums
# ---------------------------------------------------------------------------

def trace_sum_z(powers, n: int, leading_only: bool = False, max_cost: float = 1e11) -> float:
    """Normalised cyclic sum of products of monomial skew entries.

    ``Z = n^{-sum(r_i+s_i)/2} sum_{k_1..k_m} prod_i f^{(r_i,s_i)}_{2k_i-2, 2k_{i+1}-1}
    / (sqrt(2 pi) Gamma(2k_i - 1))`` with ``k_{m+1} = k_1``; ``powers`` holds the
    even exponent pairs ``(r_i, s_i)``. Evaluated as the trace of a product of
    ``n x n`` matrices. With ``leading_only`` each entry keeps only its gamma
    factor.
    """
    powers = [tuple(map(int, rs)) for rs in powers]
    if not powers:
        raise ValueError("need at least one (r, s) pair")
    if len(powers) * float(n) ** 3 > max_cost:
        raise CapacityError(f"trace of {len(powers)} products of size {n} exceeds budget")
    logn = math.log(n)
    prod = None
    for r, s in powers:
        m = f_matrix(r, s, n, not leading_only, -0.5 * (r + s) * logn)
        prod = m if prod is None else prod @ m
    return float(np.trace(prod))

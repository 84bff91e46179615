"""Large-n limits and how the exact finite-n values approach them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .cumulant_engine import EvenPolynomial, _blocked_logsumexp, cumulant, mean_nr_exact

__all__ = [
    "LimitCheck",
    "mean_nr_asymptotic",
    "sigma2_limit",
    "s_pq_sum",
    "s_pq_limit",
    "covariance_limit",
    "scaling_exponent",
    "mean_convergence",
    "spq_convergence",
    "cumulant_scaling",
]

VARIANCE_CONSTANT = 2.0 - math.sqrt(2.0)


@dataclass
class LimitCheck:
    """Finite-n values of a quantity next to its predicted limit.

    ``metric`` is either the relative gap at the largest n (``"terminal_gap"``)
    or a fitted log-log slope (``"slope"``); both are recomputed from ``values``.
    """

    name: str
    values: list  # [(n, value), ...], n strictly increasing
    limit: float | None = None
    metric: str = "terminal_gap"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ns = [n for n, _ in self.values]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n must be strictly increasing")

    @property
    def gaps(self) -> list:
        if self.limit is None:
            return []
        return [abs(v - self.limit) / abs(self.limit) for _, v in self.values]

    @property
    def metric_value(self) -> float:
        if self.metric == "slope":
            return scaling_exponent(self.values)
        return self.gaps[-1]

    def to_dict(self) -> dict:
        rows = []
        gaps = self.gaps or [None] * len(self.values)
        for (n, v), g in zip(self.values, gaps):
            rows.append({"n": n, "value": v, "limit": self.limit, "gap": g})
        return {"quantity": self.name, "rows": rows, "metric": self.metric,
                "metric_value": self.metric_value, **self.meta}


def mean_nr_asymptotic(N: int) -> float:
    """Leading-order ``E(N_R) ~ sqrt(2N/pi)``."""
    if N < 1 or N % 2:
        raise ValueError("N must be a positive even integer")
    return math.sqrt(2.0 * N / math.pi)


def sigma2_limit(P: EvenPolynomial) -> float:
    """Limiting variance ``(2 - sqrt2)/2 * int_{-1}^{1} P(x)^2 dx``, from the coefficients."""
    coeffs = P.coefficients
    total = 0.0
    for d1, c1 in coeffs:
        for d2, c2 in coeffs:
            total += c1 * c2 * 2.0 / (d1 + d2 + 1)
    return 0.5 * VARIANCE_CONSTANT * total


def s_pq_sum(p: int, q: int, n: int) -> float:
    """``n^{-(p+q+1)/2} sum_{k1,k2<=n} Gamma(k1+k2+q/2-3/2) Gamma(k1+k2+p/2-3/2)
    / (Gamma(2k1-1) Gamma(2k2-1))``."""
    if p % 2 or q % 2:
        raise ValueError("p and q must be even")
    if n < 1:
        raise ValueError("n must be positive")
    log_total = _blocked_logsumexp(
        lambda a, b: gammaln(a + b + q / 2 - 1.5) + gammaln(a + b + p / 2 - 1.5)
        - gammaln(2 * a - 1) - gammaln(2 * b - 1), n)
    return math.exp(log_total - 0.5 * (p + q + 1) * math.log(n))


def s_pq_limit(p: int, q: int) -> float:
    """``sqrt(pi) 2^{(p+q+1)/2} / (p+q+1)``."""
    if p % 2 or q % 2:
        raise ValueError("p and q must be even")
    d = p + q + 1
    return math.sqrt(math.pi) * 2.0 ** (d / 2) / d


def covariance_limit(p: int, q: int, normalization: str = "n") -> float:
    """Limit of ``Cov(X(x^p), X(x^q)) / sqrt(base)`` with ``sqrt(2n)``-scaled eigenvalues.

    ``normalization="n"`` divides by ``n^{1/2}`` and gives
    ``(2 - sqrt2)/sqrt(pi) * 2/(p+q+1)``; ``"N"`` divides by ``(2n)^{1/2}`` and
    gives ``(sqrt2 - 1)/sqrt(pi) * 2/(p+q+1)``. The two differ exactly by
    ``sqrt2``.
    """
    base = VARIANCE_CONSTANT / math.sqrt(math.pi) * 2.0 / (p + q + 1)
    if normalization == "n":
        return base
    if normalization == "N":
        return base / math.sqrt(2.0)
    raise ValueError("normalization must be 'n' or 'N'")


def scaling_exponent(values) -> float:
    """Least-squares slope of ``log|value|`` against ``log n``."""
    pts = list(values)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    n = np.array([float(a) for a, _ in pts])
    v = np.array([float(b) for _, b in pts])
    if np.any(n <= 0) or np.any(v == 0) or not np.all(np.isfinite(v)):
        raise ValueError("scaling_exponent needs positive n and nonzero finite values")
    slope, _ = np.polyfit(np.log(n), np.log(np.abs(v)), 1)
    return float(slope)


def mean_convergence(grid) -> LimitCheck:
    """Ratio of exact ``E(N_R)`` to ``sqrt(2N/pi)`` over ``n`` in ``grid`` (limit 1)."""
    vals = [(int(n), mean_nr_exact(int(n)) / mean_nr_asymptotic(2 * int(n))) for n in grid]
    return LimitCheck("mean_ratio", vals, 1.0, meta={"method": "exact"})


def spq_convergence(p: int, q: int, grid) -> LimitCheck:
    vals = [(int(n), s_pq_sum(p, q, int(n))) for n in grid]
    return LimitCheck(f"S_{p},{q}", vals, s_pq_limit(p, q), meta={"method": "exact", "p": p, "q": q})


def cumulant_scaling(P: EvenPolynomial, l: int, grid) -> LimitCheck:
    """Exact ``|kappa_l|`` over ``grid`` with its fitted log-log slope."""
    vals = [(int(n), cumulant(P, l, int(n)).value) for n in grid]
    return LimitCheck(f"kappa_{l}", vals, None, metric="slope",
                      meta={"method": "exact", "statistic": str(P)})

"""Special functions used by the closed-form expressions.

Gamma ratios such as ``Gamma(k1 + k2 - 3/2)**2 / (Gamma(2 k1 - 1) Gamma(2 k2 - 1))``
overflow long before they become large, so everything downstream is assembled
from :func:`log_gamma` and exponentiated once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = ["LogScaledReal", "log_gamma", "erfc", "erfc_scaled", "cosh_truncated"]


@dataclass(frozen=True)
class LogScaledReal:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign == 0`` represents an exact zero; the magnitude is then ignored.
    """

    sign: int
    log_magnitude: float = -math.inf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")

    @classmethod
    def from_float(cls, value: float) -> "LogScaledReal":
        if value == 0:
            return cls(0)
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_log(cls, log_magnitude: float, sign: int = 1) -> "LogScaledReal":
        if log_magnitude == -math.inf:
            return cls(0)
        return cls(sign, float(log_magnitude))

    def __mul__(self, other: "LogScaledReal") -> "LogScaledReal":
        if not isinstance(other, LogScaledReal):
            return NotImplemented
        if self.sign == 0 or other.sign == 0:
            return LogScaledReal(0)
        return LogScaledReal(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: "LogScaledReal") -> "LogScaledReal":
        if not isinstance(other, LogScaledReal):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScaledReal")
        if self.sign == 0:
            return LogScaledReal(0)
        return LogScaledReal(self.sign * other.sign, self.log_magnitude - other.log_magnitude)

    def __add__(self, other: "LogScaledReal") -> "LogScaledReal":
        if not isinstance(other, LogScaledReal):
            return NotImplemented
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_magnitude >= other.log_magnitude else (other, self)
        ratio = math.exp(small.log_magnitude - big.log_magnitude)
        if big.sign == small.sign:
            return LogScaledReal(big.sign, big.log_magnitude + math.log1p(ratio))
        if ratio == 1.0:
            return LogScaledReal(0)
        return LogScaledReal(big.sign, big.log_magnitude + math.log1p(-ratio))

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


def log_gamma(x):
    """Natural log of the gamma function for positive arguments.

    Accepts scalars or arrays. Raises ``ValueError`` for ``x <= 0``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("log_gamma is only defined here for x > 0")
    out = special.gammaln(arr)
    return float(out) if out.ndim == 0 else out


def erfc(x):
    """Complementary error function."""
    out = special.erfc(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def erfc_scaled(x):
    """``exp(x**2) * erfc(x)``, finite for large positive ``x``."""
    out = special.erfcx(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def cosh_truncated(x: float, n: int, full_output: bool = False):
    """Partial sum ``sum_{k=0}^{n-1} x**(2k) / (2k)!`` of the cosh series.

    Parameters
    ----------
    x : float
    n : int
        Number of terms, ``n >= 1``.
    full_output : bool, optional
        If True, also return a flag telling whether the sum overflowed and
        was saturated to ``+inf``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x2 = float(x) * float(x)
    total = 0.0
    term = 1.0
    saturated = False
    for k in range(n):
        if k > 0:
            term *= x2 / ((2 * k - 1) * (2 * k))
        total += term
        if math.isinf(total) or math.isinf(term):
            total, saturated = math.inf, True
            break
        if term == 0.0 and k > 0:
            break
    if full_output:
        return total, saturated
    return total

"""Cyclic tridiagonal matrices and Gaussian moments by Wick pairings.

``A(z)`` has unit diagonal, off-diagonal entries ``-alpha_i/2`` and corner
entries ``A[0, m-1] = A[m-1, 0] = -z/2``. Determinants and inverses from
direct LU factorisation are the reference; the closed forms here are
compared against them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "CyclicTridiagonal",
    "SingularMatrixError",
    "DetComparison",
    "build_cyclic",
    "det_cyclic",
    "det_closed_form",
    "tridiagonal_inverse",
    "invert_cyclic",
    "pairings",
    "gaussian_moment",
]


class SingularMatrixError(np.linalg.LinAlgError):
    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z


@dataclass(frozen=True)
class CyclicTridiagonal:
    m: int
    alpha: tuple
    z: complex | float

    @property
    def sign_product(self) -> int:
        """Product of all ``alpha_i``."""
        return int(np.prod(self.alpha))

    def toarray(self) -> np.ndarray:
        dtype = complex if isinstance(self.z, complex) else float
        a = np.eye(self.m, dtype=dtype)
        off = -0.5 * np.asarray(self.alpha, dtype=float)
        idx = np.arange(self.m - 1)
        a[idx, idx + 1] = off
        a[idx + 1, idx] = off
        a[0, -1] = a[-1, 0] = -0.5 * self.z
        return a


def build_cyclic(m: int, alpha, z) -> CyclicTridiagonal:
    alpha = tuple(int(a) for a in alpha)
    if m < 3:
        raise ValueError("cyclic tridiagonal matrices need m >= 3")
    if len(alpha) != m - 1:
        raise ValueError(f"expected {m - 1} signs, got {len(alpha)}")
    if any(a not in (1, -1) for a in alpha):
        raise ValueError("alpha entries must be +1 or -1")
    return CyclicTridiagonal(m, alpha, z)


def det_closed_form(A: CyclicTridiagonal):
    """``(m-1) 2^{-m} (z - A_m)((m-1) z + (m+1) A_m)`` with ``A_m = prod(alpha)``."""
    m, s, z = A.m, A.sign_product, A.z
    return (m - 1) * 2.0 ** (-m) * (z - s) * ((m - 1) * z + (m + 1) * s)


@dataclass(frozen=True)
class DetComparison:
    value: float  # LU determinant, the reference
    closed_form: float
    ratio: float  # value / closed_form (nan where the closed form vanishes)


def det_cyclic(A: CyclicTridiagonal) -> DetComparison:
    """Determinant by pivoted LU, reported next to the closed-form expression.

    For the record: the exact value is ``-2^{-m} ((m-1) z^2 + 2 A_m z - (m+1))``,
    so ``ratio`` equals ``-1/(m-1)`` for every ``z``.
    """
    with warnings.catch_warnings():
        # an exactly singular A(z) is a legitimate input here: its determinant is 0
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A.toarray(), check_finite=True)
    swaps = np.count_nonzero(piv != np.arange(A.m))
    value = (-1) ** swaps * np.prod(np.diag(lu))
    if not isinstance(A.z, complex):
        value = float(np.real(value))
    closed = det_closed_form(A)
    ratio = value / closed if closed != 0 else math.nan
    return DetComparison(value, closed, ratio)


def tridiagonal_inverse(m: int, alpha) -> np.ndarray:
    """Closed-form inverse of ``A(0)``.

    ``(A(0)^{-1})_{rs} = (S_{s-1}/S_{r-1}) * 2 r (m + 1 - s) / (m + 1)`` for
    ``r <= s`` (1-based), with ``S_k = alpha_1 ... alpha_k``.
    """
    alpha = np.asarray(alpha, dtype=float)
    S = np.concatenate([[1.0], np.cumprod(alpha)])  # S[k] = prod of first k signs
    r = np.arange(1, m + 1)[:, None]
    s = np.arange(1, m + 1)[None, :]
    lo, hi = np.minimum(r, s), np.maximum(r, s)
    base = 2.0 * lo * (m + 1 - hi) / (m + 1)
    signs = S[r - 1] * S[s - 1]
    return base * signs


def invert_cyclic(A: CyclicTridiagonal) -> np.ndarray:
    """Inverse of ``A(z)`` as a rank-2 update of the tridiagonal ``A(0)``.

    ``A(z) = A(0) + U V^T`` with ``U = -z/2 [e_m, e_1]`` and ``V = [e_1, e_m]``;
    Woodbury then only needs the 2x2 capacitance matrix
    ``I_2 + V^T A(0)^{-1} U``.
    """
    m, z = A.m, A.z
    T = tridiagonal_inverse(m, A.alpha)
    if z == 0:
        return T
    dtype = complex if isinstance(z, complex) else float
    U = np.zeros((m, 2), dtype=dtype)
    U[m - 1, 0] = -0.5 * z
    U[0, 1] = -0.5 * z
    V = np.zeros((m, 2))
    V[0, 0] = 1.0
    V[m - 1, 1] = 1.0
    TU = T @ U
    cap = np.eye(2) + V.T @ TU
    det2 = cap[0, 0] * cap[1, 1] - cap[0, 1] * cap[1, 0]
    scale = max(1.0, float(np.abs(cap).max()))
    if abs(det2) <= 1e-14 * scale * scale:
        raise SingularMatrixError(f"A(z) is singular at z = {z}", z=z)
    cap_inv = np.array([[cap[1, 1], -cap[0, 1]], [-cap[1, 0], cap[0, 0]]]) / det2
    return T - TU @ cap_inv @ (V.T @ T)


def pairings(items):
    """Yield every perfect matching of ``items`` as a list of pairs.

    Recursion on the first element; ``(2M-1)!!`` matchings for ``2M`` items.
    """
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for tail in pairings(remaining):
            yield [(first, partner)] + tail


def gaussian_moment(multiplicities, A) -> float:
    """``int prod_j x_j^{m_j} exp(-x^T A x) dx`` over ``R^m``.

    Equals ``pi^{m/2} det(A)^{-1/2} sum_pairings prod (A^{-1})_{ab} / 2``, where
    variable ``j`` occupies ``m_j`` of the slots being paired.
    """
    A = np.asarray(A, dtype=float)
    mult = [int(k) for k in multiplicities]
    m = A.shape[0]
    if A.shape != (m, m) or len(mult) != m:
        raise ValueError("A must be square with one multiplicity per variable")
    if any(k < 0 for k in mult):
        raise ValueError("multiplicities must be nonnegative")
    if not np.allclose(A, A.T):
        raise ValueError("A must be symmetric")
    try:
        chol = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise ValueError("A must be positive definite") from None
    total = sum(mult)
    if total % 2:
        return 0.0
    if total > 12:
        raise ValueError("pairing enumeration is limited to total multiplicity <= 12")
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    prefactor = math.pi ** (m / 2) * math.exp(-0.5 * log_det)
    cov = 0.5 * scipy.linalg.cho_solve((chol, True), np.eye(m))
    slots = [j for j, k in enumerate(mult) for _ in range(k)]
    acc = 0.0
    for pairing in pairings(range(total)):
        term = 1.0
        for a, b in pairing:
            term *= cov[slots[a], slots[b]]
        acc += term
    return prefactor * acc

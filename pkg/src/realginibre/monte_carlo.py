"""Monte Carlo sampling of real Ginibre matrices and their real eigenvalues.

Reproducibility: trials are grouped in fixed blocks of ``BLOCK_SIZE``; block
``b`` draws its matrices from ``default_rng(SeedSequence([seed, b]))``. A trial's
matrix therefore depends only on ``(seed, trial index)``, never on how blocks
are spread over workers, and per-block moments are merged in block order so
the summary is bit-identical for any worker count.

Realness of an eigenvalue is decided structurally: real eigenvalues are the
1x1 diagonal blocks of the real Schur form. The batched path uses LAPACK
``geev`` (via :func:`numpy.linalg.eigvals`), which reads eigenvalues off the
same quasi-triangular Schur factor and returns an imaginary part of exactly
zero for 1x1 blocks, so no tolerance is involved there either.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import stats

from .cumulant_engine import EvenPolynomial

__all__ = [
    "BLOCK_SIZE",
    "PartialResultError",
    "InsufficientDataError",
    "TrialResult",
    "EnsembleSummary",
    "KSResult",
    "sample_ginibre",
    "real_spectrum",
    "real_spectra_batch",
    "run_ensemble",
    "clt_test",
    "normalized_fluctuations",
    "write_samples_csv",
]

BLOCK_SIZE = 256
RETAIN_LIMIT = 1_000_000


class PartialResultError(RuntimeError):
    def __init__(self, message, completed_trials):
        super().__init__(message)
        self.completed_trials = completed_trials


class InsufficientDataError(ValueError):
    pass


@dataclass
class TrialResult:
    n_real: int
    real_eigenvalues: np.ndarray
    statistic_values: dict


def sample_ginibre(N: int, rng: np.random.Generator) -> np.ndarray:
    """An ``N x N`` matrix of i.i.d. standard normals drawn from ``rng``."""
    if N < 1:
        raise ValueError("N must be positive")
    return rng.standard_normal((N, N))


def real_spectrum(M) -> np.ndarray:
    """Real eigenvalues of a real square matrix, sorted ascending.

    Computed from the real Schur form: every 1x1 diagonal block is a real
    eigenvalue, every 2x2 block a complex-conjugate pair.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    try:
        T, _ = scipy.linalg.schur(M, output="real")
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(M)
        raise np.linalg.LinAlgError(f"Schur iteration failed (cond = {cond:.3g}): {exc}") from exc
    n = T.shape[0]
    out = []
    i = 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            i += 2
        else:
            out.append(T[i, i])
            i += 1
    return np.sort(np.array(out, dtype=float))


def real_spectra_batch(G: np.ndarray):
    """Real-eigenvalue mask and values for a stack of matrices ``(T, N, N)``.

    Returns ``(values, is_real)`` where ``values`` holds the real parts of all
    eigenvalues and ``is_real`` marks the 1x1 Schur blocks.
    """
    w = np.linalg.eigvals(G)
    if np.iscomplexobj(w):
        return w.real, w.imag == 0.0
    return w, np.ones(w.shape, dtype=bool)


# ---------------------------------------------------------------------------
# streaming moments
# ---------------------------------------------------------------------------

@dataclass
class _Moments:
    """Count, mean, central power sums M2..M4 and co-moment matrix."""

    n: int
    mean: np.ndarray
    m2: np.ndarray
    m3: np.ndarray
    m4: np.ndarray
    comoment: np.ndarray
    all_real: int

    @classmethod
    def from_block(cls, X: np.ndarray, all_real: int) -> "_Moments":
        n = X.shape[0]
        mean = X.mean(axis=0)
        d = X - mean
        return cls(n, mean, (d ** 2).sum(0), (d ** 3).sum(0), (d ** 4).sum(0), d.T @ d, all_real)

    def merge(self, other: "_Moments") -> "_Moments":
        # pairwise update (Chan et al. / Pebay)
        na, nb = self.n, other.n
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        mean = self.mean + nb * d_n
        m2 = self.m2 + other.m2 + delta * d_n * na * nb
        m3 = (self.m3 + other.m3 + delta * d_n ** 2 * na * nb * (na - nb)
              + 3.0 * d_n * (na * other.m2 - nb * self.m2))
        m4 = (self.m4 + other.m4
              + delta * d_n ** 3 * na * nb * (na * na - na * nb + nb * nb)
              + 6.0 * d_n ** 2 * (na * na * other.m2 + nb * nb * self.m2)
              + 4.0 * d_n * (na * other.m3 - nb * self.m3))
        co = self.comoment + other.comoment + np.outer(delta, delta) * na * nb / n
        return _Moments(n, mean, m2, m3, m4, co, self.all_real + other.all_real)


@dataclass
class EnsembleSummary:
    """Aggregated Monte Carlo output.

    Column 0 is always ``N_R``; columns ``1..`` are the requested statistics
    evaluated at ``lambda / sqrt(N)``.
    """

    N: int
    trials: int
    seed: int
    names: list
    mean: np.ndarray
    variance: np.ndarray
    covariance: np.ndarray
    standard_errors: np.ndarray
    variance_standard_errors: np.ndarray
    all_real_fraction: float
    samples: np.ndarray | None = field(default=None, repr=False)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def to_dict(self) -> dict:
        out = {
            "N": self.N,
            "trials": self.trials,
            "seed": self.seed,
            "method": "mc",
            "all_real_fraction": self.all_real_fraction,
            "all_real_fraction_se": math.sqrt(
                self.all_real_fraction * (1 - self.all_real_fraction) / self.trials),
            "statistics": [],
            "covariance": self.covariance.tolist(),
        }
        for i, name in enumerate(self.names):
            out["statistics"].append({
                "name": name,
                "mean": float(self.mean[i]),
                "mean_se": float(self.standard_errors[i]),
                "variance": float(self.variance[i]),
                "variance_se": float(self.variance_standard_errors[i]),
            })
        return out


def _run_blocks(N, statistics, seed, first_block, last_block, trials, retain):
    """Worker body: process blocks ``[first_block, last_block)``."""
    results = []
    sqrt_n = math.sqrt(N)
    for b in range(first_block, last_block):
        start = b * BLOCK_SIZE
        size = min(BLOCK_SIZE, trials - start)
        rng = np.random.default_rng(np.random.SeedSequence([seed, b]))
        G = rng.standard_normal((size, N, N))
        vals, is_real = real_spectra_batch(G)
        scaled = np.where(is_real, vals / sqrt_n, 0.0)
        cols = [is_real.sum(axis=1).astype(float)]
        for P in statistics:
            cols.append(np.where(is_real, P(scaled), 0.0).sum(axis=1))
        X = np.column_stack(cols)
        all_real = int(np.count_nonzero(cols[0] == N))
        results.append((_Moments.from_block(X, all_real), X if retain else None))
    return results


def run_ensemble(N: int, trials: int, statistics=(), seed: int = 0, workers: int = 1,
                 retain_samples: bool | None = None) -> EnsembleSummary:
    """Sample ``trials`` real Ginibre ``N x N`` matrices and aggregate statistics.

    Parameters
    ----------
    N : int
        Even matrix size.
    trials : int
    statistics : sequence of EvenPolynomial or str
        Each is evaluated as ``sum_j P(lambda_j / sqrt(N))`` over real eigenvalues.
    seed : int
        Master seed; the summary depends only on ``(N, trials, statistics, seed)``.
    workers : int
        Number of processes; does not change the result.
    retain_samples : bool, optional
        Keep the per-trial values. Defaults to True up to 10**6 trials.
    """
    if N < 2 or N % 2:
        raise ValueError("N must be a positive even integer")
    if trials < 2:
        raise ValueError("need at least 2 trials")
    statistics = [EvenPolynomial.parse(P) if isinstance(P, str) else P for P in statistics]
    if retain_samples is None:
        retain_samples = trials <= RETAIN_LIMIT
    n_blocks = -(-trials // BLOCK_SIZE)
    workers = max(1, int(workers))

    per_block = []
    if workers == 1:
        per_block = _run_blocks(N, statistics, seed, 0, n_blocks, trials, retain_samples)
    else:
        chunk = max(1, -(-n_blocks // (workers * 8)))
        ranges = [(b, min(b + chunk, n_blocks)) for b in range(0, n_blocks, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_blocks, N, statistics, seed, a, b, trials, retain_samples)
                       for a, b in ranges]
            done = 0
            for (a, b), fut in zip(ranges, futures):
                try:
                    per_block.extend(fut.result())
                except Exception as exc:
                    raise PartialResultError(
                        f"worker failed after {done} completed trials: {exc}", done) from exc
                done = min(b * BLOCK_SIZE, trials)

    acc = per_block[0][0]
    for mom, _ in per_block[1:]:
        acc = acc.merge(mom)
    n = acc.n
    var = acc.m2 / (n - 1)
    mu4 = acc.m4 / n
    s2 = acc.m2 / n
    var_se = np.sqrt(np.maximum(mu4 - s2 ** 2 * (n - 3) / (n - 1), 0.0) / n)
    samples = np.vstack([X for _, X in per_block]) if retain_samples else None
    return EnsembleSummary(
        N=N,
        trials=n,
        seed=seed,
        names=["N_R"] + [str(P) for P in statistics],
        mean=acc.mean,
        variance=var,
        covariance=acc.comoment / (n - 1),
        standard_errors=np.sqrt(var / n),
        variance_standard_errors=var_se,
        all_real_fraction=acc.all_real / n,
        samples=samples,
    )


def trial_result(M, statistics=()) -> TrialResult:
    """Per-matrix record: real spectrum and the requested statistics."""
    lam = real_spectrum(M)
    N = np.asarray(M).shape[0]
    scaled = lam / math.sqrt(N)
    vals = {str(P): float(np.sum(P(scaled))) for P in statistics}
    return TrialResult(len(lam), lam, vals)


# ---------------------------------------------------------------------------
# Gaussianity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KSResult:
    statistic: float
    pvalue: float


def normalized_fluctuations(summary: EnsembleSummary, name: str) -> np.ndarray:
    """``(X - mean X) / sqrt(mean N_R)`` for a retained statistic."""
    if summary.samples is None:
        raise ValueError("samples were not retained")
    i = summary.index(name)
    X = summary.samples[:, i]
    return (X - X.mean()) / math.sqrt(summary.mean[0])


def clt_test(samples, sigma2: float) -> KSResult:
    """One-sample Kolmogorov-Smirnov test of ``samples`` against ``N(0, sigma2)``."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 100:
        raise InsufficientDataError(f"need at least 100 samples, got {samples.size}")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    res = stats.kstest(samples, stats.norm(loc=0.0, scale=math.sqrt(sigma2)).cdf)
    return KSResult(float(res.statistic), float(res.pvalue))


def write_samples_csv(path, summary: EnsembleSummary) -> None:
    """One row per trial: trial index, n_real, one column per statistic."""
    if summary.samples is None:
        raise ValueError("samples were not retained")
    with open(os.fspath(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "n_real"] + summary.names[1:])
        for t, row in enumerate(summary.samples):
            w.writerow([t, int(row[0])] + [repr(float(v)) for v in row[1:]])

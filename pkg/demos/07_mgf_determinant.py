"""
The moment generating function as a determinant
================================================

E exp(s X(f)) equals an n x n determinant of skew inner products of
exp(s f(x) + s f(y)) - 1. Here f(x) = x^2 / N for 8 x 8 matrices, compared with
the exponential of the cumulant series and with sampling.
"""

import math

import numpy as np

from realginibre import EvenPolynomial, cumulant, mgf_determinant, run_ensemble

n, N = 4, 8
x2 = EvenPolynomial.parse("x2")
kappas = [cumulant(x2, l, n).value for l in (1, 2, 3, 4)]
s = run_ensemble(N, 200_000, [x2], seed=0)
X = s.samples[:, 1]

for sv in (-0.2, 0.1, 0.3):
    det = mgf_determinant(lambda x: x * x / N, sv, n)
    series = math.exp(sum(k * sv ** l / math.factorial(l) for l, k in enumerate(kappas, start=1)))
    e = np.exp(sv * X)
    print(f"s={sv:+.1f}: determinant {det:.8f}   series to kappa_4 {series:.8f}   "
          f"sample {e.mean():.5f}+-{e.std() / math.sqrt(len(e)):.5f}")

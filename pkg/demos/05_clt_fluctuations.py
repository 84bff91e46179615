"""
Gaussian fluctuations and finite-size effects
=============================================

(X - E X) / sqrt(E N_R) becomes Gaussian with variance sigma^2(P) as the
matrix grows. At moderate sizes the exact variance is still visibly above the
limit and the skewness is not yet negligible, which a KS test detects.
"""

import math

import numpy as np

from realginibre import EvenPolynomial, clt_test, cumulant, run_ensemble, sigma2_limit
from realginibre.monte_carlo import normalized_fluctuations

x2 = EvenPolynomial.parse("x2")
target = sigma2_limit(x2)
print(f"sigma^2(x^2) = {target:.5f}\n")

print("exact engine:   n    Var/E(N_R)   skewness")
for n in (8, 50, 200, 1000):
    k1 = cumulant(EvenPolynomial.parse("1"), 1, n).value
    k2, k3 = cumulant(x2, 2, n).value, cumulant(x2, 3, n).value
    print(f"            {n:5d}    {k2 / k1:.5f}     {k3 / k2 ** 1.5:.4f}")

s = run_ensemble(16, 50_000, [x2], seed=4)
z = normalized_fluctuations(s, "x2")
skew = float(np.mean(z ** 3) / np.mean(z ** 2) ** 1.5)
ks = clt_test(z, target)
print(f"\nMonte Carlo N=16: variance {np.var(z, ddof=1):.5f} (exact {cumulant(x2, 2, 8).value / s.mean[0]:.5f}),"
      f" skewness {skew:.3f}, KS p-value vs N(0, sigma^2) = {ks.pvalue:.2g}")
print(f"KS test against N(0, exact variance): p = {clt_test(z, float(np.var(z))).pvalue:.2g}")
print(f"(sqrt of the limit: {math.sqrt(target):.4f})")

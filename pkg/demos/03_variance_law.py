"""
The variance law and the double-sum limit
=========================================

Var(N_R) / E(N_R) tends to 2 - sqrt 2. The approach is slow (an O(1)
correction on top of a sqrt(n) quantity), and the double sums S_{p,q} behind
it converge at a rate of roughly 1/sqrt(n).
"""

import math

from realginibre import cumulant, EvenPolynomial, mean_nr_exact, variance_nr_exact
from realginibre.asymptotics import covariance_limit, mean_nr_asymptotic, s_pq_limit, s_pq_sum
from realginibre.cumulant_engine import covariance_monomials

one = EvenPolynomial.parse("1")
print("    n    E N_R   sqrt(2N/pi)   Var/E   (limit %.5f)" % (2 - math.sqrt(2)))
for n in (10, 100, 1000, 4000):
    mean = mean_nr_exact(n)
    print(f"{n:5d}  {mean:8.3f}  {mean_nr_asymptotic(2 * n):10.3f}   {variance_nr_exact(n) / mean:.5f}")

print("\nS_{p,q}(n) against its limit")
for p, q in [(0, 0), (2, 0), (2, 2)]:
    vals = "  ".join(f"{s_pq_sum(p, q, n):.5f}" for n in (250, 1000, 4000))
    print(f"  ({p},{q}): {vals}   -> {s_pq_limit(p, q):.5f}")

# The covariance limit depends on whether one divides by n^{1/2} or by
# N^{1/2} = (2n)^{1/2}; the two constants differ by exactly sqrt 2.
n = 2000
print(f"\nCov(X(x^p), X(x^q)) at n={n}")
for p, q in [(0, 0), (0, 2), (2, 2)]:
    c = covariance_monomials(p, q, n)
    print(f"  ({p},{q}): /sqrt(n) = {c / math.sqrt(n):.4f} (limit {covariance_limit(p, q, 'n'):.4f}),"
          f"  /sqrt(N) = {c / math.sqrt(2 * n):.4f} (limit {covariance_limit(p, q, 'N'):.4f})")

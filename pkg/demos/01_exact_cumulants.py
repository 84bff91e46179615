"""
Exact cumulants of real-eigenvalue statistics
=============================================

For a 2n x 2n real Ginibre matrix, every cumulant of an even linear
statistic X(P) = sum_j P(lambda_j / sqrt(2n)) over the real eigenvalues is a
finite trace formula. This script evaluates a few of them.
"""

import math

from realginibre import EvenPolynomial, cumulant, variance_nr_exact

# The number of real eigenvalues is the statistic P = 1.
one = EvenPolynomial.parse("1")

# At n = 1 (2 x 2 matrices) there are either 0 or 2 real eigenvalues, and
# the mean is sqrt(2); the variance follows from the parity constraint.
k1 = cumulant(one, 1, 1).value
k2 = cumulant(one, 2, 1).value
print(f"n=1: E N_R = {k1:.15f}  (sqrt 2 = {math.sqrt(2):.15f})")
print(f"n=1: Var N_R = {k2:.15f}  (2 sqrt2 - 2 = {2 * math.sqrt(2) - 2:.15f})")

# The trace formula and the closed-form double sum for Var(N_R) are two
# different routes to the same number.
for n in (5, 20, 50):
    print(f"n={n:3d}: trace formula {cumulant(one, 2, n).value:.12f}   "
          f"double sum {variance_nr_exact(n):.12f}")

# Higher cumulants of a smooth statistic grow more slowly than the variance,
# which is what makes the fluctuations Gaussian.
x2 = EvenPolynomial.parse("x2")
print("\n   n     kappa2(x2)     kappa3(x2)     kappa4(x2)")
for n in (8, 32, 128):
    ks = [cumulant(x2, l, n).value for l in (2, 3, 4)]
    print(f"{n:4d}  " + "  ".join(f"{k:13.6f}" for k in ks))

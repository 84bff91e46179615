"""
Skew-orthogonal polynomials and their inner products
====================================================

The exact formulas rest on monomial skew inner products f^{(r,s)} with a
closed form. Here they are compared against brute-force two-dimensional
quadrature, and the real + complex inner products are shown to be
block-diagonal.
"""

import math

from realginibre import a_inner_quadrature, b_inner_quadrature, f_entry
from realginibre.skew_basis import skew_norm_constant

print("closed form vs quadrature for A[x^r y^s]_{2k1-2, 2k2-1}")
for r, s, k1, k2 in [(0, 0, 1, 1), (2, 2, 1, 1), (4, 2, 2, 3), (0, 4, 4, 4)]:
    closed = float(f_entry(r, s, k1, k2))
    quad = a_inner_quadrature(lambda x, y: x ** r * y ** s, 2 * k1 - 2, 2 * k2 - 1)
    print(f"  (r,s,k1,k2)=({r},{s},{k1},{k2}): {closed:.12g}  vs  {quad:.12g}"
          f"   rel err {abs(closed - quad) / closed:.1e}")

# A[1] alone is not orthogonal; adding the complex-plane part B[1] is.
print("\nA[1] + B[1] on polynomial indices (2j-2, 2k-1):")
for j in (1, 2):
    row = []
    for k in (1, 2):
        a, b = 2 * j - 2, 2 * k - 1
        row.append(a_inner_quadrature(lambda x, y: 1.0, a, b) + b_inner_quadrature(lambda z: 1.0, a, b))
    print("  " + "  ".join(f"{v:12.8f}" for v in row))
print(f"expected diagonal: {skew_norm_constant(1):.8f}, {skew_norm_constant(2):.8f}")
print(f"(sqrt(2 pi) = {math.sqrt(2 * math.pi):.8f})")

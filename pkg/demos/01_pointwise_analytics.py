"""
Pointwise derivative analytics
==============================

Everything the region and localisation machinery needs is built from
derivatives of V at a point.  Here we take V = -q1^2 q2^2 and compare
the toolkit against the closed forms |grad V| = 2|q1 q2||q| and
|Hess V|_F = 2 sqrt(|q|^4 + 6 q1^2 q2^2).
"""
import math

import numpy as np

from kfptools.polynomial import Polynomial, analyze_point, eval_derivative, log_weight, r_geq

# Polynomials are sparse maps from exponent tuples to coefficients.
V = Polynomial(2, {(2, 2): -1.0})
print(V)

# A single derivative, d/dq1 V at (1, 1) = -2 q1 q2^2 = -2.
print("d_q1 V(1,1) =", eval_derivative(V, (1, 0), (1.0, 1.0)))

# The full report at (1, 1): the Hessian [[-2,-4],[-4,-2]] has eigenvalues -6 and 2.
pa = analyze_point(V, (1.0, 1.0), kappa_list=[800.0])
print("gradient norm", pa.gradient_norm, "vs", 2 * math.sqrt(2))
print("Frobenius    ", pa.hessian_frobenius, "vs", 2 * math.sqrt(10))
print("eigenvalues  ", pa.eigenvalues, " Tr+ =", pa.tr_plus, " Tr- =", pa.tr_minus)
print("R>=n         ", pa.r_geq)

# The top-order indicator counts distinct multi-indices.  The ordered
# convention weighs (2, 2) by 4!/(2!2!) = 6 and is available for comparison.
print("R>=4 distinct", r_geq(V, (0.0, 0.0), 4), " ordered", r_geq(V, (0.0, 0.0), 4, "ordered"))

# Closed-form agreement at 100 random points.
rng = np.random.default_rng(0)
worst = 0.0
for q in rng.uniform(-10, 10, size=(100, 2)):
    q1, q2 = q
    pa = analyze_point(V, q)
    h = 2 * math.sqrt((q1 ** 2 + q2 ** 2) ** 2 + 6 * q1 ** 2 * q2 ** 2)
    worst = max(worst, abs(pa.hessian_frobenius - h) / h)
print("worst relative Frobenius error over 100 points:", worst)

# The logarithmic weight L(s) = (s+1)/log(s+1) has its minimum e at s = e - 1.
print("L(1) =", log_weight(1.0), " L(e-1) =", log_weight(math.e - 1), " L(100) =", log_weight(100.0))

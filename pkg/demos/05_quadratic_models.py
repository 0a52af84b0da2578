"""
Local quadratic models and the Taylor remainder
===============================================

On each ball V is replaced by its second-order Taylor polynomial at a
base point.  The remainder in first and second derivatives is bounded by
an explicit constant times powers of R3 at the base.
"""
import numpy as np

from kfptools.localization import compare_with_model, remainder_check, taylor_quadratic
from kfptools.polynomial import r_geq
from kfptools.potentials import example1, harmonic

# For V = q^2/2 at 0: A = 2^(2/3) and B = 1/(log 2)^2.
m = taylor_quadratic(harmonic(1), (0.0,))
print(f"harmonic: A = {m.A_const:.4f}, B = {m.B_const:.4f}")

# For Example 1 at (1, 1) the Hessian is invertible, so the model gradient
# reaches zero and B = 7/(log 8)^2.
V = example1()
m = taylor_quadratic(V, (1.0, 1.0))
print(f"example1 at (1,1): grad {m.gradient}, Tr- = {m.tr_minus}, B = {m.B_const:.4f}, t_j = {m.t_j:.4f}")

rep = remainder_check(V, m, a=0.25, samples=10_000)
print("remainder constants", rep.constants, " worst observed ratio", f"{rep.worst:.2e}")

# Deep inside the region the model gradient tracks the true gradient within
# a factor 2 on the whole ball.
base = np.array([60.0, 60.0])
radius = 0.25 / r_geq(V, base, 3)
print(compare_with_model(V, taylor_quadratic(V, base), radius))

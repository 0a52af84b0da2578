"""
Discrete Kramers-Fokker-Planck and Witten operators
===================================================

q is discretised by 4th-order central differences with Dirichlet
truncation; p by Hermite functions, in which O_p is diagonal with entries
n + 1/2.  The transport part is skew, so Re<u, K u> = <u, O_p u>.
"""
import numpy as np

from kfptools.potentials import harmonic, quartic
from kfptools.spectral import DiscreteGrid, assemble_kfp, assemble_op, assemble_witten, low_spectrum

from _common import output_dir

out = output_dir("operators")

# Accretivity with a nonzero force.
grid = DiscreteGrid(Lq=5.0, Nq=64, Np=12)
K = assemble_kfp(quartic(1), grid)
u = np.random.default_rng(0).standard_normal(grid.size)
print("Re<u,Ku> =", u @ (K.matrix @ u), "  <u,O_p u> =", u @ (assemble_op(grid).matrix @ u))

# The Witten Laplacian of q^2/2 is -d^2/dq^2 + q^2 - 1 with spectrum 0, 2, 4, ...
W = assemble_witten(harmonic(1), DiscreteGrid(10.0, 256, 4))
res = low_spectrum(W, k=3)
print("Witten eigenvalues", res.values, "residuals", res.residuals)
W.write_matrix_market(out / "witten_harmonic.mtx")

# K is not symmetric, so low_spectrum returns its smallest singular values.
sv = low_spectrum(assemble_kfp(harmonic(1), DiscreteGrid(8.0, 64, 16)), k=3)
print("smallest singular values of K", sv.values)

"""
A Weyl sequence for the degenerate case eps = -1
================================================

For V = (q1^2 - q2)^2 - q2^2 the functions u_n = chi((q2 + n^2)/n) e^{-V}
have disjoint supports and Rayleigh quotients of order 1/n^2 for the
Witten Laplacian, so its spectrum reaches down to 0 without a gap.
"""
from kfptools.spectral.weyl import support_interval, weyl_rayleigh

res = weyl_rayleigh(-1.0, n_list=(4, 8, 16, 32))
for n, v, tr in zip(res.n, res.quotients, res.traces):
    print(f"n = {n:2d}: quotient {v:.6e}, support q2 in {support_interval(n)}, nodes used {tr[-1][0]}")
print(f"fitted exponent {res.exponent:.4f} (amplitude {res.amplitude:.3f})")

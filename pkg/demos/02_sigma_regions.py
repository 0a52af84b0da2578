"""
Regions Sigma(kappa) and their complements
==========================================

Sigma(kappa) collects the points where the gradient dominates:
|grad V|^(4/3) >= kappa (|Hess V|_F + R3^4 + 1).  The contour CSV files
written here are the data behind membership shadings; any plotter can
render them.
"""
from kfptools.potentials import example1, example3
from kfptools.reporting import emit_contour, write_json
from kfptools.sigma import scan_complement, sigma_grid, sigma_membership

from _common import output_dir

out = output_dir("sigma")

# Example 1: the axes lie in the complement, the diagonal eventually in the region.
V = example1()
print(sigma_membership(V, 800, (0.0, 5.0)))
print(sigma_membership(V, 800, (100.0, 100.0)))
emit_contour(sigma_grid(V, 800, 10, 101), out / "example1_kappa800.csv")

# Example 3, V = (q1^2 - q2)^2 + eps q2^2.  For eps = 0.5 the complement is a
# bounded blob; for eps = 0 the parabola q2 = q1^2, where grad V vanishes,
# runs to infinity.
for eps in (0.5, 0.0):
    emit_contour(sigma_grid(example3(eps), 2, 20, 101), out / f"example3_eps{eps}.csv")
    scan = scan_complement(example3(eps), 2, 20)
    print(f"eps={eps}: verdict {scan.verdict}, last complement hit at |q| ~ {scan.last_hit_radius:.3g}")
    write_json(out / f"example3_eps{eps}_scan.json", scan.summary())

# Bounded complements can still reach far: for eps = 0.5 the last hit sits
# near |q| = 1.6e4, which is why the probe sweeps out to 4 * box * 10^4.
print("contours and scans written to", out)

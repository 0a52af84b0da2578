"""
Checking the decay assumption on Examples 1 and 2
=================================================

On the complement of Sigma(kappa) the trace condition Tr- >= Tr+/C1 and
the decay of R3^4/|Hess V|_F are checked empirically.  The decay is
fitted as a power law on spheres of radius 1e5 to 1e9.
"""
from kfptools.potentials import example1, example2
from kfptools.reporting import write_json
from kfptools.sigma import check_assumption, power_law_fit

from _common import output_dir

out = output_dir("assumption")

# The fitter itself: an exact power law is recovered to rounding.
rho = [1, 2, 4, 8, 16]
print(power_law_fit(rho, [5 * r ** -2 for r in rho]))

# Example 1 decays like |q|^(-2/3); Example 2 with exponent n decays only for n = 1.
for name, V in [("example1", example1()), ("example2_n1", example2(1)),
                ("example2_n2", example2(2)), ("example2_n3", example2(3))]:
    rep = check_assumption(V, kappa=800, c1=1)
    fit = rep.decay_fit
    print(f"{name:12s} trace condition {rep.condition_1_4!s:5s}  decay exponent {fit.exponent:+.3f}"
          f"  decay condition {rep.condition_1_5}")
    write_json(out / f"{name}.json", rep.to_dict())

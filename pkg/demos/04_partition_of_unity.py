"""
A partition of unity adapted to the slow metric
===============================================

Balls of radius a / R3(q_j) are laid down greedily over a grid of the box
until every node is covered.  The cutoffs psi_j satisfy sum psi_j^2 = 1,
overlap a bounded number of times, and have gradients of size R3.
"""
import time

from kfptools.localization import build_partition, check_partition, slow_metric_probe
from kfptools.potentials import example1
from kfptools.reporting import write_json

from _common import output_dir

out = output_dir("partition")
V = example1()

# First the slowness constant C of the metric R3(q)^2 dq^2.  Ball sizes
# must satisfy a <= 1/C for the construction to be valid.
probe = slow_metric_probe(V, n=3)
print(f"slow metric constant C = {probe.C:.3f}, C' = {probe.C_prime:.3f}")

# The box [-10, 10]^2 with a = 1/4 and b = 1/8.
t = time.perf_counter()
part = build_partition(V, 10.0, a=0.25, b=0.125)
print(f"{part.m} balls in {time.perf_counter() - t:.1f} s")
chk = check_partition(V, part, samples=10_000)
print(f"max |sum psi^2 - 1| = {chk.max_sum_defect:.2e}")
print(f"max overlap {chk.max_overlap} (bound {chk.overlap_bound})")
print(f"sum |grad psi|^2 <= {chk.gradient_constant:.0f} R3^2 on the samples")
write_json(out / "example1_box10_check.json", chk.to_dict())

# The gradient constant is stable when the covering grid is refined.
small = build_partition(V, 3.0, a=0.25, b=0.125)
finer = build_partition(V, 3.0, a=0.25, b=0.125, grid_per_axis=2 * small.grid_per_axis - 1)
c0 = check_partition(V, small).gradient_constant
c1 = check_partition(V, finer).gradient_constant
print(f"box 3: c = {c0:.0f} on the base grid, {c1:.0f} on the doubled grid")

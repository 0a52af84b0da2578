"""
The IMS localisation identity on the grid
=========================================

For cutoffs with sum chi_j^2 = 1, |K u|^2 = sum_j |K(chi_j u)|^2 - |(p . grad chi_j) u|^2.
Using the same discrete K on both sides leaves only the commutator
defect, which vanishes at the order of the q stencil.
"""
from kfptools.potentials import quartic
from kfptools.spectral import DiscreteGrid
from kfptools.spectral.ims import TrivialPartition, TwoBumpPartition, ims_identity_check, ims_refinement

V = quartic(1)

# One cutoff equal to 1: nothing to commute, defect exactly zero.
print("trivial partition:", ims_identity_check(V, DiscreteGrid(6.0, 64, 8), TrivialPartition(1)).max_defect)

# Two smooth cutoffs meeting around q = 0, refined three times.
two = TwoBumpPartition(1, center=0.0, width=2.0)
for order in (2, 4):
    st = ims_refinement(V, 6.0, 8, [64, 128, 256], two, fd_order=order)
    print(f"stencil order {order}: defects {['%.2e' % d for d in st.defects]}, observed orders "
          f"{[round(o, 2) for o in st.orders]}")

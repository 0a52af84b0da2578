"""Discrete phase-space operators and the numerical checks built on them."""
from .grid import BUDGET_ENV, BudgetError, DiscreteGrid, matrix_budget
from .operators import (DiscreteOperator, assemble_kfp, assemble_op, assemble_witten, fd_matrix,
                        hermite_blocks, multiplier)
from .lanczos import LanczosConvergenceError, SpectrumResult, low_spectrum

"""Sparse assembly of the Kramers-Fokker-Planck and Witten operators.

Unknowns are ordered (q1, ..., qd, p1, ..., pd) with the last index
fastest, so every operator is a sum of Kronecker products of per-axis
factors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

import numpy as np
import scipy.io
import scipy.sparse as sp

from ..polynomial import Polynomial, gradient, laplacian
from .grid import DiscreteGrid

FD_STENCILS = {
    # first derivative, offsets -2..2 (order 4) or -1..1 (order 2), in units of 1/h
    (1, 4): {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12},
    (1, 2): {-1: -0.5, 1: 0.5},
    # second derivative, in units of 1/h^2
    (2, 4): {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12},
    (2, 2): {-1: 1.0, 0: -2.0, 1: 1.0},
}


def fd_matrix(n: int, h: float, deriv: int, order: int = 4) -> sp.csr_matrix:
    """Central-difference matrix with Dirichlet truncation (ghost values are zero)."""
    try:
        stencil = FD_STENCILS[(deriv, order)]
    except KeyError:
        raise ValueError(f"no stencil for derivative {deriv} at order {order}") from None
    diags = {k: np.full(n - abs(k), c / h ** deriv) for k, c in stencil.items()}
    return sp.diags(list(diags.values()), list(diags.keys()), shape=(n, n), format="csr")


def hermite_blocks(Np: int):
    """(P, Dp, Op) in the first Np normalised Hermite functions.

    P is multiplication by p (symmetric), Dp is d/dp (skew) and Op is
    (-d^2/dp^2 + p^2)/2 = diag(n + 1/2), kept exact rather than formed as
    (Dp^2 + P^2)/2, which is wrong in the last mode after truncation.
    """
    k = np.arange(1, Np)
    off = np.sqrt(k / 2.0)
    P = sp.diags([off, off], [1, -1], shape=(Np, Np), format="csr")
    Dp = sp.diags([off, -off], [1, -1], shape=(Np, Np), format="csr")
    Op = sp.diags(np.arange(Np) + 0.5, 0, format="csr")
    return P, Dp, Op


def _kron_all(factors):
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return out


def embed(grid: DiscreteGrid, q_ops: Dict[int, sp.spmatrix] | None = None,
          p_ops: Dict[int, sp.spmatrix] | None = None, q_diag: np.ndarray | None = None,
          with_p: bool = True) -> sp.csr_matrix:
    """Tensor product of per-axis factors (identity where none is given).

    ``q_diag`` multiplies by a function sampled on all q nodes; it is
    combined with any q-axis factors as diag(q_diag) @ kron(q factors).
    """
    q_ops = q_ops or {}
    p_ops = p_ops or {}
    Iq = sp.identity(grid.Nq, format="csr")
    Ip = sp.identity(grid.Np, format="csr")
    qpart = _kron_all([q_ops.get(k, Iq) for k in range(grid.d)])
    if q_diag is not None:
        qpart = sp.diags(np.asarray(q_diag, dtype=float)) @ qpart
    if not with_p:
        return sp.csr_matrix(qpart)
    ppart = _kron_all([p_ops.get(k, Ip) for k in range(grid.d)])
    return sp.kron(qpart, ppart, format="csr")


@dataclass(frozen=True)
class DiscreteOperator:
    matrix: sp.csr_matrix
    grid: DiscreteGrid
    kind: str  # "KFP", "Witten", "O_p" or "multiplier"
    symmetric: bool

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, u):
        return self.matrix @ u

    def write_matrix_market(self, path, comment: str = "") -> None:
        """Matrix Market coordinate text; entries in sorted CSR order for reproducibility."""
        m = sp.csr_matrix(self.matrix)
        m.sort_indices()
        scipy.io.mmwrite(str(path), m.tocoo(), comment=comment or f"kfptools {self.kind}",
                         field="real", precision=17,
                         symmetry="symmetric" if self.symmetric else "general")


def _check_poly(poly: Polynomial, grid: DiscreteGrid) -> None:
    if poly.d != grid.d:
        raise ValueError(f"potential has d={poly.d} but the grid has d={grid.d}")


def assemble_op(grid: DiscreteGrid, p_only: bool = False) -> DiscreteOperator:
    """O_p = sum_k (-d^2/dp_k^2 + p_k^2)/2 on the phase-space grid.

    With ``p_only`` the q factor is dropped and the matrix acts on the
    Np^d Hermite coefficients alone.
    """
    if p_only:
        return DiscreteOperator(sp.diags(hermite_levels(grid), format="csr"), grid, "O_p", True)
    grid.check_budget()
    _, _, Op = hermite_blocks(grid.Np)
    M = sum(embed(grid, p_ops={k: Op}) for k in range(grid.d))
    return DiscreteOperator(sp.csr_matrix(M), grid, "O_p", True)


def transport_parts(poly: Polynomial, grid: DiscreteGrid, fd_order: int = 4):
    """(p.d_q, -d_qV.d_p) as separate sparse matrices; both are skew-symmetric."""
    P, Dp, _ = hermite_blocks(grid.Np)
    Dq = fd_matrix(grid.Nq, grid.h, 1, fd_order)
    g = gradient(poly, grid.q_points())
    free = sum(embed(grid, q_ops={k: Dq}, p_ops={k: P}) for k in range(grid.d))
    force = sum(embed(grid, p_ops={k: Dp}, q_diag=-g[:, k]) for k in range(grid.d))
    return sp.csr_matrix(free), sp.csr_matrix(force)


def assemble_kfp(poly: Polynomial, grid: DiscreteGrid, fd_order: int = 4) -> DiscreteOperator:
    """K = p.d_q - d_qV(q).d_p + O_p, assembled as a sparse sum of tensor products."""
    _check_poly(poly, grid)
    poly.require_nonzero()
    if poly.degree < 1:
        raise ValueError("the potential must have degree >= 1")
    grid.check_budget()
    free, force = transport_parts(poly, grid, fd_order)
    K = free + force + assemble_op(grid).matrix
    K = sp.csr_matrix(K)
    K.sort_indices()
    return DiscreteOperator(K, grid, "KFP", False)


def assemble_witten(poly: Polynomial, grid: DiscreteGrid, fd_order: int = 4) -> DiscreteOperator:
    """-Laplacian + |grad V|^2 - Laplacian(V) on the q grid (the p factor is not used)."""
    _check_poly(poly, grid)
    grid.check_budget(grid.q_size)
    L2 = fd_matrix(grid.Nq, grid.h, 2, fd_order)
    x = grid.q_points()
    pot = np.sum(gradient(poly, x) ** 2, axis=1) - laplacian(poly, x)
    lap = sum(embed(grid, q_ops={k: L2}, with_p=False) for k in range(grid.d))
    W = sp.csr_matrix(-lap + sp.diags(pot))
    W.sort_indices()
    return DiscreteOperator(W, grid, "Witten", True)


def multiplier(grid: DiscreteGrid, q_values: np.ndarray | None = None,
               p_values: np.ndarray | None = None) -> DiscreteOperator:
    """Diagonal operator f(q) g(n) on the phase-space grid (either factor optional)."""
    qv = np.ones(grid.q_size) if q_values is None else np.asarray(q_values, dtype=float)
    pv = np.ones(grid.p_size) if p_values is None else np.asarray(p_values, dtype=float)
    return DiscreteOperator(sp.diags(np.kron(qv, pv), format="csr"), grid, "multiplier", True)


def hermite_levels(grid: DiscreteGrid) -> np.ndarray:
    """Eigenvalue of O_p on every p basis vector (sum of n_k + 1/2)."""
    n = np.arange(grid.Np) + 0.5
    out = n
    for _ in range(grid.d - 1):
        out = np.add.outer(out, n).ravel()
    return out

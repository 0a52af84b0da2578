"""Discrete check of the IMS localisation identity.

For cutoffs chi_j(q) with sum chi_j^2 = 1,

    |K u|^2 = sum_j |K(chi_j u)|^2 - |(p . grad chi_j) u|^2

holds exactly in the continuum.  Both sides are evaluated with the same
discrete K, so the defect measures only how far the discrete commutator
[K, chi_j] is from multiplication by p . grad chi_j.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
import scipy.sparse as sp

from ..localization import CutoffValues
from ..polynomial import Polynomial
from .grid import DiscreteGrid
from .operators import assemble_kfp, embed, hermite_blocks


def _smooth_ramp(t):
    """C-infinity step from 0 (t <= 0) to 1 (t >= 1)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        f0 = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        s = 1.0 - t
        f1 = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    return f0 / (f0 + f1)


def _smooth_ramp_deriv(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = (t > 0) & (t < 1)
    tm = t[m]
    f0 = np.exp(-1.0 / tm)
    f1 = np.exp(-1.0 / (1.0 - tm))
    d0 = f0 / tm ** 2
    d1 = -f1 / (1.0 - tm) ** 2
    out[m] = (d0 * (f0 + f1) - f0 * (d0 + d1)) / (f0 + f1) ** 2
    return out


class TrivialPartition:
    """The single cutoff chi = 1."""

    m = 1

    def __init__(self, d: int):
        self.d = d

    def psi(self, x, derivatives: int = 1) -> CutoffValues:
        x = np.atleast_2d(x)
        n = len(x)
        return CutoffValues(np.arange(n + 1), np.zeros(n, dtype=np.int64), np.ones(n),
                            np.zeros((n, self.d)) if derivatives else None)


class TwoBumpPartition:
    """chi_1 = cos(pi/2 * s), chi_2 = sin(pi/2 * s), s a smooth ramp along one axis.

    The ramp climbs from 0 to 1 across [center - width, center + width].
    """

    m = 2

    def __init__(self, d: int, center: float = 0.0, width: float = 2.0, axis: int = 0):
        self.d, self.center, self.width, self.axis = d, float(center), float(width), axis

    def psi(self, x, derivatives: int = 1) -> CutoffValues:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        n = len(x)
        t = (x[:, self.axis] - self.center + self.width) / (2 * self.width)
        s = _smooth_ramp(t)
        ang = 0.5 * np.pi * s
        val = np.stack([np.cos(ang), np.sin(ang)], axis=1).ravel()
        out = CutoffValues(2 * np.arange(n + 1), np.tile([0, 1], n), val)
        if derivatives:
            ds = _smooth_ramp_deriv(t) / (2 * self.width) * 0.5 * np.pi
            g = np.zeros((n, 2, self.d))
            g[:, 0, self.axis] = -np.sin(ang) * ds
            g[:, 1, self.axis] = np.cos(ang) * ds
            out.grad = g.reshape(2 * n, self.d)
        return out


def smooth_test_vectors(grid: DiscreteGrid, count: int, seed: int = 0, kmax: int = 6,
                        nmax: int = 3) -> np.ndarray:
    """Random combinations of low Dirichlet sine modes in q times low Hermite modes in p.

    The vectors sample one fixed continuum function on every grid, which is
    what a refinement study needs (white noise has no continuum limit).
    Columns are normalised.
    """
    rng = np.random.default_rng(seed)
    x = grid.nodes
    modes = np.stack([np.sin(k * np.pi * (x + grid.Lq) / (2 * grid.Lq)) for k in range(1, kmax + 1)])
    nm = min(nmax + 1, grid.Np)
    out = np.zeros((grid.size, count))
    for c in range(count):
        if grid.d == 1:
            coef = rng.standard_normal((kmax, nm))
            qp = modes.T @ coef  # (Nq, nm)
            full = np.zeros((grid.Nq, grid.Np))
            full[:, :nm] = qp
        else:
            coef = rng.standard_normal((kmax, kmax, nm, nm))
            qp = np.einsum("ia,jb,abmn->ijmn", modes.T, modes.T, coef)
            full = np.zeros((grid.Nq, grid.Nq, grid.Np, grid.Np))
            full[:, :, :nm, :nm] = qp
        v = full.ravel()
        out[:, c] = v / np.linalg.norm(v)
    return out


@dataclass
class ImsReport:
    grid: dict
    partition_size: int
    trials: int
    seed: int
    defects: List[float]

    @property
    def max_defect(self) -> float:
        return max(self.defects) if self.defects else 0.0

    def to_dict(self) -> dict:
        return {"grid": self.grid, "partition_size": self.partition_size, "trials": self.trials,
                "seed": self.seed, "defects": self.defects, "max_relative_defect": self.max_defect}


def ims_identity_check(poly: Polynomial, grid: DiscreteGrid, partition, trials: int = 8,
                       seed: int = 0, fd_order: int = 4) -> ImsReport:
    """Max over test vectors of |lhs - rhs| / |K u|^2 for the IMS identity."""
    K = assemble_kfp(poly, grid, fd_order).matrix
    x = grid.q_points()
    cut = partition.psi(x, derivatives=1)
    chi = cut.dense(partition.m)  # (Nq^d, m)
    dchi = cut.dense_grad(partition.m)  # (Nq^d, m, d)
    P, _, _ = hermite_blocks(grid.Np)
    U = smooth_test_vectors(grid, trials, seed)
    KU = K @ U
    lhs = np.sum(KU * KU, axis=0)
    rhs = np.zeros(trials)
    for j in range(partition.m):
        cj = embed(grid, q_diag=chi[:, j])
        KcU = K @ (cj @ U)
        rhs += np.sum(KcU * KcU, axis=0)
        comm = sp.csr_matrix((grid.size, grid.size))
        for k in range(grid.d):
            comm = comm + embed(grid, p_ops={k: P}, q_diag=dchi[:, j, k])
        CU = comm @ U
        rhs -= np.sum(CU * CU, axis=0)
    rel = np.abs(lhs - rhs) / lhs
    return ImsReport(grid.to_dict(), partition.m, trials, seed, [float(v) for v in rel])


@dataclass
class RefinementStudy:
    nq: List[int]
    h: List[float]
    defects: List[float]
    fd_order: int

    @property
    def orders(self) -> List[float]:
        """Observed orders log(e_i / e_{i+1}) / log(h_i / h_{i+1}); nan where a defect is 0."""
        out = []
        for i in range(len(self.h) - 1):
            e0, e1 = self.defects[i], self.defects[i + 1]
            out.append(float(np.log(e0 / e1) / np.log(self.h[i] / self.h[i + 1]))
                       if e0 > 0 and e1 > 0 else float("nan"))
        return out

    def to_dict(self) -> dict:
        return {"fd_order": self.fd_order, "nq": self.nq, "h": self.h,
                "max_relative_defect": self.defects, "observed_orders": self.orders}


def ims_refinement(poly: Polynomial, Lq: float, Np: int, nq_list: Sequence[int], partition,
                   trials: int = 6, seed: int = 0, fd_order: int = 4) -> RefinementStudy:
    """IMS defect on a sequence of q grids; the observed order should match ``fd_order``."""
    hs, ds = [], []
    for nq in nq_list:
        g = DiscreteGrid(Lq, int(nq), Np, poly.d)
        hs.append(g.h)
        ds.append(ims_identity_check(poly, g, partition, trials, seed, fd_order).max_defect)
    return RefinementStudy([int(n) for n in nq_list], hs, ds, fd_order)

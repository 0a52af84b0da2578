"""Discrete witness for the log-weighted subelliptic estimate.

For each test vector u the smallest C with

    |K u|^2 + C |u|^2 >= (1/C) * RHS(u),
    RHS(u) = |L(O_p) u|^2 + |L(<grad V>^(2/3)) u|^2
           + |L(<Hess V>^(1/2)) u|^2 + |L(<D_q>^(2/3)) u|^2,

is the positive root of C^2 |u|^2 + C |K u|^2 - RHS(u) = 0.  The report
keeps the worst test and C >= 1.  L(s) = (s+1)/log(s+1) is applied to
max(s, 1), since the lowest Hermite level 1/2 sits below its domain.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.fft import dstn, idstn

from ..polynomial import Polynomial, frobenius, gradient, hessian, log_weight, sigma_sides
from .grid import DiscreteGrid
from .operators import assemble_kfp, hermite_levels


def _L(s):
    return log_weight(np.maximum(s, 1.0))


@dataclass
class EstimateTerms:
    """Every norm entering the estimate, for a batch of test vectors (one per column)."""

    u2: np.ndarray
    Ku2: np.ndarray
    op: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    dq: np.ndarray

    @property
    def rhs(self) -> np.ndarray:
        return self.op + self.grad + self.hess + self.dq

    def constants(self) -> np.ndarray:
        u2, k2, r = self.u2, self.Ku2, self.rhs
        return (-k2 + np.sqrt(k2 * k2 + 4 * u2 * r)) / (2 * u2)


class EstimateOperators:
    """Discrete K and the four weight multipliers on one grid."""

    def __init__(self, poly: Polynomial, grid: DiscreteGrid):
        self.poly, self.grid = poly, grid
        self.K = assemble_kfp(poly, grid).matrix
        x = grid.q_points()
        ones_p = np.ones(grid.p_size)
        ones_q = np.ones(grid.q_size)
        g = np.sqrt(np.sum(gradient(poly, x) ** 2, axis=1))
        hf = frobenius(hessian(poly, x))
        self.w_op = np.kron(ones_q, _L(hermite_levels(grid)))
        self.w_grad = np.kron(_L((1 + g * g) ** (1.0 / 3.0)), ones_p)
        self.w_hess = np.kron(_L((1 + hf * hf) ** 0.25), ones_p)
        k = np.arange(1, grid.Nq + 1) * np.pi / (2 * grid.Lq)
        xi2 = k * k
        for _ in range(grid.d - 1):
            xi2 = np.add.outer(xi2, k * k)
        self.w_dq = _L((1 + xi2) ** (1.0 / 3.0))

    def apply_dq(self, u: np.ndarray) -> np.ndarray:
        """L(<D_q>^(2/3)) through the orthonormal DST-I of the Dirichlet grid."""
        g = self.grid
        shape = (g.Nq,) * g.d + (g.p_size, u.shape[1])
        axes = tuple(range(g.d))
        U = dstn(u.reshape(shape), type=1, axes=axes, norm="ortho")
        U *= self.w_dq.reshape((g.Nq,) * g.d + (1, 1))
        return idstn(U, type=1, axes=axes, norm="ortho").reshape(u.shape)

    def terms(self, U: np.ndarray) -> EstimateTerms:
        U = np.asarray(U, dtype=float).reshape(self.grid.size, -1)
        KU = self.K @ U

        def n2(v):
            return np.sum(v * v, axis=0)

        return EstimateTerms(n2(U), n2(KU), n2(self.w_op[:, None] * U), n2(self.w_grad[:, None] * U),
                             n2(self.w_hess[:, None] * U), n2(self.apply_dq(U)))


def hermite_function(n: int, p: np.ndarray) -> np.ndarray:
    """Normalised Hermite function h_n(p) by the stable three-term recurrence."""
    h0 = np.pi ** -0.25 * np.exp(-p * p / 2)
    if n == 0:
        return h0
    h1 = np.sqrt(2.0) * p * h0
    for k in range(1, n):
        h0, h1 = h1, np.sqrt(2.0 / (k + 1)) * p * h1 - np.sqrt(k / (k + 1)) * h0
    return h1


def bump_vector(grid: DiscreteGrid, center, sigma: float, n: int = 0) -> np.ndarray:
    """Gaussian bump in q times the n-th Hermite mode of p_1 (ground mode elsewhere)."""
    x = grid.q_points()
    gq = np.exp(-np.sum((x - np.asarray(center, dtype=float)) ** 2, axis=1) / (2 * sigma ** 2))
    ep = np.zeros(grid.p_size)
    ep[n * grid.Np ** (grid.d - 1)] = 1.0
    return np.kron(gq, ep)


@dataclass
class EstimateReport:
    C: float
    grid: dict
    seed: int
    tests: List[Dict]
    worst: str
    refinement: List[Dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"C": self.C, "grid": self.grid, "seed": self.seed, "worst_test": self.worst,
                "tests": self.tests, "refinement_trace": self.refinement}


def _bump_centres(grid: DiscreteGrid, per_axis: int):
    ax = np.linspace(-0.6 * grid.Lq, 0.6 * grid.Lq, per_axis)
    mesh = np.meshgrid(*([ax] * grid.d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def subelliptic_report(poly: Polynomial, grid: DiscreteGrid, trials: int = 8, seed: int = 0,
                       kappa: float = 2.0, sigma: float = 0.5, bumps_per_axis: int = 5,
                       hermite_modes=(0, 1, 2)) -> EstimateReport:
    """Smallest C that makes the estimate hold on every test vector.

    Tests: ``trials`` seeded white-noise vectors plus Gaussian bumps of width
    ``sigma`` at a grid of centres, each paired with low Hermite modes; every
    bump is tagged with whether its centre lies in the region of parameter
    kappa.
    """
    ops = EstimateOperators(poly, grid)
    rng = np.random.default_rng(seed)
    cols, names, meta = [], [], []
    for t in range(trials):
        cols.append(rng.standard_normal(grid.size))
        names.append(f"random[{t}]")
        meta.append({})
    centres = _bump_centres(grid, bumps_per_axis)
    lhs, base = sigma_sides(poly, centres)
    for c, inside in zip(centres, lhs >= kappa * base):
        for n in hermite_modes:
            if n >= grid.Np:
                continue
            cols.append(bump_vector(grid, c, sigma, n))
            names.append(f"bump(q={np.round(c, 6).tolist()}, n={n})")
            meta.append({"center": c.tolist(), "hermite": n, "in_sigma": bool(inside)})
    T = ops.terms(np.stack(cols, axis=1))
    Cs = np.maximum(T.constants(), 1.0)
    tests = [dict(name=nm, C=float(c), **m) for nm, c, m in zip(names, Cs, meta)]
    i = int(np.argmax(Cs))
    return EstimateReport(float(Cs[i]), grid.to_dict(), seed, tests, names[i])


def subelliptic_stability(poly: Polynomial, grid: DiscreteGrid, factor: float = 1.5,
                          **kwargs) -> EstimateReport:
    """Report on ``grid`` with a refinement trace to Nq, Np scaled by ``factor``."""
    coarse = subelliptic_report(poly, grid, **kwargs)
    fine_grid = grid.refined(factor)
    fine = subelliptic_report(poly, fine_grid, **kwargs)
    coarse.refinement = [{"grid": grid.to_dict(), "C": coarse.C},
                         {"grid": fine_grid.to_dict(), "C": fine.C, "growth": fine.C / coarse.C}]
    return coarse

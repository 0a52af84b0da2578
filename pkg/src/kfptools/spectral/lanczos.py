"""Lanczos iteration with full reorthogonalisation, and the low-spectrum driver."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .operators import DiscreteOperator

DEFAULT_MAX_ITER = 5000
RESIDUAL_RTOL = 1e-8


class LanczosConvergenceError(RuntimeError):
    def __init__(self, message, iterations, residuals):
        super().__init__(message)
        self.iterations = iterations
        self.residuals = residuals


def lanczos_extreme(apply: Callable[[np.ndarray], np.ndarray], n: int, k: int,
                    accept: Callable[[np.ndarray, np.ndarray], np.ndarray],
                    seed: int = 0, max_iter: int = DEFAULT_MAX_ITER,
                    deflate: Optional[np.ndarray] = None, check_every: int = 10):
    """k largest-magnitude Ritz pairs of a symmetric operator.

    ``accept(theta, vectors)`` returns a boolean mask telling which Ritz
    pairs meet the caller's residual test; iteration stops once the k
    dominant ones all pass.  Every new Lanczos vector is orthogonalised
    twice against the whole basis (and against ``deflate`` if given).
    """
    rng = np.random.default_rng(seed)
    Q = np.zeros((n, min(n, max_iter) + 1))
    D = None if deflate is None else np.linalg.qr(np.atleast_2d(deflate.T).T)[0]

    def orth(w, upto):
        for _ in range(2):
            if D is not None:
                w = w - D @ (D.T @ w)
            w = w - Q[:, :upto] @ (Q[:, :upto].T @ w)
        return w

    v = orth(rng.standard_normal(n), 0)
    Q[:, 0] = v / np.linalg.norm(v)
    alpha, beta = [], []
    m_cap = Q.shape[1] - 1
    theta = vecs = None
    for j in range(m_cap):
        w = apply(Q[:, j])
        a = float(Q[:, j] @ w)
        alpha.append(a)
        w = orth(w, j + 1)
        b = float(np.linalg.norm(w))
        done = (j + 1 == m_cap) or b <= 1e-14 * max(1.0, abs(a))
        if (j + 1) >= k and ((j + 1) % check_every == 0 or done):
            T = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
            ev, S = np.linalg.eigh(T)
            order = np.argsort(-np.abs(ev), kind="stable")[:k]
            theta = ev[order]
            vecs = Q[:, : j + 1] @ S[:, order]
            ok = accept(theta, vecs)
            if np.all(ok):
                return theta, vecs, j + 1
        if done:
            break
        beta.append(b)
        Q[:, j + 1] = w / b
    raise LanczosConvergenceError(f"Lanczos did not converge within {len(alpha)} iterations",
                                  len(alpha), None)


def estimate_norm(apply: Callable, apply_t: Callable, n: int, iters: int = 60, seed: int = 0) -> float:
    """Power-iteration estimate of the spectral norm."""
    rng = np.random.default_rng(seed + 7919)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    s = 0.0
    for _ in range(iters):
        y = apply_t(apply(x))
        s_new = float(np.linalg.norm(y))
        if s_new == 0:
            return 0.0
        x = y / s_new
        if abs(s_new - s) <= 1e-10 * s_new:
            s = s_new
            break
        s = s_new
    return float(np.sqrt(s))


@dataclass
class SpectrumResult:
    kind: str  # "eigenvalues" or "singular_values"
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    norm_estimate: float
    iterations: int
    seed: int

    def to_dict(self) -> dict:
        return {"kind": self.kind, "values": self.values.tolist(),
                "residuals": self.residuals.tolist(), "norm_estimate": self.norm_estimate,
                "iterations": self.iterations, "seed": self.seed}


def _factor(A: sp.csc_matrix):
    try:
        return spla.splu(A)
    except RuntimeError:
        return None


def low_spectrum(op: DiscreteOperator, k: int = 3, seed: int = 0, max_iter: int = DEFAULT_MAX_ITER,
                 deflate: Optional[np.ndarray] = None) -> SpectrumResult:
    """k smallest-magnitude eigenvalues (symmetric op) or singular values (otherwise).

    Lanczos runs on the inverse (shift-invert through a sparse LU), on A for
    symmetric operators and on A^T A for the others, so the wanted end of
    the spectrum converges first.  Each returned pair satisfies
    |A v - lambda v| <= 1e-8 |A|_est, with |A|_est from power iteration
    (for singular values the test is on A^T A and |A|_est^2).
    """
    if not 1 <= k <= 20:
        raise ValueError("k must lie in 1..20")
    A = sp.csc_matrix(op.matrix, dtype=float)
    n = A.shape[0]
    if k > n:
        raise ValueError("k exceeds the operator dimension")
    norm = estimate_norm(lambda x: A @ x, lambda y: A.T @ y, n, seed=seed)
    if op.symmetric:
        shift = 0.0
        lu = _factor(A)
        if lu is None:
            shift = -1e-10 * max(norm, 1.0)
            lu = _factor(sp.csc_matrix(A - shift * sp.identity(n)))
        apply = lu.solve
        tol = RESIDUAL_RTOL * norm

        def accept(theta, vecs):
            lam = shift + 1.0 / theta
            res = np.linalg.norm(A @ vecs - vecs * lam, axis=0)
            return res <= tol

        theta, vecs, its = lanczos_extreme(apply, n, k, accept, seed, max_iter, deflate)
        lam = shift + 1.0 / theta
        order = np.argsort(np.abs(lam), kind="stable")
        lam, vecs = lam[order], vecs[:, order]
        res = np.linalg.norm(A @ vecs - vecs * lam, axis=0)
        return SpectrumResult("eigenvalues", lam, vecs, res, norm, its, seed)

    lu = _factor(A)
    if lu is None:
        raise np.linalg.LinAlgError("operator is singular; pass deflate= to remove its kernel")

    def apply(x):
        return lu.solve(lu.solve(x, trans="T"))

    tol = RESIDUAL_RTOL * norm ** 2

    def accept(theta, vecs):
        s2 = 1.0 / theta
        res = np.linalg.norm(A.T @ (A @ vecs) - vecs * s2, axis=0)
        return res <= tol

    theta, vecs, its = lanczos_extreme(apply, n, k, accept, seed, max_iter, deflate)
    s2 = 1.0 / theta
    order = np.argsort(s2, kind="stable")
    s2, vecs = s2[order], vecs[:, order]
    res = np.linalg.norm(A.T @ (A @ vecs) - vecs * s2, axis=0)
    return SpectrumResult("singular_values", np.sqrt(np.maximum(s2, 0.0)), vecs, res, norm, its, seed)

"""Rayleigh quotients of the Weyl sequence for V = (q1^2 - q2)^2 - q2^2.

u_n(q) = chi((q2 + n^2)/n) * exp(-V(q)) with chi a C-infinity bump on
[-1, 1].  Since (d_q + grad V)(chi e^{-V}) = e^{-V} grad chi,

    <u_n, Witten u_n> / |u_n|^2 = n^-2 * int chi'^2 w / int chi^2 w,
    w(q) = exp(-2 V(q)),

which is evaluated by tensor Gauss-Legendre quadrature on the support.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..potentials import example3


class QuadratureError(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def bump(t):
    """exp(-1/(1 - t^2)) on (-1, 1), zero outside; returns (chi, chi')."""
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1
    s = np.where(inside, 1 - t * t, 1.0)
    chi = np.where(inside, np.exp(-1.0 / s), 0.0)
    dchi = np.where(inside, chi * (-2 * t / s ** 2), 0.0)
    return chi, dchi


def _quotient(n: int, m: int, amplitude: float, q1_halfwidth: float) -> Tuple[float, float]:
    """(quotient, |u_n|^2) with m Gauss-Legendre nodes per axis."""
    x, w = np.polynomial.legendre.leggauss(m)
    t = x  # q2 = -n^2 + n t
    q2 = -n * n + n * t
    q1 = q1_halfwidth * x
    Q1, Q2 = np.meshgrid(q1, q2, indexing="ij")
    W = np.outer(w * q1_halfwidth, w * n)
    V = Q1 ** 4 - 2 * Q2 * Q1 ** 2
    logw = -2 * V
    shift = logw.max()
    wt = np.exp(logw - shift) * W
    chi, dchi = bump(t)
    num = np.sum(wt * (dchi / n)[None, :] ** 2)
    den = np.sum(wt * chi[None, :] ** 2)
    norm2 = amplitude ** 2 * den * np.exp(shift)
    if amplitude == 0 or den == 0:
        raise ValueError("u_n is the zero vector; the Rayleigh quotient is undefined")
    return float(num / den), float(norm2)


@dataclass
class WeylResult:
    n: List[int]
    quotients: List[float]
    exponent: float
    amplitude: float
    traces: List[List[Tuple[int, float]]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"n": self.n, "quotients": self.quotients, "fitted_exponent": self.exponent,
                "fitted_amplitude": self.amplitude,
                "refinement_traces": [[[m, v] for m, v in tr] for tr in self.traces]}


def weyl_rayleigh(epsilon: float = -1.0, n_list: Sequence[int] = (4, 8, 16, 32),
                  nodes: int = 64, max_nodes: int = 4096, rtol: float = 1e-10,
                  amplitude: float = 1.0) -> WeylResult:
    """Rayleigh quotients of u_n for each n, with a log-log slope fit.

    The node count doubles from ``nodes`` until two successive quotients
    agree to ``rtol``.  The q1 window is |q1| <= 12/n, beyond which the
    weight is below exp(-200) relative to its peak.
    """
    if epsilon != -1.0:
        raise ValueError("the Weyl sequence is constructed for epsilon = -1 only")
    if amplitude == 0:
        raise ValueError("u_n is the zero vector; the Rayleigh quotient is undefined")
    n_list = [int(n) for n in n_list]
    if any(n < 2 for n in n_list) or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing with n >= 2")
    vals, traces = [], []
    for n in n_list:
        m, trace = nodes, []
        prev = None
        while True:
            val, _ = _quotient(n, m, amplitude, 12.0 / n)
            trace.append((m, val))
            if prev is not None and abs(val - prev) <= rtol * abs(val):
                break
            if m >= max_nodes:
                raise QuadratureError(f"quadrature did not converge for n={n}", trace)
            prev, m = val, 2 * m
        vals.append(val)
        traces.append(trace)
    if len(n_list) >= 2:
        slope, icpt = np.polyfit(np.log(n_list), np.log(vals), 1)
    else:
        slope, icpt = float("nan"), float("nan")
    return WeylResult(n_list, vals, float(slope), float(np.exp(icpt)), traces)


def support_interval(n: int) -> Tuple[float, float]:
    """q2-range of supp u_n."""
    return (-n * n - n, -n * n + n)


def weyl_potential():
    """The potential the sequence lives on: (q1^2 - q2)^2 - q2^2 = q1^4 - 2 q2 q1^2."""
    return example3(-1.0)

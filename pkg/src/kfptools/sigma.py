"""Gradient-dominated region, its complement, and the assumption checks.

A point q belongs to the region of parameter kappa when

    |grad V(q)|^(4/3) >= kappa * (|Hess V(q)|_F + R3(q)^4 + 1),

with R3 the order->=3 derivative indicator.  Ties count as members.
Boundedness of the complement and the decay condition along it can only
be probed, never certified, by sampling; reports carry the probe radii.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .polynomial import (Polynomial, frobenius, gradient, hessian, r_geq, sigma_sides,
                         split_eigenvalues)

DECAY_THRESHOLD = -0.05


@dataclass(frozen=True)
class SigmaQuery:
    kappa: float
    q: np.ndarray
    member: bool
    lhs: float
    rhs: float


def _check_kappa(kappa: float) -> None:
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")


def sigma_membership(poly: Polynomial, kappa: float, q) -> SigmaQuery:
    _check_kappa(kappa)
    x = poly._points(q)
    lhs, base = sigma_sides(poly, x)
    rhs = kappa * base
    return SigmaQuery(float(kappa), np.array(x, dtype=float), bool(lhs >= rhs),
                      float(lhs), float(rhs))


def membership_ratio(poly: Polynomial, kappa: float, points) -> np.ndarray:
    """lhs / rhs at each point; the point is a member iff the ratio is >= 1."""
    lhs, base = sigma_sides(poly, points)
    return lhs / (kappa * base)


@dataclass(frozen=True)
class SigmaGrid:
    """Full evaluation of both sides on a tensor grid (row-major, last axis fastest)."""

    kappa: float
    axes: List[np.ndarray]
    points: np.ndarray
    member: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray


def sigma_grid(poly: Polynomial, kappa: float, box_radius: float, n: int) -> SigmaGrid:
    _check_kappa(kappa)
    if n < 2:
        raise ValueError("need at least 2 grid points per axis")
    ax = np.linspace(-box_radius, box_radius, n)
    mesh = np.meshgrid(*([ax] * poly.d), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    lhs, base = sigma_sides(poly, pts)
    rhs = kappa * base
    return SigmaGrid(float(kappa), [ax] * poly.d, pts, lhs >= rhs, lhs, rhs)


def sphere_directions(d: int, count: int) -> np.ndarray:
    """Deterministic unit vectors: +-1 (d=1), uniform angles (d=2), Fibonacci lattice (d=3)."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        t = 2 * np.pi * np.arange(count) / count
        u = np.stack([np.cos(t), np.sin(t)], axis=-1)
        u[np.abs(u) < 1e-15] = 0.0
        return u
    if d == 3:
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        phi = np.pi * (1 + 5 ** 0.5) * k
        r = np.sqrt(1 - z * z)
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
    raise ValueError("directions are generated for d <= 3 only")


def _log_ratio(poly, kappa, pts):
    lhs, base = sigma_sides(poly, pts)
    with np.errstate(divide="ignore"):
        return np.log(lhs) - np.log(kappa * base)


def _local_minima(values: np.ndarray, periodic: bool) -> np.ndarray:
    if periodic:
        left, right = np.roll(values, 1, axis=-1), np.roll(values, -1, axis=-1)
    else:
        inf = np.full(values.shape[:-1] + (1,), np.inf)
        left = np.concatenate([inf, values[..., :-1]], axis=-1)
        right = np.concatenate([values[..., 1:], inf], axis=-1)
    return (values <= left) & (values <= right)


def _zoom_angles(poly, kappa, radius, centres, width, levels=14, npts=33, beam=3):
    """Beam search for deep minima of the log ratio on a circle.

    Each level samples ``npts`` angles across every window, keeps the
    ``beam`` lowest local minima per window and shrinks the window around
    them.  Unlike a bracketing line search this does not lock onto the
    wrong valley when two valleys share one coarse cell.
    """
    centres = np.asarray(centres, dtype=float)
    best_t, best_v = [], []
    offs = np.linspace(-1.0, 1.0, npts)
    for _ in range(levels):
        t = centres[:, None] + width * offs[None, :]
        pts = radius * np.stack([np.cos(t), np.sin(t)], axis=-1)
        lr = _log_ratio(poly, kappa, pts)
        lr = np.where(np.isnan(lr), np.inf, lr)
        best_t.append(t.ravel())
        best_v.append(lr.ravel())
        mins = _local_minima(lr, periodic=False)
        keep = []
        for row in range(t.shape[0]):
            idx = np.flatnonzero(mins[row])
            idx = idx[np.argsort(lr[row, idx], kind="stable")][:beam]
            keep.extend(t[row, idx])
        centres = np.unique(np.round(np.asarray(keep), 15))
        width = width * 4.0 / (npts - 1)
        if len(centres) > 64:
            v = _log_ratio(poly, kappa, radius * np.stack([np.cos(centres), np.sin(centres)], -1))
            centres = centres[np.argsort(v, kind="stable")[:64]]
    return np.concatenate(best_t), np.concatenate(best_v)


def complement_on_sphere(poly: Polynomial, kappa: float, radius: float,
                         directions: np.ndarray, refine: int = 8) -> np.ndarray:
    """Complement points found on the sphere |q| = radius.

    Every direction sample is tested.  The deepest local minima of the log
    membership ratio are then refined (beam search in angle for d = 2,
    Nelder-Mead for d = 3) so thin complement strips between samples are
    still detected.
    """
    d = poly.d
    pts = radius * directions
    lr = _log_ratio(poly, kappa, pts)
    found = [pts[lr < 0]]
    if d == 2 and refine > 0:
        m = len(directions)
        ang = np.arctan2(directions[:, 1], directions[:, 0])
        cand = np.flatnonzero(_local_minima(lr, periodic=True))
        cand = cand[np.argsort(lr[cand], kind="stable")][:refine]
        if len(cand):
            t, v = _zoom_angles(poly, kappa, radius, ang[cand], 4 * np.pi / m)
            t = t[v < 0]
            found.append(radius * np.stack([np.cos(t), np.sin(t)], axis=-1))
    elif d >= 3 and refine > 0:
        for i in np.argsort(lr, kind="stable")[:refine]:
            if lr[i] == -np.inf:
                continue

            def f(v):
                val = _log_ratio(poly, kappa, radius * v / np.linalg.norm(v))
                return float(val) if np.isfinite(val) else -1e300

            res = minimize(f, directions[i], method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
            if res.fun < 0:
                found.append(radius * (res.x / np.linalg.norm(res.x))[None, :])
    return np.concatenate(found, axis=0)


@dataclass
class ComplementScan:
    """Grid complement points plus the radial boundedness probe."""

    kappa: float
    box_radius: float
    grid_points: np.ndarray
    probe_radii: np.ndarray
    probe_hits: List[np.ndarray]
    verdict: str  # "bounded", "unbounded" or "inconclusive"

    @property
    def bounded(self) -> bool:
        return self.verdict == "bounded"

    @property
    def probe_points(self) -> np.ndarray:
        if not self.probe_hits:
            return np.zeros((0, self.grid_points.shape[1]))
        return np.concatenate(self.probe_hits, axis=0)

    @property
    def last_hit_radius(self) -> float:
        hit = [r for r, h in zip(self.probe_radii, self.probe_hits) if len(h)]
        return float(max(hit)) if hit else 0.0

    def summary(self) -> dict:
        return {
            "kappa": self.kappa,
            "box_radius": self.box_radius,
            "grid_complement_points": int(len(self.grid_points)),
            "probe_radii": [float(r) for r in self.probe_radii],
            "probe_hits_per_radius": [int(len(h)) for h in self.probe_hits],
            "last_hit_radius": self.last_hit_radius,
            "verdict": self.verdict,
            "label": "probe",
        }


def scan_complement(poly: Polynomial, kappa: float, box_radius: float, grid_per_axis: int = 64,
                    radial_probes: int = 512, far_decades: int = 4, radii_per_decade: int = 6,
                    grid: bool = True) -> ComplementScan:
    """Sample the complement of the region in a box and probe it radially.

    The probe visits spheres with radii log-spaced from box_radius/2 out to
    4*box_radius*10**far_decades.  Verdict ``bounded``: no complement point
    on the spheres of the outermost decade.  ``unbounded``: complement points
    on every sphere.  Anything else is ``inconclusive``.  Far sweeping is
    needed because bounded complements can still reach far beyond the box
    (for (q1^2-q2)^2 + q2^2/2 at kappa = 2 they reach |q| ~ 2e4).
    """
    _check_kappa(kappa)
    if box_radius <= 0:
        raise ValueError("box_radius must be positive")
    if grid and poly.d > 3:
        raise ValueError("grid scanning is limited to d <= 3; use grid=False for ray mode")
    if grid and grid_per_axis < 16:
        raise ValueError("grid_per_axis must be >= 16")
    if radial_probes < 8:
        raise ValueError("radial_probes must be >= 8")
    if grid:
        g = sigma_grid(poly, kappa, box_radius, grid_per_axis)
        comp = g.points[~g.member]
    else:
        comp = np.zeros((0, poly.d))
    dirs = sphere_directions(poly.d, radial_probes) if poly.d <= 3 else _random_directions(poly.d, radial_probes)
    outer = 4 * box_radius * 10.0 ** far_decades
    n = int(round(radii_per_decade * np.log10(outer / (box_radius / 2)))) + 1
    radii = np.geomspace(box_radius / 2, outer, n)
    hits = [complement_on_sphere(poly, kappa, r, dirs) for r in radii]
    counts = np.array([len(h) for h in hits])
    if np.all(counts > 0):
        verdict = "unbounded"
    elif np.all(counts[radii >= outer / 10] == 0):
        verdict = "bounded"
    else:
        verdict = "inconclusive"
    return ComplementScan(float(kappa), float(box_radius), comp, radii, hits, verdict)


def _random_directions(d: int, count: int) -> np.ndarray:
    rng = np.random.default_rng(12345)
    v = rng.standard_normal((count, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass(frozen=True)
class PowerLawFit:
    amplitude: float
    exponent: float
    residual: float
    sample_range: tuple

    def to_dict(self) -> dict:
        return {"amplitude": self.amplitude, "exponent": self.exponent,
                "residual": self.residual, "sample_range": list(self.sample_range)}


def power_law_fit(rho: Sequence[float], f: Sequence[float]) -> PowerLawFit:
    """Ordinary least squares of log f against log rho."""
    rho = np.asarray(rho, dtype=float)
    f = np.asarray(f, dtype=float)
    if rho.shape != f.shape or rho.ndim != 1:
        raise ValueError("rho and f must be 1-d arrays of equal length")
    if len(rho) < 5:
        raise ValueError("power_law_fit needs at least 5 samples")
    if np.any(rho <= 0) or np.any(f <= 0):
        raise ValueError("samples must be strictly positive")
    if np.any(np.diff(rho) <= 0):
        raise ValueError("rho must be strictly increasing")
    x, y = np.log(rho), np.log(f)
    A = np.stack([np.ones_like(x), x], axis=1)
    (c0, slope), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (c0 + slope * x)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return PowerLawFit(float(np.exp(c0)), float(slope), rms, (float(rho[0]), float(rho[-1])))


@dataclass
class AssumptionReport:
    kappa: float
    c1: float
    condition_1_4: bool
    worst_trace_ratio: float
    condition_1_5: bool
    decay_fit: Optional[PowerLawFit]
    decade_halving: Optional[bool]
    complement_bounded: bool
    samples_used: int
    verdict_label: str
    decay_trace: List[tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.condition_1_4 and self.condition_1_5

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "c1": self.c1,
            "condition_1_4": {"pass": self.condition_1_4, "worst_ratio_tr_plus_over_tr_minus":
                              _finite_or_str(self.worst_trace_ratio)},
            "condition_1_5": {"pass": self.condition_1_5,
                              "fit": self.decay_fit.to_dict() if self.decay_fit else None,
                              "decade_halving": self.decade_halving,
                              "trace": [[r, v] for r, v in self.decay_trace]},
            "complement_bounded": self.complement_bounded,
            "boundedness_probe": self.verdict_label,
            "samples_used": self.samples_used,
        }


def _finite_or_str(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def decay_ratio(poly: Polynomial, pts) -> np.ndarray:
    """R3(q)^4 / |Hess V(q)|_F (inf where the Hessian vanishes)."""
    r4 = r_geq(poly, pts, 3) ** 4
    h = frobenius(hessian(poly, pts))
    with np.errstate(divide="ignore"):
        return np.where(h > 0, r4 / np.where(h > 0, h, 1.0), np.inf)


def check_assumption(poly: Polynomial, kappa: float, c1: float = 1.0, box_radius: float = 20.0,
                     grid_per_axis: int = 64, radial_probes: int = 512,
                     fit_radii: Sequence[float] | None = None) -> AssumptionReport:
    """Empirical check of the trace condition and the decay condition on the complement.

    The decay condition is tested on the profile rho -> max of R3^4/|Hess|
    over complement points found on the sphere of radius rho; it passes when
    the fitted log-log slope is below -0.05 and the outer-decade maximum is
    under half the inner-decade maximum.  The default radii (1e5 to 1e9) sit
    far enough out that the constant terms of R3 no longer bias the slope.
    """
    if kappa < 1 or c1 < 1:
        raise ValueError("kappa and c1 must both be >= 1")
    poly.require_nonzero()
    scan = scan_complement(poly, kappa, box_radius, grid_per_axis, radial_probes,
                           grid=poly.d <= 3)
    if fit_radii is None:
        fit_radii = np.geomspace(1e5, 1e9, 17)
    fit_radii = np.asarray(fit_radii, dtype=float)
    dirs = sphere_directions(poly.d, radial_probes) if poly.d <= 3 else _random_directions(poly.d, radial_probes)

    samples = [scan.grid_points, scan.probe_points]
    trace = []
    if not scan.bounded:
        for r in fit_radii:
            hit = complement_on_sphere(poly, kappa, r, dirs)
            if len(hit):
                samples.append(hit)
                trace.append((float(r), float(np.max(decay_ratio(poly, hit)))))
    pts = np.concatenate(samples, axis=0)

    far = pts[np.linalg.norm(pts, axis=1) >= c1] if len(pts) else pts
    worst = 0.0
    ok14 = True
    if len(far):
        eig = np.linalg.eigvalsh(hessian(poly, far))
        tp, tm = split_eigenvalues(eig, frobenius(hessian(poly, far)))
        ok14 = bool(np.all(tm >= tp / c1))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(tp == 0, 0.0, tp / tm)
        worst = float(np.max(ratio))

    if scan.bounded:
        return AssumptionReport(float(kappa), float(c1), ok14, worst, True, None, None, True,
                                int(len(pts)), scan.verdict)
    if len(trace) < 5 or not all(math.isfinite(v) and v > 0 for _, v in trace):
        return AssumptionReport(float(kappa), float(c1), ok14, worst, False, None, None, False,
                                int(len(pts)), scan.verdict, trace)
    rho = np.array([t[0] for t in trace])
    val = np.array([t[1] for t in trace])
    fit = power_law_fit(rho, val)
    inner = val[rho <= rho[0] * 10].max()
    outer = val[rho >= rho[-1] / 10].max()
    halving = bool(outer < 0.5 * inner)
    ok15 = bool(fit.exponent < DECAY_THRESHOLD and halving)
    return AssumptionReport(float(kappa), float(c1), ok14, worst, ok15, fit, halving, False,
                            int(len(pts)), scan.verdict, trace)


@dataclass
class CoercivityReport:
    delta: float
    radii: np.ndarray
    min_values: np.ndarray
    grows: bool
    eta: dict

    def to_dict(self) -> dict:
        return {"delta": self.delta, "radii": self.radii.tolist(),
                "min_f_delta": self.min_values.tolist(), "grows": self.grows,
                "eta": {repr(k): v for k, v in self.eta.items()}}


def f_delta(poly: Polynomial, delta: float, pts) -> np.ndarray:
    """|grad V|^(4(1-delta)/3) + |Hess V|_F^(1-delta)."""
    g = np.sqrt(np.sum(gradient(poly, pts) ** 2, axis=-1))
    h = frobenius(hessian(poly, pts))
    return g ** (4 * (1 - delta) / 3) + h ** (1 - delta)


def coercivity_witness(poly: Polynomial, delta: float, directions=64,
                       radii: Sequence[float] | None = None,
                       thresholds: Sequence[float] = ()) -> CoercivityReport:
    """Minimum of f_delta over ray directions at each radius of a schedule.

    ``grows`` requires the minima to be nondecreasing over the outer half of
    the schedule and the last minimum to be at least twice the first one.
    ``eta[A]`` is the smallest tested radius from which the minimum stays >= A.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if isinstance(directions, (int, np.integer)):
        directions = sphere_directions(poly.d, int(directions)) if poly.d <= 3 \
            else _random_directions(poly.d, int(directions))
    directions = np.asarray(directions, dtype=float)
    radii = np.geomspace(1, 100, 24) if radii is None else np.asarray(radii, dtype=float)
    pts = radii[:, None, None] * directions[None, :, :]
    mins = f_delta(poly, delta, pts).min(axis=1)
    tail = mins[len(mins) // 2:]
    grows = bool(np.all(np.diff(tail) >= -1e-12 * np.abs(tail[1:])) and mins[-1] >= 2 * mins[0])
    eta = {}
    for A in thresholds:
        ok = mins >= A
        idx = None
        for i in range(len(ok) - 1, -1, -1):
            if not ok[i]:
                break
            idx = i
        eta[float(A)] = None if idx is None else float(radii[idx])
    return CoercivityReport(float(delta), radii, mins, grows, eta)

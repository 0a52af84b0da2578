"""Slow-metric coverings, partitions of unity and local quadratic models.

The metric g = R3(q)^2 dq^2 (R3 the order->=3 derivative indicator) is
slowly varying, so balls of radius a/R3(q_j) can be glued into a locally
finite partition of unity sum_j psi_j^2 = 1.  On each ball V is compared
with its second-order Taylor polynomial at a base point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .polynomial import (Polynomial, alpha_factorial, eval_derivative, frobenius, gradient,
                         hessian, multi_indices, r_geq, sigma_sides, split_eigenvalues,
                         EIG_ZERO_RTOL)

SMOOTHSTEP = (10.0, -15.0, 6.0)  # coefficients of x^3, x^4, x^5


class SlowMetricError(ValueError):
    """Raised when the requested ball size violates the slow-metric condition."""


# ---------------------------------------------------------------------------
# slow metric probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlowMetricReport:
    n: int
    trial_pairs: int
    seed: int
    C: float
    C_prime: Optional[float]
    ladder: Tuple[float, ...]
    max_ratio: Tuple[float, ...]
    max_ratio_prime: Tuple[float, ...]

    def to_dict(self) -> dict:
        return {"n": self.n, "trial_pairs": self.trial_pairs, "seed": self.seed, "C": self.C,
                "C_prime": self.C_prime, "ladder": list(self.ladder),
                "max_ratio": list(self.max_ratio), "max_ratio_prime": list(self.max_ratio_prime)}


def _sample_bases(rng, d, count, box):
    half = count // 2
    uni = rng.uniform(-box, box, size=(half, d))
    v = rng.standard_normal((count - half, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rad = 10.0 ** rng.uniform(-2, 4, size=(count - half, 1))
    return np.concatenate([uni, rad * v], axis=0)


def _sample_offsets(rng, d, count):
    """Unit-ball offsets; half of them on the boundary sphere, where ratios peak."""
    v = rng.standard_normal((count, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    t = rng.uniform(0, 1, size=(count, 1)) ** (1.0 / d)
    t[: count // 2] = 1.0
    return v * t


def slow_metric_probe(poly: Polynomial, n: int = 3, trial_pairs: int = 4000, seed: int = 0,
                      box: float = 10.0) -> SlowMetricReport:
    """Empirical slowness constant of g^n = R^{>=n}(q)^2 dq^2.

    Pairs (q, q') with R(q)|q - q'| <= 1/C are drawn for each C of a ladder
    (ratio 2^(1/8) between rungs); the reported C is the first rung where
    max (R(q)/R(q'))^{+-1} <= C.  C' is the same for the ratio of R^{>=n-1}
    under the g^n-sized steps (n >= 2 only).
    """
    poly.require_nonzero()
    if not 1 <= n <= poly.degree:
        raise ValueError(f"n must lie in 1..{poly.degree}")
    if trial_pairs < 1000:
        raise ValueError("trial_pairs must be >= 1000")
    rng = np.random.default_rng(seed)
    d = poly.d
    q = _sample_bases(rng, d, trial_pairs, box)
    u = _sample_offsets(rng, d, trial_pairs)
    rq = r_geq(poly, q, n)
    if np.any(rq <= 0):
        raise ValueError("all derivatives of order >= n vanish; the metric is degenerate")
    rq_prev = r_geq(poly, q, n - 1) if n >= 2 else None
    ladder = 2.0 ** (np.arange(0, 81) / 8.0)
    C = Cp = None
    ratios, ratios_p = [], []
    for c in ladder:
        qq = q + u / (c * rq[:, None])
        r2 = r_geq(poly, qq, n)
        m = float(np.max(np.maximum(rq / r2, r2 / rq)))
        ratios.append(m)
        if C is None and m <= c:
            C = float(c)
        if rq_prev is not None:
            p2 = r_geq(poly, qq, n - 1)
            mp = float(np.max(np.maximum(rq_prev / p2, p2 / rq_prev)))
            ratios_p.append(mp)
            if Cp is None and mp <= c:
                Cp = float(c)
        if C is not None and (rq_prev is None or Cp is not None):
            break
    if C is None:
        raise RuntimeError("slowness constant exceeds the probe ladder")
    return SlowMetricReport(n, trial_pairs, seed, C, Cp, tuple(float(x) for x in ladder[:len(ratios)]),
                            tuple(ratios), tuple(ratios_p))


# ---------------------------------------------------------------------------
# bump and partition
# ---------------------------------------------------------------------------

def theta(s, inner: float):
    """C^2 bump: 1 on [0, inner], quintic smoothstep down to 0 at 1, 0 beyond.

    Returns (theta, theta', theta'') with derivatives taken in s.
    """
    s = np.asarray(s, dtype=float)
    w = 1.0 - inner
    x = np.clip((1.0 - s) / w, 0.0, 1.0)
    c3, c4, c5 = SMOOTHSTEP
    val = x ** 3 * (c3 + x * (c4 + x * c5))
    dx = 3 * c3 * x ** 2 + 4 * c4 * x ** 3 + 5 * c5 * x ** 4
    ddx = 6 * c3 * x + 12 * c4 * x ** 2 + 20 * c5 * x ** 3
    ramp = (s > inner) & (s < 1.0)
    d1 = np.where(ramp, -dx / w, 0.0)
    d2 = np.where(ramp, ddx / w ** 2, 0.0)
    return val, d1, d2


@dataclass
class CutoffValues:
    """Values of the nonzero cutoffs at a batch of points (CSR layout).

    Row i owns entries indptr[i]:indptr[i+1]; ``index`` holds centre ids.
    """

    indptr: np.ndarray
    index: np.ndarray
    value: np.ndarray
    grad: Optional[np.ndarray] = None
    hess: Optional[np.ndarray] = None

    def dense(self, m: int) -> np.ndarray:
        out = np.zeros((len(self.indptr) - 1, m))
        rows = np.repeat(np.arange(len(self.indptr) - 1), np.diff(self.indptr))
        out[rows, self.index] = self.value
        return out

    def dense_grad(self, m: int) -> np.ndarray:
        d = self.grad.shape[1]
        out = np.zeros((len(self.indptr) - 1, m, d))
        rows = np.repeat(np.arange(len(self.indptr) - 1), np.diff(self.indptr))
        out[rows, self.index] = self.grad
        return out

    def row_sum(self, x: np.ndarray) -> np.ndarray:
        return np.add.reduceat(x, self.indptr[:-1], axis=0) if len(x) else np.zeros(len(self.indptr) - 1)


@dataclass
class PartitionSpec:
    """Greedy ball covering of a box with normalised cutoffs psi_j."""

    centers: np.ndarray
    radii: np.ndarray
    a: float
    b: float
    box_lo: np.ndarray
    box_hi: np.ndarray
    grid_per_axis: int
    slow_constant: float
    cover_threshold: float
    _tree: cKDTree = field(init=False, repr=False)

    def __post_init__(self):
        self._tree = cKDTree(self.centers)

    @property
    def d(self) -> int:
        return self.centers.shape[1]

    @property
    def m(self) -> int:
        return len(self.centers)

    @property
    def inner_factor(self) -> float:
        return self.b / self.a

    @property
    def overlap_bound(self) -> int:
        """Theorem-B style bound (4C^3 + 1)^d on the number of overlapping balls."""
        return int(math.floor((4 * self.slow_constant ** 3 + 1) ** self.d))

    def _neighbours(self, x: np.ndarray):
        lists = self._tree.query_ball_point(x, float(self.radii.max()))
        counts = np.fromiter((len(l) for l in lists), dtype=np.int64, count=len(lists))
        idx = np.fromiter((j for l in lists for j in sorted(l)), dtype=np.int64, count=int(counts.sum()))
        rows = np.repeat(np.arange(len(x)), counts)
        diff = x[rows] - self.centers[idx]
        dist = np.linalg.norm(diff, axis=1)
        keep = dist < self.radii[idx]
        rows, idx, diff, dist = rows[keep], idx[keep], diff[keep], dist[keep]
        indptr = np.zeros(len(x) + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return np.cumsum(indptr), idx, diff, dist

    def phi(self, x, derivatives: int = 0) -> CutoffValues:
        """Unnormalised bumps phi_j(x) = theta(|x - q_j| / r_j)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        indptr, idx, diff, dist = self._neighbours(x)
        inv_r = 1.0 / self.radii[idx]
        t, t1, t2 = theta(dist * inv_r, self.inner_factor)
        out = CutoffValues(indptr, idx, t)
        if derivatives >= 1:
            safe = np.where(dist > 0, dist, 1.0)
            nvec = diff / safe[:, None]
            out.grad = (t1 * inv_r)[:, None] * nvec
            if derivatives >= 2:
                eye = np.eye(self.d)
                nn = nvec[:, :, None] * nvec[:, None, :]
                out.hess = ((t2 * inv_r ** 2)[:, None, None] * nn
                            + (t1 * inv_r / safe)[:, None, None] * (eye - nn))
        return out

    def psi(self, x, derivatives: int = 0) -> CutoffValues:
        """Normalised cutoffs psi_j = phi_j / sqrt(sum_k phi_k^2) and their derivatives."""
        ph = self.phi(x, derivatives)
        rows = np.repeat(np.arange(len(ph.indptr) - 1), np.diff(ph.indptr))
        S = ph.row_sum(ph.value ** 2)
        if np.any(S <= 0):
            raise ValueError("point outside the covered box")
        T = S ** -0.5
        out = CutoffValues(ph.indptr, ph.index, ph.value * T[rows])
        if derivatives >= 1:
            gS = 2 * ph.row_sum(ph.value[:, None] * ph.grad)
            gT = -0.5 * (S ** -1.5)[:, None] * gS
            out.grad = ph.grad * T[rows, None] + ph.value[:, None] * gT[rows]
            if derivatives >= 2:
                hS = 2 * ph.row_sum(ph.grad[:, :, None] * ph.grad[:, None, :]
                                    + ph.value[:, None, None] * ph.hess)
                hT = (0.75 * (S ** -2.5)[:, None, None] * gS[:, :, None] * gS[:, None, :]
                      - 0.5 * (S ** -1.5)[:, None, None] * hS)
                out.hess = (ph.hess * T[rows, None, None]
                            + ph.grad[:, :, None] * gT[rows][:, None, :]
                            + gT[rows][:, :, None] * ph.grad[:, None, :]
                            + ph.value[:, None, None] * hT[rows])
        return out

    def overlap(self, x) -> np.ndarray:
        ph = self.phi(x)
        return np.add.reduceat((ph.value > 0).astype(int), ph.indptr[:-1]) if len(ph.value) \
            else np.zeros(len(ph.indptr) - 1, dtype=int)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "centers": self.centers.tolist(),
            "radii": self.radii.tolist(),
            "a": self.a,
            "b": self.b,
            "box": [self.box_lo.tolist(), self.box_hi.tolist()],
            "grid_per_axis": self.grid_per_axis,
            "slow_constant": self.slow_constant,
            "overlap_bound": self.overlap_bound,
            "cover_threshold": self.cover_threshold,
            "theta": {"kind": "quintic smoothstep", "knots": [self.inner_factor, 1.0],
                      "coefficients_x3_x4_x5": list(SMOOTHSTEP)},
        }


def _box(box, d):
    arr = np.asarray(box, dtype=float)
    if arr.ndim == 0:
        lo, hi = -np.full(d, float(arr)), np.full(d, float(arr))
    else:
        arr = arr.reshape(2, -1) if arr.size == 2 * d else arr
        lo, hi = np.broadcast_to(arr[0], (d,)).astype(float), np.broadcast_to(arr[1], (d,)).astype(float)
    if np.any(hi <= lo):
        raise ValueError("empty box")
    return lo, hi


def _next_uncovered(flat: np.ndarray, pos: int, chunk: int = 4096) -> int:
    while pos < flat.size:
        window = flat[pos:pos + chunk]
        if not window.all():
            return pos + int(np.argmin(window))
        pos += chunk
    return -1


def build_partition(poly: Polynomial, box, a: Optional[float] = None, b: Optional[float] = None,
                    grid_per_axis: Optional[int] = None, slow_constant: Optional[float] = None,
                    seed: int = 0) -> PartitionSpec:
    """Greedy covering of ``box`` by balls B(q_j, a/R3(q_j)) plus cutoffs.

    ``box`` is a half-width (for [-L, L]^d) or a pair (lo, hi).  The grid is
    scanned in lexicographic order; a grid point counts as covered once it
    sits inside (1 + b/a)/2 times some radius, so every box point has a bump
    value of at least 1/2 nearby.  Defaults: a = 1/(2C), b = a/2 with C from
    ``slow_metric_probe``; the grid spacing defaults to a quarter of the
    smallest radius.
    """
    poly.require_nonzero()
    if poly.degree <= 2:
        raise ValueError("degree <= 2 needs no localization")
    d = poly.d
    lo, hi = _box(box, d)
    if slow_constant is None:
        slow_constant = slow_metric_probe(poly, 3, seed=seed).C
    C = float(slow_constant)
    a = 1.0 / (2 * C) if a is None else float(a)
    b = a / 2 if b is None else float(b)
    if not 0 < b < a:
        raise ValueError("need 0 < b < a")
    if a > 1.0 / C:
        raise SlowMetricError(f"a = {a:g} exceeds 1/C = {1.0 / C:g} (slow-metric condition)")

    if grid_per_axis is None:
        coarse = np.stack(np.meshgrid(*[np.linspace(l, h, 65) for l, h in zip(lo, hi)],
                                      indexing="ij"), -1).reshape(-1, d)
        r_min = a / float(np.max(r_geq(poly, coarse, 3)))
        grid_per_axis = int(math.ceil(float(np.max(hi - lo)) / (r_min / 4))) + 1
    if grid_per_axis < 2:
        raise ValueError("grid_per_axis must be >= 2")
    axes = [np.linspace(l, h, grid_per_axis) for l, h in zip(lo, hi)]
    step = (hi - lo) / (grid_per_axis - 1)
    shape = (grid_per_axis,) * d
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1)
    R = r_geq(poly, mesh.reshape(-1, d), 3).reshape(shape)
    covered = np.zeros(shape, dtype=bool)
    flat = covered.reshape(-1)
    tau = 0.5 * (1.0 + b / a)

    centers, radii = [], []
    pos = 0
    while True:
        pos = _next_uncovered(flat, pos)
        if pos < 0:
            break
        ij = np.unravel_index(pos, shape)
        c = mesh[ij]
        r = a / float(R[ij])
        centers.append(c)
        radii.append(r)
        reach = tau * r
        lo_i = [max(0, int(math.floor((c[k] - reach - lo[k]) / step[k]))) for k in range(d)]
        hi_i = [min(grid_per_axis, int(math.ceil((c[k] + reach - lo[k]) / step[k])) + 1) for k in range(d)]
        sl = tuple(slice(l, h) for l, h in zip(lo_i, hi_i))
        sub = mesh[sl]
        covered[sl] |= np.linalg.norm(sub - c, axis=-1) <= reach
    return PartitionSpec(np.array(centers), np.array(radii), a, b, lo, hi, grid_per_axis, C, tau)


@dataclass(frozen=True)
class PartitionCheck:
    samples: int
    max_sum_defect: float
    max_overlap: int
    overlap_bound: int
    gradient_constant: float
    inner_ball_defect: float

    @property
    def passed(self) -> bool:
        return self.max_sum_defect <= 1e-10 and self.max_overlap <= self.overlap_bound

    def to_dict(self) -> dict:
        return {"samples": self.samples, "max_sum_defect": self.max_sum_defect,
                "max_overlap": self.max_overlap, "overlap_bound": self.overlap_bound,
                "gradient_constant": self.gradient_constant,
                "inner_ball_defect": self.inner_ball_defect, "pass": self.passed}


def check_partition(poly: Polynomial, part: PartitionSpec, samples: int = 10_000,
                    seed: int = 0) -> PartitionCheck:
    """Sampled checks: sum psi^2 = 1, overlap count, and the gradient constant.

    ``gradient_constant`` is max over samples of sum_j |grad psi_j|^2 / R3^2.
    ``inner_ball_defect`` is max |phi_j - 1| on the inner balls (phi_j, not
    psi_j: normalisation by overlapping neighbours moves psi_j off 1).
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(part.box_lo, part.box_hi, size=(samples, part.d))
    ps = part.psi(x, derivatives=1)
    total = ps.row_sum(ps.value ** 2)
    g2 = ps.row_sum(np.sum(ps.grad ** 2, axis=1))
    c = float(np.max(g2 / r_geq(poly, x, 3) ** 2))
    ov = part.overlap(x)
    # inner-ball probe: one random point per centre inside its inner ball
    v = rng.standard_normal((part.m, part.d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    inner = part.centers + v * (rng.uniform(0, 1, (part.m, 1)) * part.inner_factor * part.radii[:, None])
    ph = part.phi(inner)
    rows = np.repeat(np.arange(part.m), np.diff(ph.indptr))
    own = ph.index == rows
    inner_defect = float(np.max(np.abs(ph.value[own] - 1.0)))
    return PartitionCheck(samples, float(np.max(np.abs(total - 1.0))), int(ov.max()),
                          part.overlap_bound, c, inner_defect)


# ---------------------------------------------------------------------------
# quadratic models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticModel:
    base: np.ndarray
    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    polynomial: Polynomial
    tr_plus: float
    tr_minus: float
    min_gradient: float
    t_j: float
    A_const: float
    B_const: float
    in_J_kappa: Optional[bool] = None

    def to_dict(self) -> dict:
        return {"base": self.base.tolist(), "value": self.value,
                "gradient": self.gradient.tolist(), "hessian": self.hessian.tolist(),
                "tr_plus": self.tr_plus, "tr_minus": self.tr_minus,
                "min_gradient": self.min_gradient, "t_j": self.t_j,
                "A_const": self.A_const, "B_const": self.B_const, "in_J_kappa": self.in_J_kappa}


def min_quadratic_gradient(g: np.ndarray, H: np.ndarray) -> float:
    """min over q of |g + H (q - base)|: the part of g in ker H (H symmetric)."""
    eig, vec = np.linalg.eigh(H)
    scale = max(float(frobenius(H)), 1.0) if np.any(H) else 1.0
    null = vec[:, np.abs(eig) <= EIG_ZERO_RTOL * scale]
    return float(np.linalg.norm(null.T @ g))


def taylor_quadratic(poly: Polynomial, base, in_J_kappa: Optional[bool] = None) -> QuadraticModel:
    x0 = poly._points(base)
    if x0.ndim != 1:
        raise ValueError("base must be a single point")
    d = poly.d
    v0 = float(poly(x0))
    g = gradient(poly, x0)
    H = hessian(poly, x0)
    xs = [Polynomial.variable(i, d) - float(x0[i]) for i in range(d)]
    model = Polynomial.constant(v0, d)
    for i in range(d):
        model = model + float(g[i]) * xs[i]
        for k in range(d):
            model = model + 0.5 * float(H[i, k]) * xs[i] * xs[k]
    fro = float(frobenius(H))
    tp, tm = split_eigenvalues(np.linalg.eigvalsh(H), fro)
    tp, tm = float(tp), float(tm)
    mg = min_quadratic_gradient(g, H)
    A = max((1 + tp) ** (2.0 / 3.0), 1 + tm)
    B = max(mg ** (4.0 / 3.0), (1 + tm) / math.log(2 + tm) ** 2)
    t_j = 2.0 * (1.0 + fro ** 2) ** 0.125
    return QuadraticModel(x0.copy(), v0, g, H, model, tp, tm, mg, t_j, A, B, in_J_kappa)


def remainder_constant(alpha_order: int, d: int, r: int, a: float) -> float:
    """c_{alpha,d,r} = sum over 3 <= |beta| <= r of beta! a^(|alpha| - |beta|)."""
    return float(sum(alpha_factorial(beta) * a ** (alpha_order - sum(beta))
                     for beta in multi_indices(d, 3, r)))


@dataclass(frozen=True)
class RemainderReport:
    base: np.ndarray
    a: float
    radius: float
    samples: int
    constants: Dict[int, float]
    max_ratio: Dict[str, float]

    @property
    def worst(self) -> float:
        return max(self.max_ratio.values()) if self.max_ratio else 0.0

    @property
    def passed(self) -> bool:
        return self.worst <= 1.0

    def to_dict(self) -> dict:
        return {"base": self.base.tolist(), "a": self.a, "radius": self.radius,
                "samples": self.samples, "constants": {str(k): v for k, v in self.constants.items()},
                "max_ratio": self.max_ratio, "worst": self.worst, "pass": self.passed}


def _ball_samples(rng, center, radius, count):
    d = len(center)
    v = rng.standard_normal((count, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return center + v * (radius * rng.uniform(0, 1, (count, 1)) ** (1.0 / d))


def remainder_check(poly: Polynomial, model: QuadraticModel, a: float, samples: int = 10_000,
                    seed: int = 0, radius: Optional[float] = None) -> RemainderReport:
    """Sampled check of |d^alpha V - d^alpha V_j2| <= c_alpha R3(base)^|alpha| for |alpha| in {1, 2}."""
    base = model.base
    r3 = float(r_geq(poly, base, 3))
    if radius is None:
        radius = a / r3 if r3 > 0 else 1.0
    rng = np.random.default_rng(seed)
    x = _ball_samples(rng, base, radius, samples)
    consts, worst = {}, {}
    for k in (1, 2):
        consts[k] = remainder_constant(k, poly.d, max(poly.degree, 3), a)
        bound = consts[k] * r3 ** k
        for alpha in multi_indices(poly.d, k, k):
            diff = np.abs(eval_derivative(poly, alpha, x) - eval_derivative(model.polynomial, alpha, x))
            top = float(np.max(diff))
            if bound > 0:
                ratio = top / bound
            else:
                ratio = 0.0 if top <= 1e-12 else math.inf
            worst["".join(map(str, alpha))] = ratio
    return RemainderReport(base.copy(), float(a), float(radius), samples, consts, worst)


def compare_with_model(poly: Polynomial, model: QuadraticModel, radius: float, samples: int = 2000,
                       seed: int = 0) -> dict:
    """Ranges of |grad V|/|grad V_j2| and |Hess V|_F/|Hess V_j2|_F over a ball around the base."""
    rng = np.random.default_rng(seed)
    x = _ball_samples(rng, model.base, radius, samples)
    gv = np.linalg.norm(gradient(poly, x), axis=1)
    gm = np.linalg.norm(gradient(model.polynomial, x), axis=1)
    hv = frobenius(hessian(poly, x))
    hm = float(frobenius(model.hessian))
    with np.errstate(divide="ignore", invalid="ignore"):
        gr = gv / gm
        hr = hv / hm
    return {"radius": float(radius), "samples": samples,
            "gradient_ratio": [float(np.min(gr)), float(np.max(gr))],
            "hessian_ratio": [float(np.min(hr)), float(np.max(hr))]}


def localize_models(poly: Polynomial, part: PartitionSpec, kappa: float) -> List[QuadraticModel]:
    """One quadratic model per ball, with base q'_j chosen as follows.

    If every partition-grid node in the ball lies in the region of parameter
    kappa, q'_j = q_j and j is in J(kappa); otherwise q'_j is the complement
    node of smallest grid index inside the ball.
    """
    d = part.d
    axes = [np.linspace(l, h, part.grid_per_axis) for l, h in zip(part.box_lo, part.box_hi)]
    step = (part.box_hi - part.box_lo) / (part.grid_per_axis - 1)
    out = []
    for c, r in zip(part.centers, part.radii):
        lo_i = [max(0, int(math.floor((c[k] - r - part.box_lo[k]) / step[k]))) for k in range(d)]
        hi_i = [min(part.grid_per_axis, int(math.ceil((c[k] + r - part.box_lo[k]) / step[k])) + 1)
                for k in range(d)]
        sub = np.stack(np.meshgrid(*[ax[l:h] for ax, l, h in zip(axes, lo_i, hi_i)], indexing="ij"),
                       -1).reshape(-1, d)
        sub = sub[np.linalg.norm(sub - c, axis=1) <= r]
        lhs, base = sigma_sides(poly, sub)
        outside = sub[lhs < kappa * base]
        if len(outside):
            out.append(taylor_quadratic(poly, outside[0], in_J_kappa=False))
        else:
            out.append(taylor_quadratic(poly, c, in_J_kappa=True))
    return out

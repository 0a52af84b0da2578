"""Sparse multivariate polynomials and pointwise derivative analytics.

A :class:`Polynomial` maps exponent tuples to coefficients.  Coefficients
may be ``int``, ``float`` or :class:`fractions.Fraction`; derivatives are
formed with integer falling factorials, so exact coefficients stay exact.
Evaluation is vectorised over the trailing axis of a point array.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Real
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

MultiIndex = Tuple[int, ...]

# eigenvalues below this fraction of |H|_F are treated as exactly zero
EIG_ZERO_RTOL = 1e-12
SYMMETRY_RTOL = 1e-12


class PolynomialFormatError(ValueError):
    """Raised when a polynomial document cannot be parsed."""


class DimensionError(ValueError):
    """Point dimension does not match the polynomial."""


@lru_cache(maxsize=None)
def multi_indices(d: int, lo: int, hi: int) -> Tuple[MultiIndex, ...]:
    """All multi-indices alpha in N^d with lo <= |alpha| <= hi, graded lex order."""
    out = []
    for k in range(max(lo, 0), hi + 1):
        for combo in itertools.combinations_with_replacement(range(d), k):
            alpha = [0] * d
            for i in combo:
                alpha[i] += 1
            out.append(tuple(alpha))
    return tuple(out)


def multinomial(alpha: Sequence[int]) -> int:
    """Number of ordered derivative sequences realising ``alpha``: |alpha|!/alpha!."""
    n = math.factorial(sum(alpha))
    for a in alpha:
        n //= math.factorial(a)
    return n


def alpha_factorial(alpha: Sequence[int]) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def _falling(n: int, k: int) -> int:
    # n (n-1) ... (n-k+1)
    out = 1
    for j in range(k):
        out *= n - j
    return out


def _clean_coefficient(c):
    if isinstance(c, (bool, np.bool_)):
        raise TypeError("boolean coefficient")
    if isinstance(c, (int, Fraction)):
        return c
    if isinstance(c, np.integer):
        return int(c)
    if isinstance(c, Real):
        c = float(c)
        if not math.isfinite(c):
            raise ValueError("non-finite coefficient")
        return c
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


class Polynomial:
    """Real polynomial in ``d`` variables stored as ``{alpha: coefficient}``.

    Instances are immutable.  Zero coefficients are dropped on construction;
    the zero polynomial is representable (degree ``-1``) because derivatives
    of high order produce it, but analysis entry points reject it.
    """

    __slots__ = ("_d", "_terms", "_degree", "_dcache")

    def __init__(self, d: int, terms: Mapping[Sequence[int], object] | Iterable = ()):
        if int(d) != d or d < 1:
            raise ValueError(f"dimension must be a positive integer, got {d!r}")
        d = int(d)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[MultiIndex, object] = {}
        for alpha, c in items:
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != d:
                raise DimensionError(f"exponent {alpha} has length {len(alpha)}, expected {d}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            c = _clean_coefficient(c)
            acc[alpha] = acc.get(alpha, 0) + c
        clean = {a: c for a, c in acc.items() if c != 0}
        self._d = d
        self._terms = MappingProxyType(dict(sorted(clean.items())))
        self._degree = max((sum(a) for a in clean), default=-1)
        self._dcache: Dict[MultiIndex, Polynomial] = {}

    # -- construction helpers -------------------------------------------------
    @classmethod
    def variable(cls, i: int, d: int) -> "Polynomial":
        alpha = [0] * d
        alpha[i] = 1
        return cls(d, {tuple(alpha): 1})

    @classmethod
    def constant(cls, c, d: int) -> "Polynomial":
        return cls(d, {(0,) * d: c})

    @classmethod
    def variables(cls, d: int) -> Tuple["Polynomial", ...]:
        return tuple(cls.variable(i, d) for i in range(d))

    # -- basic properties -----------------------------------------------------
    @property
    def d(self) -> int:
        return self._d

    @property
    def terms(self) -> Mapping[MultiIndex, object]:
        return self._terms

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def require_nonzero(self) -> "Polynomial":
        if self.is_zero:
            raise ValueError("zero polynomial rejected")
        return self

    def __repr__(self) -> str:
        if self.is_zero:
            return f"Polynomial(d={self._d}, 0)"
        parts = []
        for alpha, c in self._terms.items():
            mono = "*".join(f"q{i + 1}^{a}" if a > 1 else f"q{i + 1}"
                            for i, a in enumerate(alpha) if a)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"Polynomial(d={self._d}, " + " + ".join(parts) + ")"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._d == other._d and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash((self._d, tuple(self._terms.items())))

    # -- arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other._d != self._d:
                raise DimensionError("polynomials live in different dimensions")
            return other
        return Polynomial.constant(other, self._d)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for a, c in other._terms.items():
            terms[a] = terms.get(a, 0) + c
        return Polynomial(self._d, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self._d, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms: Dict[MultiIndex, object] = {}
        for (a, c), (b, e) in itertools.product(self._terms.items(), other._terms.items()):
            k = tuple(x + y for x, y in zip(a, b))
            terms[k] = terms.get(k, 0) + c * e
        return Polynomial(self._d, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only non-negative integer powers")
        out = Polynomial.constant(1, self._d)
        for _ in range(int(n)):
            out = out * self
        return out

    # -- calculus ---------------------------------------------------------------
    def derivative(self, alpha: Sequence[int]) -> "Polynomial":
        """The polynomial d^alpha V, computed term by term (cached)."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self._d:
            raise DimensionError(f"multi-index {alpha} does not match d={self._d}")
        if any(a < 0 for a in alpha):
            raise ValueError("negative derivative order")
        hit = self._dcache.get(alpha)
        if hit is not None:
            return hit
        terms = {}
        if sum(alpha) <= self._degree:
            for beta, c in self._terms.items():
                if all(b >= a for a, b in zip(alpha, beta)):
                    factor = math.prod(_falling(b, a) for a, b in zip(alpha, beta))
                    terms[tuple(b - a for a, b in zip(alpha, beta))] = c * factor
        out = Polynomial(self._d, terms)
        self._dcache[alpha] = out
        return out

    def _points(self, q) -> np.ndarray:
        x = np.asarray(q, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self._d:
            raise DimensionError(f"point dimension {x.shape[-1] if x.ndim else 0} != d={self._d}")
        return x

    def __call__(self, q) -> np.ndarray | float:
        x = self._points(q)
        out = np.zeros(x.shape[:-1])
        for alpha, c in self._terms.items():
            mono = np.full(x.shape[:-1], float(c))
            for i, a in enumerate(alpha):
                if a:
                    mono = mono * x[..., i] ** a
            out = out + mono
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict:
        return {"d": self._d,
                "terms": [{"alpha": list(a), "c": float(c)} for a, c in self._terms.items()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Polynomial":
        try:
            d = doc["d"]
            terms = [(t["alpha"], t["c"]) for t in doc["terms"]]
        except (KeyError, TypeError) as exc:
            raise PolynomialFormatError(f"malformed polynomial document: missing {exc}") from exc
        if not isinstance(d, int) or isinstance(d, bool):
            raise PolynomialFormatError("'d' must be an integer")
        try:
            return cls(d, terms)
        except (TypeError, ValueError) as exc:
            raise PolynomialFormatError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "Polynomial":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PolynomialFormatError(
                f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(doc)


def load_polynomial(path) -> Polynomial:
    with open(path, encoding="utf-8") as fh:
        return Polynomial.from_json(fh.read())


# ---------------------------------------------------------------------------
# pointwise analytics (all vectorised over leading axes of q)
# ---------------------------------------------------------------------------

def eval_derivative(poly: Polynomial, alpha: Sequence[int], q):
    """Value of d^alpha V at q.  Orders above the degree give exactly 0."""
    return poly.derivative(alpha)(q)


def gradient(poly: Polynomial, q) -> np.ndarray:
    x = poly._points(q)
    d = poly.d
    g = np.empty(x.shape[:-1] + (d,))
    for i in range(d):
        e = [0] * d
        e[i] = 1
        g[..., i] = poly.derivative(e)(x)
    return g


def hessian(poly: Polynomial, q) -> np.ndarray:
    x = poly._points(q)
    d = poly.d
    h = np.empty(x.shape[:-1] + (d, d))
    for i in range(d):
        for j in range(i, d):
            e = [0] * d
            e[i] += 1
            e[j] += 1
            v = poly.derivative(e)(x)
            h[..., i, j] = v
            h[..., j, i] = v
    return h


def laplacian(poly: Polynomial, q) -> np.ndarray:
    return np.trace(hessian(poly, q), axis1=-2, axis2=-1)


def frobenius(h: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(h) ** 2, axis=(-2, -1)))


def _nonzero_derivatives(poly: Polynomial, lo: int, hi: int):
    return [(a, poly.derivative(a)) for a in multi_indices(poly.d, lo, hi)
            if not poly.derivative(a).is_zero]


def r_geq(poly: Polynomial, q, n: int, convention: str = "distinct"):
    """Derivative-scale indicator: sum over n <= |alpha| <= r of |d^alpha V(q)|^(1/|alpha|).

    ``convention="distinct"`` sums once per multi-index; ``"ordered"`` weights
    each multi-index by the number of orderings |alpha|!/alpha! of the
    underlying partial derivatives.
    """
    if n < 1:
        raise ValueError("n must be >= 1 (|alpha| = 0 has no root)")
    if convention not in ("distinct", "ordered"):
        raise ValueError(f"unknown convention {convention!r}")
    x = poly._points(q)
    out = np.zeros(x.shape[:-1])
    for alpha, dp in _nonzero_derivatives(poly, n, poly.degree):
        k = sum(alpha)
        w = 1 if convention == "distinct" else multinomial(alpha)
        out = out + w * np.abs(dp(x)) ** (1.0 / k)
    return float(out) if out.ndim == 0 else out


def r_eq(poly: Polynomial, q, n: int, convention: str = "distinct"):
    """Sum over |alpha| = n of |d^alpha V(q)|^(1/n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = poly._points(q)
    out = np.zeros(x.shape[:-1])
    for alpha, dp in _nonzero_derivatives(poly, n, n):
        w = 1 if convention == "distinct" else multinomial(alpha)
        out = out + w * np.abs(dp(x)) ** (1.0 / n)
    return float(out) if out.ndim == 0 else out


def log_weight(s):
    """L(s) = (s + 1) / log(s + 1) for s >= 1."""
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 1) or np.any(~np.isfinite(arr)):
        raise ValueError("log_weight is defined for s >= 1")
    out = (arr + 1.0) / np.log(arr + 1.0)
    return float(out) if out.ndim == 0 else out


def _check_symmetric(h: np.ndarray) -> None:
    scale = np.sqrt(np.sum(h * h, axis=(-2, -1)))
    asym = np.sqrt(np.sum((h - np.swapaxes(h, -1, -2)) ** 2, axis=(-2, -1)))
    if np.any(asym > SYMMETRY_RTOL * scale):
        raise ValueError("matrix is not symmetric")


def split_eigenvalues(eig: np.ndarray, fro: np.ndarray):
    """Tr+ and Tr- from eigenvalues; tiny eigenvalues count as zero (hence in Tr-)."""
    eig = np.where(np.abs(eig) <= EIG_ZERO_RTOL * np.asarray(fro)[..., None], 0.0, eig)
    tr_plus = np.sum(np.where(eig > 0, eig, 0.0), axis=-1)
    tr_minus = -np.sum(np.where(eig <= 0, eig, 0.0), axis=-1)
    return tr_plus, tr_minus + 0.0


def hessian_trace_split(h) -> Tuple[float, float]:
    """(Tr+, Tr-) of a symmetric matrix: sum of positive eigenvalues, minus sum of the rest."""
    h = np.asarray(h, dtype=float)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise ValueError("square matrix expected")
    _check_symmetric(h)
    eig = np.linalg.eigvalsh(h)
    tp, tm = split_eigenvalues(eig, frobenius(h))
    if np.ndim(tp) == 0:
        return float(tp), float(tm)
    return tp, tm


@dataclass(frozen=True)
class PointAnalysis:
    """Every derivative-derived scalar of V at one point."""

    q: np.ndarray
    gradient: np.ndarray
    gradient_norm: float
    hessian: np.ndarray
    hessian_frobenius: float
    eigenvalues: np.ndarray
    tr_plus: float
    tr_minus: float
    r_geq: Dict[int, float]
    r_eq: Dict[int, float]
    sigma_member: Dict[float, bool] = field(default_factory=dict)
    r_geq_ordered: Dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "q": self.q.tolist(),
            "gradient": self.gradient.tolist(),
            "gradient_norm": self.gradient_norm,
            "hessian": self.hessian.tolist(),
            "hessian_frobenius": self.hessian_frobenius,
            "eigenvalues": self.eigenvalues.tolist(),
            "tr_plus": self.tr_plus,
            "tr_minus": self.tr_minus,
            "r_geq": {str(k): v for k, v in self.r_geq.items()},
            "r_eq": {str(k): v for k, v in self.r_eq.items()},
            "r_geq_ordered": {str(k): v for k, v in self.r_geq_ordered.items()},
            "sigma_member": {repr(k): v for k, v in self.sigma_member.items()},
        }


def sigma_sides(poly: Polynomial, q):
    """(|grad V|^(4/3), |Hess V|_F + R^{>=3}^4 + 1) at q, vectorised."""
    x = poly._points(q)
    lhs = np.sqrt(np.sum(gradient(poly, x) ** 2, axis=-1)) ** (4.0 / 3.0)
    base = frobenius(hessian(poly, x)) + r_geq(poly, x, 3) ** 4 + 1.0
    return lhs, base


def analyze_point(poly: Polynomial, q, kappa_list: Sequence[float] = ()) -> PointAnalysis:
    poly.require_nonzero()
    x = poly._points(q)
    if x.ndim != 1:
        raise DimensionError("analyze_point takes a single point")
    g = gradient(poly, x)
    h = hessian(poly, x)
    fro = float(frobenius(h))
    eig = np.linalg.eigvalsh(h)
    tp, tm = split_eigenvalues(eig, fro)
    r = max(poly.degree, 0)
    rg = {n: float(r_geq(poly, x, n)) for n in range(1, r + 1)}
    re = {n: float(r_eq(poly, x, n)) for n in range(1, r + 1)}
    ro = {n: float(r_geq(poly, x, n, "ordered")) for n in range(1, r + 1)}
    members = {}
    if kappa_list:
        lhs, base = sigma_sides(poly, x)
        for k in kappa_list:
            if k <= 0:
                raise ValueError("kappa must be positive")
            members[float(k)] = bool(lhs >= k * base)
    return PointAnalysis(
        q=x.copy(), gradient=g, gradient_norm=float(np.linalg.norm(g)), hessian=h,
        hessian_frobenius=fro, eigenvalues=np.sort(eig), tr_plus=float(tp),
        tr_minus=float(tm), r_geq=rg, r_eq=re, sigma_member=members, r_geq_ordered=ro)

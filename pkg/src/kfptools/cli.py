"""Command-line entry point.

Exit status: 0 when every asserted check passes, 2 when a check fails,
1 for usage or input errors.  Every successful run writes manifest.json
into the output directory.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .localization import SlowMetricError, build_partition, check_partition
from .polynomial import (DimensionError, Polynomial, PolynomialFormatError, analyze_point,
                         load_polynomial)
from .reporting import emit_contour, write_json, write_manifest
from .sigma import check_assumption, scan_complement, sigma_grid
from .spectral.estimates import subelliptic_stability
from .spectral.grid import BudgetError, DiscreteGrid
from .spectral.ims import TrivialPartition, TwoBumpPartition, ims_refinement
from .spectral.lanczos import LanczosConvergenceError, low_spectrum
from .spectral.operators import assemble_witten
from .spectral.weyl import QuadratureError, weyl_rayleigh

COMMANDS = ("analyze", "sigma-scan", "check-assumption", "partition", "ims-check",
            "subelliptic", "weyl", "witten-spectrum")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _points(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kfptools", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kfptools {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, potential_required=True):
        p.add_argument("--potential", required=potential_required, help="polynomial JSON file")
        p.add_argument("--kappa", type=float, default=None)
        p.add_argument("--c1", type=float, default=1.0)
        p.add_argument("--box", type=float, default=None, help="half-width of the q box")
        p.add_argument("--nq", type=int, default=None)
        p.add_argument("--np", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="kfptools-out")
        return p

    p = common(sub.add_parser("analyze", help="pointwise derivative analytics"))
    p.add_argument("--point", type=_points, action="append", required=True)
    p = common(sub.add_parser("sigma-scan", help="region grid, contour CSV and boundedness probe"))
    p.add_argument("--probes", type=int, default=512)
    p = common(sub.add_parser("check-assumption", help="empirical check of conditions (1.4), (1.5)"))
    p.add_argument("--probes", type=int, default=512)
    p = common(sub.add_parser("partition", help="ball covering and partition of unity"))
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--samples", type=int, default=10_000)
    p = common(sub.add_parser("ims-check", help="IMS localisation identity refinement study"))
    p.add_argument("--partition", choices=("two-bump", "trivial", "balls"), default="two-bump")
    p.add_argument("--fd-order", type=int, choices=(2, 4), default=4)
    p.add_argument("--trials", type=int, default=6)
    p = common(sub.add_parser("subelliptic", help="discrete constant of the subelliptic estimate"))
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--factor", type=float, default=1.5)
    p = common(sub.add_parser("weyl", help="Rayleigh quotients of the Weyl sequence"),
               potential_required=False)
    p.add_argument("--n-list", type=_ints, default=[4, 8, 16, 32])
    p = common(sub.add_parser("witten-spectrum", help="low eigenvalues of the Witten Laplacian"))
    p.add_argument("--k", type=int, default=3)
    return parser


def _default(value, fallback):
    return fallback if value is None else value


Result = Tuple[List[Path], bool, dict]


def _analyze(a, poly, out) -> Result:
    kappas = [_default(a.kappa, 2.0)]
    docs = [analyze_point(poly, np.array(pt), kappas).to_dict() for pt in a.point]
    return [write_json(out / "analysis.json", {"points": docs})], True, {"points": len(docs)}


def _sigma_scan(a, poly, out) -> Result:
    kappa, box, n = _default(a.kappa, 2.0), _default(a.box, 10.0), _default(a.nq, 64)
    scan = scan_complement(poly, kappa, box, n, a.probes)
    arts = [write_json(out / "scan.json", scan.summary())]
    if poly.d == 2:
        arts.append(emit_contour(sigma_grid(poly, kappa, box, n), out / "contour.csv"))
    return arts, True, {"verdict": scan.verdict}


def _check_assumption(a, poly, out) -> Result:
    rep = check_assumption(poly, _default(a.kappa, 800.0), a.c1, _default(a.box, 20.0),
                           _default(a.nq, 64), a.probes)
    return [write_json(out / "assumption.json", rep.to_dict())], rep.passed, \
        {"condition_1_4": rep.condition_1_4, "condition_1_5": rep.condition_1_5}


def _partition(a, poly, out) -> Result:
    part = build_partition(poly, _default(a.box, 3.0), a.a, a.b, a.nq, seed=a.seed)
    chk = check_partition(poly, part, a.samples, a.seed)
    arts = [write_json(out / "partition.json", part.to_dict()),
            write_json(out / "partition_check.json", chk.to_dict())]
    return arts, chk.passed, {"centers": part.m, "max_sum_defect": chk.max_sum_defect}


def _ims(a, poly, out) -> Result:
    Lq, nq, np_ = _default(a.box, 6.0), _default(a.nq, 64), _default(a.np, 8)
    if a.partition == "trivial":
        part = TrivialPartition(poly.d)
    elif a.partition == "two-bump":
        part = TwoBumpPartition(poly.d, 0.0, Lq / 3)
    else:
        part = build_partition(poly, Lq, seed=a.seed)
    study = ims_refinement(poly, Lq, np_, [nq, 2 * nq, 4 * nq], part, a.trials, a.seed, a.fd_order)
    if a.partition == "trivial":
        ok = max(study.defects) == 0.0
    else:
        ok = min(study.orders) >= a.fd_order - 0.3
    doc = {**study.to_dict(), "partition": a.partition, "trials": a.trials, "seed": a.seed, "pass": ok}
    return [write_json(out / "ims.json", doc)], ok, {"orders": study.orders}


def _subelliptic(a, poly, out) -> Result:
    grid = DiscreteGrid(_default(a.box, 8.0), _default(a.nq, 64 if poly.d == 1 else 32),
                        _default(a.np, 12 if poly.d == 1 else 8), poly.d)
    rep = subelliptic_stability(poly, grid, a.factor, trials=a.trials, seed=a.seed,
                                kappa=_default(a.kappa, 2.0))
    growth = rep.refinement[-1]["growth"]
    ok = bool(np.isfinite(rep.C) and growth <= 1.5)
    return [write_json(out / "estimate.json", rep.to_dict())], ok, {"C": rep.C, "growth": growth}


def _weyl(a, poly, out) -> Result:
    try:
        res = weyl_rayleigh(-1.0, a.n_list)
    except QuadratureError as exc:
        write_json(out / "weyl.json", {"error": str(exc), "trace": exc.trace})
        return [out / "weyl.json"], False, {"error": str(exc)}
    ok = -2.3 <= res.exponent <= -1.7
    return [write_json(out / "weyl.json", res.to_dict())], ok, {"exponent": res.exponent}


def _witten(a, poly, out) -> Result:
    grid = DiscreteGrid(_default(a.box, 10.0), _default(a.nq, 256 if poly.d == 1 else 48),
                        _default(a.np, 4), poly.d)
    op = assemble_witten(poly, grid)
    mtx = out / "witten.mtx"
    op.write_matrix_market(mtx)
    try:
        res = low_spectrum(op, a.k, seed=a.seed)
    except LanczosConvergenceError as exc:
        doc = {"error": str(exc), "iterations": exc.iterations, "grid": grid.to_dict()}
        return [write_json(out / "spectrum.json", doc), mtx], False, {"error": str(exc)}
    doc = dict(res.to_dict(), grid=grid.to_dict())
    return [write_json(out / "spectrum.json", doc), mtx], True, {"eigenvalues": res.values.tolist()}


HANDLERS: Dict[str, Callable] = {
    "analyze": _analyze, "sigma-scan": _sigma_scan, "check-assumption": _check_assumption,
    "partition": _partition, "ims-check": _ims, "subelliptic": _subelliptic, "weyl": _weyl,
    "witten-spectrum": _witten,
}


def _config(a, poly: Optional[Polynomial]) -> dict:
    cfg = {k: v for k, v in sorted(vars(a).items()) if k not in ("out", "potential")}
    cfg["potential_sha256"] = None if poly is None else \
        hashlib.sha256(poly.to_json().encode("utf-8")).hexdigest()
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        print(f"kfptools: error: {exc}", file=sys.stderr)
        return 1
    try:
        poly = None
        if a.potential is not None:
            try:
                poly = load_polynomial(a.potential)
            except OSError as exc:
                raise UsageError(f"cannot read potential file: {exc}") from None
            poly.require_nonzero()
        if poly is None and a.command != "weyl":
            raise UsageError("--potential is required")
        out = Path(a.out)
        out.mkdir(parents=True, exist_ok=True)
        arts, ok, summary = HANDLERS[a.command](a, poly, out)
    except PolynomialFormatError as exc:
        print(f"kfptools: input error: {exc}", file=sys.stderr)
        return 1
    except BudgetError as exc:
        print(f"kfptools: budget error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, DimensionError, SlowMetricError, ValueError) as exc:
        print(f"kfptools: error: {exc}", file=sys.stderr)
        return 1
    code = 0 if ok else 2
    write_manifest(out, _config(a, poly), a.seed, arts, "pass" if ok else "fail", code)
    print(f"{a.command}: {'pass' if ok else 'FAIL'} {summary}")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Acceptance criteria 1 to 10.

Each criterion writes its evidence as JSON (and, where relevant, matrix
files) into a run directory, prints a PASS/FAIL line and asserts its
runtime limit.  Criterion 10 reruns 1 to 9 into a fresh directory and
compares every artifact byte for byte.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from kfptools.localization import build_partition, check_partition, remainder_check, taylor_quadratic
from kfptools.polynomial import analyze_point
from kfptools.potentials import example1, example2, example3, harmonic, quartic
from kfptools.reporting import write_json
from kfptools.sigma import check_assumption, scan_complement
from kfptools.spectral import DiscreteGrid, assemble_witten, low_spectrum
from kfptools.spectral.estimates import subelliptic_stability
from kfptools.spectral.ims import TrivialPartition, TwoBumpPartition, ims_refinement
from kfptools.spectral.weyl import weyl_rayleigh

RESULTS = []


def report(number, ok, seconds, limit, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({seconds:.2f} s, limit {limit} s) {detail}"
    print(line)
    RESULTS.append(line)


# -- criterion bodies: each writes artifacts into ``out`` and returns (ok, detail)

def crit1(out: Path):
    rng = np.random.default_rng(1)
    pts = rng.uniform(-10, 10, size=(100, 2))
    worst_g = worst_h = 0.0
    rows = []
    for q in pts:
        pa = analyze_point(example1(), q)
        q1, q2 = q
        g = 2 * abs(q1 * q2) * math.hypot(q1, q2)
        h = 2 * math.sqrt((q1 * q1 + q2 * q2) ** 2 + 6 * q1 * q1 * q2 * q2)
        eg = abs(pa.gradient_norm - g) / g
        eh = abs(pa.hessian_frobenius - h) / h
        worst_g, worst_h = max(worst_g, eg), max(worst_h, eh)
        rows.append({"q": q.tolist(), "gradient_norm": pa.gradient_norm, "closed_form": g,
                     "hessian_frobenius": pa.hessian_frobenius, "closed_form_hessian": h})
    ok = worst_g <= 1e-10 and worst_h <= 1e-10
    write_json(out / "c1_example1.json", {"points": rows, "max_rel_error_gradient": worst_g,
                                          "max_rel_error_hessian": worst_h, "pass": ok})
    return ok, f"rel err grad {worst_g:.1e}, hess {worst_h:.1e}"


def crit2(out: Path):
    cases = {"example1": (example1(), True), "example2_n1": (example2(1), True),
             "example2_n2": (example2(2), False), "example2_n3": (example2(3), False)}
    doc, ok, parts = {}, True, []
    for name, (poly, should_pass) in cases.items():
        rep = check_assumption(poly, 800.0, 1.0)
        a = rep.decay_fit.exponent
        doc[name] = rep.to_dict()
        if should_pass:
            good = rep.passed and abs(a + 2 / 3) <= 0.1
        else:
            good = not rep.condition_1_5 and a >= -0.05
        if name == "example2_n3":
            good = good and a >= 0.2
        ok = ok and good
        parts.append(f"{name} {a:+.3f}")
    write_json(out / "c2_assumption.json", doc)
    return ok, ", ".join(parts)


def crit3(out: Path):
    doc, ok, parts = {}, True, []
    for eps, want in ((0.5, "bounded"), (1.0, "bounded"), (-0.5, "bounded"), (0.0, "unbounded")):
        scan = scan_complement(example3(eps), 2.0, 20.0)
        doc[repr(eps)] = scan.summary()
        ok = ok and scan.verdict == want
        parts.append(f"eps={eps} {scan.verdict}")
    write_json(out / "c3_boundedness.json", doc)
    return ok, ", ".join(parts)


def crit4(out: Path):
    poly = example1()
    p1 = build_partition(poly, 3.0, a=0.25, b=0.125)
    c1 = check_partition(poly, p1, 10_000, 0)
    p2 = build_partition(poly, 3.0, a=0.25, b=0.125, grid_per_axis=2 * p1.grid_per_axis - 1)
    c2 = check_partition(poly, p2, 10_000, 0)
    drift = abs(c2.gradient_constant - c1.gradient_constant) / c1.gradient_constant
    ok = c1.passed and c2.passed and drift <= 0.2
    write_json(out / "c4_partition.json", {"grid": c1.to_dict(), "doubled_grid": c2.to_dict(),
                                           "centers": [p1.m, p2.m], "gradient_constant_drift": drift,
                                           "slow_constant": p1.slow_constant, "pass": ok})
    return ok, (f"defect {max(c1.max_sum_defect, c2.max_sum_defect):.1e}, overlap "
                f"{max(c1.max_overlap, c2.max_overlap)} <= {p1.overlap_bound}, "
                f"c {c1.gradient_constant:.0f} -> {c2.gradient_constant:.0f} ({100 * drift:.1f}%)")


def _bases():
    """A 5x5 lattice on [-2, 2]^2 plus four far points; each base carries the ball a / R3(base)."""
    ax = np.linspace(-2.0, 2.0, 5)
    lattice = np.stack(np.meshgrid(ax, ax, indexing="ij"), -1).reshape(-1, 2)
    far = np.array([[10.0, -7.0], [100.0, 50.0], [0.0, 40.0], [-300.0, 2.0]])
    return np.concatenate([lattice, far])


def crit5(out: Path):
    cases = {"example1": example1(), "example2_n1": example2(1), "example2_n2": example2(2),
             "example2_n3": example2(3), "example3_eps0.5": example3(0.5),
             "example3_eps0": example3(0.0), "example3_eps-1": example3(-1.0)}
    doc, worst, balls = {}, 0.0, 0
    for name, poly in cases.items():
        reps = []
        for i, base in enumerate(_bases()):
            rep = remainder_check(poly, taylor_quadratic(poly, base), 0.25, 10_000, seed=i)
            reps.append(rep.to_dict())
            worst = max(worst, rep.worst)
            balls += 1
        doc[name] = reps
    ok = worst <= 1.0
    write_json(out / "c5_remainder.json", {"cases": doc, "worst_ratio": worst, "pass": ok})
    return ok, f"{balls} balls x 1e4 samples, worst ratio {worst:.2e}"


def crit6(out: Path):
    nq = [64, 128, 256]
    two = TwoBumpPartition(1, 0.0, 2.0)
    second = ims_refinement(quartic(1), 6.0, 8, nq, two, 6, 0, fd_order=2)
    fourth = ims_refinement(quartic(1), 6.0, 8, nq, two, 6, 0, fd_order=4)
    trivial = ims_refinement(quartic(1), 6.0, 8, nq, TrivialPartition(1), 6, 0, fd_order=2)
    ok = all(abs(o - 2) <= 0.3 for o in second.orders) and max(trivial.defects) == 0.0
    write_json(out / "c6_ims.json", {"second_order_stencil": second.to_dict(),
                                     "fourth_order_stencil": fourth.to_dict(),
                                     "trivial": trivial.to_dict(), "pass": ok})
    return ok, (f"orders {[round(o, 3) for o in second.orders]} (FD2), "
                f"{[round(o, 3) for o in fourth.orders]} (FD4), trivial defect {max(trivial.defects)}")


def crit7(out: Path):
    op = assemble_witten(harmonic(1), DiscreteGrid(10.0, 256, 4))
    res = low_spectrum(op, 3, seed=0)
    err = float(np.max(np.abs(res.values - [0.0, 2.0, 4.0])))
    ok = err <= 1e-3
    op.write_matrix_market(out / "c7_witten.mtx")
    write_json(out / "c7_witten.json", dict(res.to_dict(), max_error=err, **{"pass": ok}))
    return ok, f"eigenvalues {np.round(res.values, 6).tolist()}, max error {err:.1e}"


def crit8(out: Path):
    res = weyl_rayleigh(-1.0, (4, 8, 16, 32))
    ok = -2.3 <= res.exponent <= -1.7
    write_json(out / "c8_weyl.json", dict(res.to_dict(), **{"pass": ok}))
    return ok, f"exponent {res.exponent:.4f}"


def crit9(out: Path):
    h = subelliptic_stability(harmonic(1), DiscreteGrid(8.0, 64, 12, 1), 1.5, trials=8, seed=0)
    e = subelliptic_stability(example1(), DiscreteGrid(5.0, 32, 8, 2), 1.5, trials=8, seed=0)
    gh, ge = h.refinement[-1]["growth"], e.refinement[-1]["growth"]
    ok = all(math.isfinite(r.C) for r in (h, e)) and gh <= 1.5 and ge <= 1.5
    write_json(out / "c9_subelliptic.json", {"harmonic": h.to_dict(), "example1": e.to_dict(), "pass": ok})
    return ok, f"harmonic C {h.C:.3f} growth {gh:.3f}, example1 C {e.C:.3f} growth {ge:.3f}"


CRITERIA = {1: (crit1, 1), 2: (crit2, 30), 3: (crit3, 30), 4: (crit4, 60), 5: (crit5, 60),
            6: (crit6, 120), 7: (crit7, 30), 8: (crit8, 120), 9: (crit9, 600)}


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance_run1")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, run_dir):
    fn, limit = CRITERIA[number]
    t0 = time.perf_counter()
    ok, detail = fn(run_dir)
    dt = time.perf_counter() - t0
    report(number, ok and dt < limit, dt, limit, detail)
    assert ok, detail
    assert dt < limit, f"runtime {dt:.1f} s exceeds {limit} s"


def test_criterion_10_determinism(run_dir, tmp_path_factory):
    t0 = time.perf_counter()
    first = run_dir
    if not any(first.iterdir()):
        for fn, _ in CRITERIA.values():
            fn(first)
    second = tmp_path_factory.mktemp("acceptance_run2")
    for fn, _ in CRITERIA.values():
        fn(second)
    names = sorted(p.name for p in first.iterdir())
    same = names == sorted(p.name for p in second.iterdir())
    diff = [n for n in names if (first / n).read_bytes() != (second / n).read_bytes()]
    ok = same and not diff and len(names) >= 9
    report(10, ok, time.perf_counter() - t0, "-", f"{len(names)} artifacts compared, differing: {diff}")
    assert ok

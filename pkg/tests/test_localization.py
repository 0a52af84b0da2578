import math

import numpy as np
import pytest

from kfptools.localization import (SlowMetricError, build_partition, check_partition,
                                   compare_with_model, remainder_check, remainder_constant,
                                   slow_metric_probe, taylor_quadratic, theta)
from kfptools.polynomial import Polynomial, eval_derivative, gradient, hessian, r_geq
from kfptools.potentials import example1, example2, example3, harmonic, quartic


def test_theta_shape_and_derivatives():
    s = np.linspace(0, 1.2, 2001)
    v, d1, d2 = theta(s, 0.5)
    assert np.all(v[s <= 0.5] == 1.0) and np.all(v[s >= 1.0] == 0.0)
    assert np.all(np.diff(v) <= 0)
    h = s[1] - s[0]
    np.testing.assert_allclose(np.gradient(v, h)[5:-5], d1[5:-5], atol=2e-2)
    # C^2: first and second derivatives vanish at both knots
    _, a1, a2 = theta(np.array([0.5, 1.0]), 0.5)
    assert np.all(a1 == 0) and np.all(a2 == 0)


def test_slow_metric_quartic_oracle():
    p = Polynomial(1, {(4,): 1.0})
    rep = slow_metric_probe(p, 3, 4000)
    C = rep.C
    q = np.linspace(-50, 50, 20001)[:, None]
    r = r_geq(p, q, 3)
    np.testing.assert_allclose(r, np.abs(24 * q[:, 0]) ** (1 / 3) + 24 ** 0.25, rtol=1e-13)
    # dense 1-d oracle: every step of size <= 1/(C R(q)) keeps the ratio below 2
    for frac in (-1, -0.5, 0.5, 1):
        qq = q + frac / (C * r[:, None])
        ratio = r / r_geq(p, qq, 3)
        assert np.all(np.maximum(ratio, 1 / ratio) <= 2.0)


def test_slow_metric_example1_stable():
    c1 = slow_metric_probe(example1(), 3, 4000).C
    c2 = slow_metric_probe(example1(), 3, 8000).C
    assert abs(c2 - c1) <= 0.1 * c1


def test_slow_metric_errors():
    with pytest.raises(ValueError):
        slow_metric_probe(example1(), 5)
    with pytest.raises(ValueError):
        slow_metric_probe(example1(), 3, 500)
    # a linear V has no derivatives of order >= 2, so n = 2 is out of range
    with pytest.raises(ValueError):
        slow_metric_probe(Polynomial(2, {(1, 0): 1.0, (0, 0): 2.0}), 2)
    with pytest.raises(ValueError):
        slow_metric_probe(example1(), 0)


def test_partition_rejects_quadratic_and_large_a():
    with pytest.raises(ValueError, match="degree <= 2 needs no localization"):
        build_partition(harmonic(2), 3.0)
    with pytest.raises(SlowMetricError):
        build_partition(example1(), 3.0, a=0.9, b=0.4)
    with pytest.raises(ValueError):
        build_partition(example1(), 3.0, a=0.25, b=0.3)


def test_partition_small_box():
    part = build_partition(example1(), 1.0, a=0.25, b=0.125)
    chk = check_partition(example1(), part, 4000)
    assert chk.max_sum_defect <= 1e-10
    assert chk.max_overlap <= part.overlap_bound
    assert chk.inner_ball_defect == 0.0
    # every grid point is covered by some ball
    ax = np.linspace(-1, 1, part.grid_per_axis)
    grid = np.stack(np.meshgrid(ax, ax, indexing="ij"), -1).reshape(-1, 2)
    assert np.all(part.overlap(grid) >= 1)


def test_partition_single_centre():
    # quartic in 1-d: R3 >= 24^(1/4) ~ 2.2, so a tiny box sits inside one inner ball
    part = build_partition(quartic(1), 0.005, a=0.25, b=0.2)
    assert part.m == 1
    x = np.linspace(-0.005, 0.005, 101)[:, None]
    ps = part.psi(x)
    np.testing.assert_array_equal(ps.value, 1.0)


def test_psi_gradient_matches_finite_difference():
    part = build_partition(example1(), 1.0, a=0.25, b=0.125)
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.9, 0.9, size=(40, 2))
    h = 1e-6
    ps = part.psi(x, derivatives=1)
    G = ps.dense_grad(part.m)
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        fd = (part.psi(x + e).dense(part.m) - part.psi(x - e).dense(part.m)) / (2 * h)
        np.testing.assert_allclose(G[:, :, k], fd, atol=1e-4 * max(1.0, np.abs(G).max()))


def test_taylor_examples():
    m = taylor_quadratic(harmonic(1), (0.0,))
    assert (m.tr_plus, m.tr_minus, m.min_gradient) == (1.0, 0.0, 0.0)
    assert m.A_const == pytest.approx(2 ** (2 / 3))
    assert m.B_const == pytest.approx(1 / math.log(2) ** 2, rel=1e-12)
    assert m.B_const == pytest.approx(2.0814, abs=1e-4)

    m = taylor_quadratic(example1(), (1.0, 1.0))
    np.testing.assert_array_equal(m.gradient, [-2.0, -2.0])
    np.testing.assert_array_equal(m.hessian, [[-2.0, -4.0], [-4.0, -2.0]])
    assert m.min_gradient == 0.0 and m.tr_minus == 6.0
    assert m.B_const == pytest.approx(7 / math.log(8) ** 2, rel=1e-12)
    assert m.B_const == pytest.approx(1.6188, abs=1e-4)
    assert m.t_j == pytest.approx(2 * (1 + 40) ** 0.125)


def test_taylor_linear_potential():
    lin = Polynomial(2, {(1, 0): 3.0, (0, 1): -4.0})
    m = taylor_quadratic(lin, (7.0, -2.0))
    assert m.min_gradient == pytest.approx(5.0)
    assert m.B_const == pytest.approx(max(5 ** (4 / 3), 1 / math.log(2) ** 2))


def test_taylor_model_is_exact_at_base(rng):
    for p in (example1(), example2(2), example3(0.5)):
        base = rng.normal(size=2) * 3
        m = taylor_quadratic(p, base)
        assert m.polynomial(base) == pytest.approx(p(base), rel=1e-13, abs=1e-13)
        np.testing.assert_allclose(gradient(m.polynomial, base), gradient(p, base), rtol=1e-13, atol=1e-12)
        np.testing.assert_allclose(hessian(m.polynomial, base), hessian(p, base), rtol=1e-13, atol=1e-12)
        assert m.t_j >= 2 and m.A_const >= 1


def test_remainder_constant_formula():
    # d=1, r=4: beta in {3, 4}: 3! a^(k-3) + 4! a^(k-4)
    a = 0.25
    assert remainder_constant(1, 1, 4, a) == pytest.approx(6 * a ** -2 + 24 * a ** -3)


def test_remainder_quadratic_is_zero():
    m = taylor_quadratic(harmonic(2), (1.0, 2.0))
    rep = remainder_check(harmonic(2), m, 0.25, 500)
    assert rep.worst == 0.0


def test_remainder_example1():
    m = taylor_quadratic(example1(), (1.0, 1.0))
    rep = remainder_check(example1(), m, 0.25, 10_000)
    assert rep.passed and rep.worst <= 1.0


def test_gradient_comparison_deep_inside_region():
    p = example1()
    base = np.array([60.0, 60.0])
    m = taylor_quadratic(p, base)
    rad = 0.25 / float(r_geq(p, base, 3))
    cmp = compare_with_model(p, m, rad, 4000)
    lo, hi = cmp["gradient_ratio"]
    assert 0.5 <= lo and hi <= 2.0


def test_hessian_comparison_outside_region():
    p = example1()
    base = np.array([0.0, 80.0])  # on the axis, outside the region
    m = taylor_quadratic(p, base)
    rad = 0.25 / float(r_geq(p, base, 3))
    cmp = compare_with_model(p, m, rad, 4000)
    lo, hi = cmp["hessian_ratio"]
    assert 0.5 <= lo and hi <= 2.0

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kfptools.polynomial import Polynomial, gradient
from kfptools.potentials import example1, example3
from kfptools.sigma import (check_assumption, coercivity_witness, power_law_fit, scan_complement,
                            sigma_grid, sigma_membership, sphere_directions)


def test_membership_examples():
    assert not sigma_membership(example1(), 800, (0.0, 5.0)).member
    sq = sigma_membership(example1(), 800, (100.0, 100.0))
    assert sq.member and sq.lhs >= sq.rhs


def test_membership_small_kappa():
    sq = sigma_membership(example3(0.5), 1e-9, (3.0, 1.0))
    assert sq.member


def test_membership_tie_counts_as_member():
    # V = q: lhs = 1^(4/3) = 1 and rhs = 1 * (0 + 0 + 1), both exact
    p = Polynomial(1, {(1,): 1.0})
    sq = sigma_membership(p, 1.0, (0.3,))
    assert sq.lhs == sq.rhs and sq.member


def test_membership_errors():
    with pytest.raises(ValueError):
        sigma_membership(example1(), 0.0, (1.0, 1.0))
    with pytest.raises(ValueError):
        sigma_membership(example1(), 1.0, (1.0,))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 50), st.floats(0.01, 50), st.floats(-30, 30), st.floats(-30, 30))
def test_membership_monotone_in_kappa(k1, k2, x, y):
    lo, hi = sorted((k1, k2))
    if sigma_membership(example1(), hi, (x, y)).member:
        assert sigma_membership(example1(), lo, (x, y)).member


def test_diagonal_scaling_membership():
    kappa = 800.0
    t = 1.0
    while not sigma_membership(example1(), kappa, (t, t)).member:
        t *= 1.1
    for k in range(5):
        assert sigma_membership(example1(), kappa, (t * 2 ** k, t * 2 ** k)).member


def test_parabola_has_zero_gradient():
    p = example3(0.0)
    t = np.linspace(-100, 100, 41)
    g = gradient(p, np.stack([t, t * t], axis=1))
    assert np.all(g == 0.0)


def test_scan_example1_unbounded():
    scan = scan_complement(example1(), 800, 10, 32, 64, far_decades=2)
    assert scan.verdict == "unbounded"
    assert scan.summary()["label"] == "probe"


def test_scan_validation():
    with pytest.raises(ValueError):
        scan_complement(example1(), 2, 10, grid_per_axis=8)
    with pytest.raises(ValueError):
        scan_complement(Polynomial(4, {(1, 1, 1, 1): 1.0}), 2, 10)
    ray = scan_complement(Polynomial(4, {(2, 0, 0, 0): 1.0, (0, 0, 0, 4): 1.0}), 2, 10,
                          radial_probes=16, far_decades=0, radii_per_decade=2, grid=False)
    assert len(ray.grid_points) == 0


def test_sphere_directions_deterministic():
    for d in (1, 2, 3):
        a, b = sphere_directions(d, 64), sphere_directions(d, 64)
        assert np.array_equal(a, b)
        np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0)


def test_sigma_grid_minimal():
    g = sigma_grid(example3(0.5), 2, 1.0, 2)
    assert len(g.points) == 4
    np.testing.assert_array_equal(g.member, g.lhs >= g.rhs)


def test_power_law_exact_and_constant():
    rho = np.array([1, 2, 4, 8, 16.0])
    fit = power_law_fit(rho, 5 * rho ** -2)
    assert fit.exponent == pytest.approx(-2, abs=1e-10)
    assert fit.amplitude == pytest.approx(5, rel=1e-10)
    assert fit.residual < 1e-12
    flat = power_law_fit(rho, np.full(5, 3.0))
    assert flat.exponent == pytest.approx(0, abs=1e-12)
    assert flat.amplitude == pytest.approx(3.0)


def test_power_law_corrected_and_noisy(rng):
    rho = np.geomspace(10, 1e4, 20)
    assert power_law_fit(rho, rho ** (-2 / 3) * (1 + 1 / rho)).exponent == pytest.approx(-2 / 3, abs=0.05)
    noisy = 7 * rho ** 1.5 * (1 + 0.01 * rng.uniform(-1, 1, rho.size))
    assert power_law_fit(rho, noisy).exponent == pytest.approx(1.5, abs=0.05)


def test_power_law_errors():
    with pytest.raises(ValueError):
        power_law_fit([1, 2, 3, 4], [1, 1, 1, 1])
    with pytest.raises(ValueError):
        power_law_fit([1, 2, 3, 4, 5], [1, 1, 0, 1, 1])
    with pytest.raises(ValueError):
        power_law_fit([1, 3, 2, 4, 5], [1, 1, 1, 1, 1])


def test_check_assumption_preconditions():
    with pytest.raises(ValueError):
        check_assumption(example1(), 0.5)
    with pytest.raises(ValueError):
        check_assumption(example1(), 800, c1=0.5)


def test_check_assumption_bounded_complement_is_vacuous_for_decay():
    rep = check_assumption(example3(1.0), 2, c1=1e4, box_radius=20, grid_per_axis=32, radial_probes=128)
    assert rep.complement_bounded
    assert rep.condition_1_5
    assert rep.to_dict()["boundedness_probe"] == "bounded"


def test_coercivity_examples():
    rep = coercivity_witness(example1(), 0.5, 64, np.geomspace(1, 100, 12), thresholds=[5.0])
    assert rep.grows
    # on the q2 axis grad V = 0 and |Hess|_F = 2 q2^2, so f = sqrt(2) |q|
    axis = rep.min_values[-1]
    assert axis == pytest.approx(np.sqrt(2) * 100, rel=1e-9)
    assert rep.eta[5.0] is not None
    quad = coercivity_witness(Polynomial(2, {(2, 0): 1.0, (0, 2): 1.0}), 0.5)
    assert quad.grows
    lin = coercivity_witness(Polynomial(2, {(1, 0): 1.0}), 0.5)
    np.testing.assert_allclose(lin.min_values, 1.0)
    assert not lin.grows
    with pytest.raises(ValueError):
        coercivity_witness(example1(), 1.0)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.interpolate import BSpline

from hamstat.analysis import (
    Bump,
    ShootingProblem,
    Verdict,
    backward_to_origin,
    calibration_compare,
    classify_origin,
    dirichlet_energy,
    first_variation,
    graph_volume,
    origin_sweep,
    richardson_table,
    shoot_existence,
)
from hamstat.closed_forms import PowerLaw, RadialPotential, explicit_example, make_quadratic
from hamstat.errors import (
    DivergenceError,
    HypothesisViolation,
    InputError,
    InsufficientDataError,
    RangeError,
)
from hamstat.geometry import sphere_volume
from hamstat.ode import EventKind, ODEProblem, integrate, trajectory_from_potential

LINEAR = explicit_example(3)[0]


@pytest.fixture(scope="module")
def lambda2():
    traj, _ = shoot_existence(ShootingProblem(2.0, r_max=10.0))
    return traj


# shooting ------------------------------------------------------------------


def test_shooting_hypothesis():
    with pytest.raises(HypothesisViolation):
        ShootingProblem(1.5)
    with pytest.raises(InputError):
        ShootingProblem(4.0, delta=0.5)  # needs delta < 1/sqrt(4)


def test_shooting_defaults():
    prob = ShootingProblem(4.0)
    assert (prob.n, prob.c, prob.delta) == (5.0, -4.0, 0.25)


@pytest.mark.parametrize("lam", [2.0, 3.0])
def test_shooting_invariants_hold(lam):
    traj, rep = shoot_existence(ShootingProblem(lam, r_max=10.0))
    assert rep.all_hold
    assert rep.min_v == 1.0 and rep.r_reached == 10.0
    assert traj.c == -lam


# origin classification -----------------------------------------------------


def test_richardson_removes_polynomial_error():
    r = [1e-3 * 2**k for k in range(5)]
    vals = [2.0 + 3 * x - 5 * x * x + 7 * x**3 for x in r]
    assert richardson_table(vals)[3][0] == pytest.approx(2.0, abs=1e-14)


def test_quadratic_classifies_as_flat_disk():
    pot = make_quadratic(2, math.pi / 2)
    rep = classify_origin(trajectory_from_potential(pot, np.geomspace(1, 1e-6, 100), c=0.0))
    assert rep.verdict is Verdict.FLAT_DISK
    assert rep.theta_const == pytest.approx(math.pi / 2, abs=1e-12)


def test_linear_solution_classifies_as_half_cylinder():
    rep = classify_origin(backward_to_origin(3, -2.0, 1.0, 1.0, 0.0))
    assert rep.verdict is Verdict.HALF_CYLINDER
    assert rep.c_limit == pytest.approx(1.0, abs=1e-12)


def test_backward_regression_value():
    rep = classify_origin(backward_to_origin(3, -2.0, 1.0, 2.0, 0.3))
    assert rep.verdict is Verdict.HALF_CYLINDER
    assert rep.c_limit == pytest.approx(1.8918305596671914, rel=1e-9)


def test_classification_needs_data_near_origin():
    traj = integrate(ODEProblem(3, -2.0, 1.0, 1.0, 0.0, "backward"), 0.5)
    with pytest.raises(InsufficientDataError):
        classify_origin(traj)


def test_origin_sweep_is_reproducible():
    a, skipped_a = origin_sweep(3, seed=5)
    b, skipped_b = origin_sweep(3, seed=5)
    assert a == b and skipped_a == skipped_b
    assert all(r["verdict"] == Verdict.HALF_CYLINDER.value for r in a)
    assert all(ev["kind"] == EventKind.BLOWUP.value for s in skipped_a for ev in s["events"][-1:])


# energy and volume -----------------------------------------------------------


def test_energy_identity_for_linear_solution():
    rep = dirichlet_energy(LINEAR, 1.0, 2.0)
    assert rep.formula_value == pytest.approx(-2 * 4 * math.pi * (2 * math.atan(0.5) - math.pi / 2), rel=1e-15)
    assert rep.formula_value == pytest.approx(16.1729, abs=5e-5)
    assert rep.rel_dev <= 1e-8
    oracle = 4 * math.pi * quad(lambda r: 4 / (r * r + 1), 1, 2)[0]
    assert rep.quad_value == pytest.approx(oracle, rel=1e-12)


def test_energy_of_special_lagrangian_is_zero():
    rep = dirichlet_energy(make_quadratic(3, 1.0), 0.5, 3.0)
    assert rep.quad_value == 0.0 and rep.formula_value == 0.0


def test_energy_window_must_be_in_domain(lambda2):
    with pytest.raises(RangeError):
        dirichlet_energy(lambda2, 5.0, 11.0)
    with pytest.raises(RangeError):
        dirichlet_energy(LINEAR, 0.0, 1.0)


@settings(max_examples=15)
@given(st.floats(0.01, 9.9), st.floats(0.05, 1.0))
def test_energy_identity_on_integrated_trajectory(lambda2, a, frac):
    b = a + frac * (10.0 - a)
    assert dirichlet_energy(lambda2, a, b).rel_dev <= 1e-8


@pytest.mark.parametrize("pot, expected", [
    (make_quadratic(2, 0.0), math.pi),
    (LINEAR, 16 * math.pi / 3),
    (make_quadratic(2, math.pi / 2), 2 * math.pi),
])
def test_graph_volume_examples(pot, expected):
    assert graph_volume(pot, 0.0, 1.0) == pytest.approx(expected, rel=1e-12)


@given(st.integers(2, 5), st.floats(3, 4), st.floats(0.1, 2))
def test_graph_volume_matches_scipy(n, p, b):
    pot = RadialPotential(n, PowerLaw(p))

    def density(r):
        j = pot.jet(r)
        return math.sqrt(1 + j.upp**2) * (r * r + j.up**2) ** ((n - 1) / 2)

    oracle = sphere_volume(n) * quad(density, 1e-9, b, epsabs=1e-13, epsrel=1e-13)[0]
    # the quadrature tolerance is absolute, so small volumes need an absolute margin
    assert graph_volume(pot, 1e-9, b) == pytest.approx(oracle, rel=1e-9, abs=1e-9)


# first variation -------------------------------------------------------------


def test_bump_profiles():
    b = Bump(1.0, 0.5)
    assert b.value(1.0) == 1.0 and b.value(1.5) == 0.0
    assert b.derivatives(0.5) == (0.0, 0.0)
    s = Bump(1.0, 0.5, profile="bspline")
    ref = BSpline.basis_element(np.array(s.knots), extrapolate=False)
    for r in np.linspace(0.51, 1.49, 37):
        d1, d2 = s.derivatives(r)
        assert s.value(r) == pytest.approx(ref(r) / ref(1.0), abs=1e-14)
        assert d1 == pytest.approx(ref.derivative(1)(r) / ref(1.0), abs=1e-12)
        assert d2 == pytest.approx(ref.derivative(2)(r) / ref(1.0), abs=1e-11)
    with pytest.raises(InputError):
        Bump(1.0, 0.5, profile="gaussian")


def test_zero_bump_gives_zero():
    assert first_variation(LINEAR, Bump(1.0, 0.5, amplitude=0.0)) == 0.0


def test_bump_must_fit_in_domain():
    with pytest.raises(RangeError):
        first_variation(LINEAR, Bump(0.3, 0.5))


def test_linear_solution_is_critical():
    assert abs(first_variation(LINEAR, Bump(1.0, 0.5), 1e-4)) <= 1e-6


def test_cubic_is_not_critical():
    pot = RadialPotential(3, PowerLaw(3))
    bump = Bump(1.0, 0.5)
    val = first_variation(pot, bump, 1e-4)
    assert abs(val) >= 1e-2

    def volume(sign, h=1e-3):
        def density(r):
            j = pot.jet(r)
            e1, e2 = bump.derivatives(r)
            return math.sqrt(1 + (j.upp + sign * h * e2) ** 2) * (r * r + (j.up + sign * h * e1) ** 2)

        return 4 * math.pi * quad(density, 0.5, 1.5, points=[1.0], epsabs=1e-12, epsrel=1e-13, limit=200)[0]

    # independent difference of two full volumes at a coarser step
    assert val == pytest.approx((volume(1) - volume(-1)) / 2e-3, rel=1e-5)


@pytest.mark.parametrize("n, theta0", [(2, math.pi / 4), (3, -math.pi / 2), (4, math.pi / 2)])
@pytest.mark.parametrize("profile", ["quartic", "bspline"])
def test_quadratic_variation_is_second_order_in_h(n, theta0, profile):
    pot = make_quadratic(n, theta0)
    bump = Bump(1.0, 0.5, profile=profile)
    vals = [first_variation(pot, bump, 1e-3 / 2**k) for k in range(4)]
    for big, small in zip(vals[:-1], vals[1:]):
        assert big / small == pytest.approx(4.0, rel=0.02)
    # extrapolating h -> 0 leaves the O(h^4) term and quadrature error
    assert abs(vals[-1] - (vals[-2] - vals[-1]) / 3) <= 1e-7


# calibration -----------------------------------------------------------------


def test_calibration_of_quadratic():
    res = calibration_compare(make_quadratic(2, math.pi / 2), 1.0)
    assert res.theta_match
    assert res.vol_graph == pytest.approx(2 * math.pi, rel=1e-12)
    assert res.vol_quadratic == pytest.approx(res.vol_graph, rel=1e-12)


def test_calibration_of_linear_solution():
    res = calibration_compare(LINEAR, 1.0)
    assert not res.theta_match
    assert res.vol_graph == pytest.approx(16 * math.pi / 3, rel=1e-12)
    assert res.vol_quadratic == pytest.approx(8 * math.sqrt(2) * math.pi / 3, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_calibration_of_flat_plane(n):
    res = calibration_compare(make_quadratic(n, 0.0), 1.0)
    assert res.theta_match and res.vol_graph == res.vol_quadratic


def test_calibration_detects_divergence():
    with pytest.raises(DivergenceError):
        calibration_compare(explicit_example(4)[0], 1.0)


@given(st.integers(2, 5), st.floats(-0.9, 0.9), st.floats(0.2, 3))
def test_special_lagrangian_quadratics_are_calibrated(n, frac, rho):
    res = calibration_compare(make_quadratic(n, frac * n * math.pi / 2), rho)
    assert res.theta_match
    assert res.vol_quadratic == pytest.approx(res.vol_graph, rel=1e-12)


# two-dimensional non-special-Lagrangian solutions -----------------------------


@pytest.mark.parametrize("c", [0.5, -0.5, 2.0])
def test_two_dimensional_solutions_with_nonzero_c_end_in_events(c):
    traj = integrate(ODEProblem(2, c, 1.0, 1.0, 0.0), 1e4)
    assert traj.terminal_event.kind is not EventKind.DOMAIN_END

import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hamstat.closed_forms import (
    SL2D,
    ClosedForm2DParams,
    LinearExample,
    RadialProfile,
    explicit_example,
    lewy_yuan_rotate,
    make_quadratic,
    sl2d_beta,
    sl2d_eval,
    sl2d_params_from_jet,
)
from hamstat.errors import (
    DegeneratePhaseError,
    DomainError,
    InputError,
    PhaseRangeError,
    RangeError,
    RotationFoldError,
    UnsupportedDimensionError,
)
from hamstat.geometry import first_integral, hs_residual, phase


@pytest.mark.parametrize("a, up_a, theta, expected", [
    (1, 1, math.pi / 2, 0.0),
    (1, 1, math.pi / 4, -1.0),
    (2, 2, math.pi / 2, 0.0),
])
def test_beta_examples(a, up_a, theta, expected):
    assert sl2d_beta(a, up_a, theta) == pytest.approx(expected, abs=1e-15)


def test_beta_rejects_degenerate_phase():
    with pytest.raises(DegeneratePhaseError):
        sl2d_beta(1, 1, 0.0)


def test_eval_examples():
    plus = ClosedForm2DParams(1, 0.5, 1, math.pi / 2, 0.0, 1)
    u, up = sl2d_eval(plus, 2.0)
    assert up == pytest.approx(2.0, abs=1e-15)
    assert u == pytest.approx(2.0, abs=1e-15)
    minus = ClosedForm2DParams(1, 0.0, -1, math.pi / 2, 0.0, -1)
    assert sl2d_eval(minus, 1.0)[1] == -1.0


def test_eval_outside_domain():
    p = ClosedForm2DParams.from_anchor(1.0, 0.0, 0.3, 2.0)
    assert p.beta < 0
    with pytest.raises(RangeError):
        sl2d_eval(p, 0.5 * math.sqrt(-p.beta))


def test_params_validation():
    with pytest.raises(InputError):
        ClosedForm2DParams(1, 0, 1, math.pi / 2, 0.5, 1)  # wrong beta
    with pytest.raises(InputError):
        ClosedForm2DParams(1, 0, 1, math.pi / 2, 0.0, -1)  # wrong branch
    with pytest.raises(PhaseRangeError):
        ClosedForm2DParams(1, 0, 1, 4.0, 0.0, 1)


def _well_posed(a, up_a, upp_a):
    # the family degenerates as sin(theta) -> 0, where u' loses all digits
    return abs(math.sin(math.atan(upp_a) + math.atan(up_a / a))) > 0.05


anchor = st.tuples(st.floats(0.2, 3), st.floats(-2, 2), st.floats(-3, 3), st.floats(-3, 3)).filter(
    lambda t: _well_posed(t[0], t[2], t[3]))


@given(anchor)
def test_anchor_is_reproduced_exactly(data):
    a, u_a, up_a, upp_a = data
    p = sl2d_params_from_jet(a, u_a, up_a, upp_a)
    assert sl2d_eval(p, a) == (u_a, up_a)
    assert SL2D(p).jet(a).upp == pytest.approx(upp_a, rel=1e-9, abs=1e-9)


@given(anchor, st.floats(1.0, 5.0))
def test_family_has_constant_phase(data, stretch):
    a, u_a, up_a, upp_a = data
    p = sl2d_params_from_jet(a, u_a, up_a, upp_a)
    r = a * stretch
    assume(r * r + p.beta > 1e-6)
    jet = SL2D(p).jet(r)
    # the family parameter is minus the phase, modulo pi
    wrapped = (phase(2, jet).theta + p.theta + math.pi / 2) % math.pi - math.pi / 2
    assert abs(wrapped) <= 1e-10 * max(1.0, abs(jet.upp))
    assert abs(first_integral(2, jet).c) <= 1e-9 * max(1.0, abs(jet.uppp), r)


@given(anchor, st.floats(1.0, 5.0))
def test_family_u_is_antiderivative(data, stretch):
    from scipy.integrate import quad

    a, u_a, up_a, upp_a = data
    p = sl2d_params_from_jet(a, u_a, up_a, upp_a)
    r = a * stretch
    assume(a * a + p.beta > 1e-6)
    integral = quad(lambda s: sl2d_eval(p, s)[1], a, r, epsabs=1e-12, epsrel=1e-12)[0]
    assert sl2d_eval(p, r)[0] - u_a == pytest.approx(integral, abs=1e-9 * max(1.0, abs(integral)))


@pytest.mark.parametrize("n, theta0, k", [(2, math.pi / 2, 1.0), (3, 0.0, 0.0), (4, math.pi, 1.0)])
def test_make_quadratic(n, theta0, k):
    pot = make_quadratic(n, theta0)
    assert pot.form.k == pytest.approx(k, abs=1e-15)
    assert pot.stationary


def test_make_quadratic_range():
    with pytest.raises(PhaseRangeError):
        make_quadratic(2, math.pi)


@given(st.integers(2, 6), st.floats(-0.99, 0.99), st.floats(0.01, 10))
def test_quadratic_phase_is_theta0(n, frac, r):
    theta0 = frac * n * math.pi / 2
    pot = make_quadratic(n, theta0)
    assert phase(n, pot.jet(r)).theta == pytest.approx(theta0, abs=1e-12)


@pytest.mark.parametrize("n, c", [(3, -2.0), (4, -4.0)])
def test_explicit_examples(n, c):
    pot, fi = explicit_example(n)
    assert fi.c == c
    assert first_integral(n, pot.jet(1.0)).c == pytest.approx(c, abs=1e-14)
    worst = max(abs(hs_residual(n, fi, pot.jet(r))) for r in np.geomspace(0.1, 10, 200))
    assert worst < 1e-12


def test_explicit_example_dimensions():
    with pytest.raises(UnsupportedDimensionError):
        explicit_example(5)
    with pytest.raises(DomainError):
        explicit_example(4)[0].jet(0.0)


def test_wrong_dimension_is_tagged():
    from hamstat.closed_forms import _potential

    assert not _potential(4, LinearExample()).stationary
    assert _potential(3, LinearExample()).stationary


def test_domain_is_enforced():
    pot = make_quadratic(2, 0.5)
    from hamstat.closed_forms import RadialPotential

    bounded = RadialPotential(2, pot.form, (0.0, 1.0))
    with pytest.raises(RangeError):
        bounded.jet(1.5)


# rotation ----------------------------------------------------------------


def _quadratic_profile(k=1.0):
    r = np.linspace(0.1, 2.0, 101)
    return RadialProfile(r, k * r, np.full_like(r, k))


def test_zero_rotation_is_identity():
    prof = _quadratic_profile()
    rot = lewy_yuan_rotate(prof, 0.0)
    np.testing.assert_array_equal(rot.r, prof.r)
    np.testing.assert_array_equal(rot.v, prof.v)
    np.testing.assert_array_equal(rot.dv, prof.dv)


def test_rotated_quadratic_slope():
    rot = lewy_yuan_rotate(_quadratic_profile(), math.pi / 8)
    np.testing.assert_allclose(rot.v, math.tan(math.pi / 8) * rot.r, rtol=1e-14)


@given(st.floats(-0.75, 1.5))
def test_unit_point_norm(alpha):
    rot = lewy_yuan_rotate(RadialProfile([1.0], [1.0], [0.0]), alpha)
    assert rot.r[0] ** 2 + rot.v[0] ** 2 == pytest.approx(2.0, rel=1e-15)


def test_fold_is_detected():
    with pytest.raises(RotationFoldError):
        lewy_yuan_rotate(_quadratic_profile(), -math.pi / 3)


@given(st.integers(2, 5), st.floats(-0.6, 0.6), st.floats(-0.3, 0.3))
def test_rotation_invariants(n, theta_frac, alpha):
    pot = make_quadratic(n, theta_frac * n * math.pi / 2)
    radii = np.linspace(0.2, 2.0, 201)
    prof = RadialProfile.from_potential(pot, radii)
    try:
        rot = lewy_yuan_rotate(prof, alpha)
    except RotationFoldError:
        assume(False)
    np.testing.assert_allclose(np.hypot(rot.r, rot.v), np.hypot(prof.r, prof.v), rtol=0, atol=1e-13)
    np.testing.assert_allclose(rot.phase(n), prof.phase(n) - n * alpha, atol=1e-10)
    assert rot.arc_length() == pytest.approx(prof.arc_length(), abs=1e-8)


def test_rotation_invariants_on_curved_profile():
    # a genuinely curved special Lagrangian profile; phase shift needs the
    # principal branch to be respected, so keep alpha small
    p = sl2d_params_from_jet(1.0, 0.0, 1.0, 0.5)
    radii = np.linspace(1.0, 3.0, 2001)
    form = SL2D(p)
    jets = [form.jet(float(r)) for r in radii]
    prof = RadialProfile([j.r for j in jets], [j.up for j in jets], [j.upp for j in jets])
    rot = lewy_yuan_rotate(prof, 0.1)
    np.testing.assert_allclose(rot.phase(2), prof.phase(2) - 0.2, atol=1e-10)
    np.testing.assert_allclose(np.hypot(rot.r, rot.v), np.hypot(prof.r, prof.v), atol=1e-13)

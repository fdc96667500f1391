import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import gamma

from hamstat.errors import DomainError, InputError, SingularityError
from hamstat.geometry import (
    FirstIntegral,
    JetSample,
    first_integral,
    first_integral_values,
    hs_residual,
    metric,
    phase,
    phase_values,
    sphere_volume,
    volume_element,
)

finite = st.floats(-50, 50, allow_nan=False)
radius = st.floats(1e-3, 50)
dimension = st.integers(2, 8)


@st.composite
def jets(draw, with_third=False):
    return JetSample(draw(radius), draw(finite), draw(finite), draw(finite),
                     draw(finite) if with_third else None)


@pytest.mark.parametrize("n, sample, expected", [
    (2, JetSample(1, up=1, upp=1), math.pi / 2),
    (3, JetSample(2, up=1, upp=0), 2 * math.atan(0.5)),
    (4, JetSample(1, up=1, upp=-1), math.pi / 2),
])
def test_phase_examples(n, sample, expected):
    assert phase(n, sample).theta == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("n, sample, expected", [
    (3, JetSample(1), (1, 1, 1)),
    (3, JetSample(2, up=1), (1, 5, 5)),
    (2, JetSample(1, up=1, upp=1), (2, 2, 2)),
])
def test_metric_examples(n, sample, expected):
    m = metric(n, sample)
    assert (m.g_rr, m.g_VV) == expected[:2]
    assert m.sqrt_g == pytest.approx(expected[2], rel=1e-15)


def test_first_integral_examples():
    assert first_integral(2, JetSample(3.0, 4.5, 3.0, 1.0, 0.0)).c == 0.0
    assert first_integral(3, JetSample(1, 1, 1, 0, 0)).c == pytest.approx(-2, abs=1e-15)
    assert first_integral(4, JetSample(1, 0, 1, -1, 2)).c == pytest.approx(-4, abs=1e-14)


def test_first_integral_needs_third_derivative():
    with pytest.raises(InputError):
        first_integral(3, JetSample(1, 1, 1, 0))


@pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
def test_linear_solution_has_zero_residual(r):
    assert abs(hs_residual(3, -2.0, JetSample(r, r, 1, 0, 0))) <= 1e-12


def test_residual_examples():
    assert hs_residual(2, 0.0, JetSample(2.0, 2.0, 2.0, 1.0, 0.0)) == 0.0
    assert hs_residual(3, FirstIntegral(0.0), JetSample(1, 1, 1, 0, 0)) == pytest.approx(-1, abs=1e-15)


def test_residual_singular_at_zero_norm():
    with pytest.raises(SingularityError):
        hs_residual(3, -2.0, JetSample(1e-200, 0, 0, 0, 0))


@pytest.mark.parametrize("n, sample, expected", [
    (5, JetSample(1), 1.0),
    (3, JetSample(2, up=1), 5.0),
    (2, JetSample(1, up=1, upp=1), 2.0),
])
def test_volume_element_examples(n, sample, expected):
    assert volume_element(n, sample) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("n, expected", [(2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2)])
def test_sphere_volume_examples(n, expected):
    assert sphere_volume(n) == pytest.approx(expected, rel=1e-15)


@given(st.integers(2, 40))
def test_sphere_volume_matches_gamma_function(n):
    assert sphere_volume(n) == pytest.approx(2 * math.pi ** (n / 2) / gamma(n / 2), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2.5, 0])
def test_sphere_volume_rejects_bad_dimension(n):
    with pytest.raises(InputError):
        sphere_volume(n)


def test_pointwise_operations_reject_origin():
    with pytest.raises(DomainError):
        phase(3, JetSample(0.0, up=1))
    with pytest.raises(DomainError):
        volume_element(3, JetSample(0.0))


@pytest.mark.parametrize("bad", [dict(r=-1.0), dict(r=1.0, up=math.nan), dict(r=1.0, uppp=math.inf)])
def test_jet_validation(bad):
    with pytest.raises(InputError):
        JetSample(**bad)


@given(dimension, jets())
def test_sqrt_g_identity(n, s):
    m = metric(n, s)
    assert m.g_rr >= 1 and m.g_VV >= 0
    assert m.sqrt_g**2 == pytest.approx(m.g_rr * m.g_VV ** (n - 1), rel=1e-14)


@given(dimension, jets(with_third=True))
def test_first_integral_zeroes_residual(n, s):
    c = first_integral(n, s)
    g_vv = s.r**2 + s.up**2
    # residual is measured in theta_r units; compare to the size of its terms
    scale = abs(s.uppp) / (1 + s.upp**2) + (n - 1) * (abs(s.upp) * s.r + abs(s.up)) / g_vv
    assert abs(hs_residual(n, c, s)) <= 1e-12 * max(1.0, scale)


@given(dimension, jets())
def test_phase_is_odd(n, s):
    flipped = JetSample(s.r, -s.u, -s.up, -s.upp)
    assert phase(n, flipped).theta == -phase(n, s).theta


@given(dimension, jets())
def test_phase_is_bounded(n, s):
    assert abs(phase(n, s).theta) < n * math.pi / 2


@given(dimension, jets())
def test_volume_element_dominates_flat(n, s):
    assert volume_element(n, s) >= s.r ** (n - 1) * (1 - 1e-15)


@given(dimension, st.lists(jets(with_third=True), min_size=1, max_size=5))
def test_vectorised_helpers_agree_with_scalar(n, samples):
    r = np.array([s.r for s in samples])
    up = np.array([s.up for s in samples])
    upp = np.array([s.upp for s in samples])
    uppp = np.array([s.uppp for s in samples])
    np.testing.assert_allclose(phase_values(n, r, up, upp), [phase(n, s).theta for s in samples], rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(first_integral_values(n, r, up, upp, uppp),
                               [first_integral(n, s).c for s in samples], rtol=1e-12, atol=1e-12)

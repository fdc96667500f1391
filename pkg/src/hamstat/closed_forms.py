"""Exact radial solutions and the unitary (Lewy-Yuan) rotation of profiles.

Potentials are represented by :class:`RadialPotential`, which pairs a
dimension and a domain with one of the analytic forms below (or a sampled
trajectory). Every form returns full jets (u, u', u'', u''') so the
pointwise geometry can be evaluated without numerical differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BranchDomainError,
    DegeneratePhaseError,
    DomainError,
    InputError,
    PhaseRangeError,
    RangeError,
    RotationFoldError,
    UnsupportedDimensionError,
)
from .geometry import FirstIntegral, JetSample, first_integral, phase_values

__all__ = [
    "ClosedForm2DParams",
    "Quadratic",
    "LinearExample",
    "LogExample",
    "PowerLaw",
    "SL2D",
    "Sampled",
    "RadialPotential",
    "RadialProfile",
    "sl2d_beta",
    "sl2d_eval",
    "sl2d_params_from_jet",
    "make_quadratic",
    "explicit_example",
    "lewy_yuan_rotate",
]


def sl2d_beta(a, up_a, theta):
    """Integration constant beta of the two-dimensional family.

    From (u' - r cot(theta))^2 = csc^2(theta) (r^2 + beta) at r = a. The
    cross term carries the factor u'(a).
    """
    s = math.sin(theta)
    if s == 0.0:
        raise DegeneratePhaseError("sin(theta) = 0 has no special Lagrangian radial family")
    if a <= 0:
        raise InputError(f"anchor radius must be positive, got {a}")
    c = math.cos(theta)
    return s * s * up_a * up_a - a * a * s * s - 2.0 * a * c * s * up_a


@dataclass(frozen=True)
class ClosedForm2DParams:
    """Anchor data of a two-dimensional special Lagrangian radial potential.

    ``branch`` picks the sign in u'(r) = (r cos(theta) +/- sqrt(r^2 + beta)) / sin(theta).
    Use :meth:`from_anchor` to have ``beta`` (and optionally ``branch``) filled in.

    ``theta`` parametrizes the family through the radial equation
    (1 - u' u'' / r) sin(theta) + (u'' + u'/r) cos(theta) = 0, so the
    Lagrangian phase of the resulting graph is congruent to -theta mod pi.
    """

    a: float
    u_a: float
    up_a: float
    theta: float
    beta: float
    branch: int = 1

    def __post_init__(self):
        if self.branch not in (1, -1):
            raise InputError(f"branch must be +1 or -1, got {self.branch!r}")
        if not -math.pi < self.theta < math.pi:
            raise PhaseRangeError(f"theta must lie in (-pi, pi), got {self.theta}")
        beta = sl2d_beta(self.a, self.up_a, self.theta)
        if abs(beta - self.beta) > 1e-13 * max(1.0, abs(beta)):
            raise InputError(f"beta={self.beta} inconsistent with anchor data (expected {beta})")
        s, c = math.sin(self.theta), math.cos(self.theta)
        rad = self.a * self.a + self.beta
        expected = (self.a * c + self.branch * math.sqrt(max(rad, 0.0))) / s
        if abs(expected - self.up_a) > 1e-12 * max(1.0, abs(self.up_a), abs(1.0 / s)):
            raise InputError(f"branch {self.branch} does not reproduce u'(a)={self.up_a}")

    @classmethod
    def from_anchor(cls, a, u_a, up_a, theta, branch=None):
        beta = sl2d_beta(a, up_a, theta)
        if branch is None:
            branch = 1 if up_a * math.sin(theta) - a * math.cos(theta) >= 0 else -1
        return cls(a, u_a, up_a, theta, beta, branch)


def sl2d_params_from_jet(a, u_a, up_a, upp_a):
    """Closed-form parameters of the special Lagrangian solution through a jet.

    The family parameter is minus the phase of the jet, so the returned
    family passes through (a, u_a, up_a) with second derivative upp_a.
    """
    theta = -(math.atan(upp_a) + math.atan(up_a / a))
    return ClosedForm2DParams.from_anchor(a, u_a, up_a, theta)


def sl2d_eval(params: ClosedForm2DParams, r):
    """Return (u(r), u'(r)) of the closed-form family."""
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    p = params
    rad = r * r + p.beta
    if rad < 0:
        raise RangeError(f"r^2 + beta < 0 at r={r} (beta={p.beta})")
    if r == p.a:
        return p.u_a, p.up_a
    s, c = math.sin(p.theta), math.cos(p.theta)
    root = math.sqrt(rad)
    root_a = math.sqrt(p.a * p.a + p.beta)
    up = (r * c + p.branch * root) / s
    area = r * root - p.a * root_a
    if p.beta != 0.0:
        num, den = r + root, p.a + root_a
        if num <= 0 or den <= 0:
            raise BranchDomainError(f"log argument non-positive at r={r}")
        area += p.beta * math.log(num / den)
    u = p.u_a + 0.5 * (c / s) * (r * r - p.a * p.a) + p.branch * 0.5 / s * area
    return u, up


def _sl2d_higher(params, r, up):
    s, c = math.sin(params.theta), math.cos(params.theta)
    root = math.sqrt(r * r + params.beta)
    upp = (c + params.branch * r / root) / s
    uppp = params.branch * params.beta / (root**3 * s)
    return upp, uppp


# analytic forms ------------------------------------------------------------


@dataclass(frozen=True)
class Quadratic:
    """u = k r^2 / 2."""

    k: float

    def jet(self, r):
        return JetSample(r, 0.5 * self.k * r * r, self.k * r, self.k, 0.0)


@dataclass(frozen=True)
class LinearExample:
    """u = r, Hamiltonian stationary for n = 3 with C = -2."""

    stationary_dimension = 3

    def jet(self, r):
        return JetSample(r, r, 1.0, 0.0, 0.0)


@dataclass(frozen=True)
class LogExample:
    """u = ln r, Hamiltonian stationary for n = 4 with C = -4."""

    stationary_dimension = 4

    def jet(self, r):
        if r <= 0:
            raise DomainError("ln r is singular at the origin")
        return JetSample(r, math.log(r), 1.0 / r, -1.0 / r**2, 2.0 / r**3)


@dataclass(frozen=True)
class PowerLaw:
    """u = coef * r^p; a generic non-solution used for variational checks."""

    p: float
    coef: float = 1.0

    def jet(self, r):
        p, k = self.p, self.coef
        if r == 0 and p < 3:
            raise DomainError(f"r^{p} has no finite third derivative at 0")
        return JetSample(
            r,
            k * r**p,
            k * p * r ** (p - 1),
            k * p * (p - 1) * r ** (p - 2),
            k * p * (p - 1) * (p - 2) * r ** (p - 3),
        )


@dataclass(frozen=True)
class SL2D:
    params: ClosedForm2DParams

    def jet(self, r):
        u, up = sl2d_eval(self.params, r)
        upp, uppp = _sl2d_higher(self.params, r, up)
        return JetSample(r, u, up, upp, uppp)


@dataclass(frozen=True)
class Sampled:
    """A numerically integrated trajectory viewed as a potential."""

    trajectory: object

    def jet(self, r):
        return self.trajectory.sample_jet(r)


@dataclass(frozen=True)
class RadialPotential:
    n: float
    form: object
    domain: tuple = (0.0, math.inf)
    stationary: bool = field(default=True)

    def __post_init__(self):
        a, b = self.domain
        if not (0 <= a < b):
            raise InputError(f"domain must satisfy 0 <= a < b, got {self.domain}")
        if self.n < 2:
            raise InputError(f"dimension must be >= 2, got {self.n}")

    def jet(self, r) -> JetSample:
        a, b = self.domain
        if not (a <= r <= b):
            raise RangeError(f"r={r} outside domain [{a}, {b}]")
        return self.form.jet(r)

    def first_integral(self, r) -> FirstIntegral:
        return first_integral(self.n, self.jet(r))


def _potential(n, form, domain=(0.0, math.inf)):
    flag = getattr(form, "stationary_dimension", None)
    return RadialPotential(n, form, domain, stationary=flag is None or flag == n)


def make_quadratic(n, theta0) -> RadialPotential:
    """Quadratic potential whose constant phase is ``theta0``."""
    if abs(theta0) >= n * math.pi / 2:
        raise PhaseRangeError(f"|theta0| must be < n*pi/2 = {n * math.pi / 2}")
    return _potential(n, Quadratic(math.tan(theta0 / n)))


def linear_potential(n=3):
    return _potential(n, LinearExample())


def log_potential(n=4):
    return _potential(n, LogExample())


def explicit_example(n):
    """The explicit non-special-Lagrangian solutions: u = r (n=3), u = ln r (n=4)."""
    if n == 3:
        return linear_potential(3), FirstIntegral(-2.0)
    if n == 4:
        return log_potential(4), FirstIntegral(-4.0)
    raise UnsupportedDimensionError(f"explicit solutions exist only for n in (3, 4), got {n}")


# rotation ------------------------------------------------------------------


@dataclass(frozen=True)
class RadialProfile:
    """Samples (r, v = u', dv = u'') of a radial gradient graph."""

    r: np.ndarray
    v: np.ndarray
    dv: np.ndarray

    def __post_init__(self):
        for name in ("r", "v", "dv"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.r.shape == self.v.shape == self.dv.shape):
            raise InputError("profile arrays must share one shape")

    @classmethod
    def from_potential(cls, potential, radii):
        jets = [potential.jet(float(r)) for r in radii]
        return cls([j.r for j in jets], [j.up for j in jets], [j.upp for j in jets])

    def phase(self, n):
        return phase_values(n, self.r, self.v, self.dv)

    def arc_length(self):
        """Length of the (r, v) curve, integrated in the sample parameter."""
        from scipy.integrate import simpson

        return float(simpson(np.sqrt(1.0 + self.dv**2), x=self.r))


def lewy_yuan_rotate(profile: RadialProfile, alpha) -> RadialProfile:
    """Rotate the gradient graph by ``alpha`` in each (x_i, y_i) plane.

    Radially, (r, v) -> (r cos a + v sin a, -r sin a + v cos a), and the
    slope transforms by the chain rule. The phase drops by n * alpha.
    """
    r, v, dv = profile.r, profile.v, profile.dv
    if np.any(r <= 0):
        raise DomainError("rotation needs strictly positive radii")
    ca, sa = math.cos(alpha), math.sin(alpha)
    r_bar = ca * r + sa * v
    v_bar = -sa * r + ca * v
    dr = ca + sa * dv
    if np.any(dr <= 0) or np.any(np.diff(r_bar) <= 0) or np.any(r_bar <= 0):
        raise RotationFoldError(f"rotation by alpha={alpha} folds the profile")
    dv_bar = (-sa + ca * dv) / dr
    return RadialProfile(r_bar, v_bar, dv_bar)

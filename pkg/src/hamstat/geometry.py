"""Pointwise geometry of the gradient graph of a radial potential u(r).

The gradient graph (r xi, u'(r) xi) of a radial potential has an induced
metric that is diagonal in (r, sphere) coordinates::

    g_rr = 1 + u''^2,        g_VV = r^2 + u'^2

and the Hessian of u has eigenvalues u'' (once) and u'/r (n - 1 times), so
the Lagrangian phase is

    theta = arctan(u'') + (n - 1) arctan(u'/r).

Hamiltonian stationary radial graphs are exactly those for which
``sqrt(g) g^rr theta_r`` is a constant C, the first integral. C = 0 is the
special Lagrangian case.

All functions here are pure and operate on one :class:`JetSample`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError, SingularityError

__all__ = [
    "JetSample",
    "MetricSample",
    "PhaseValue",
    "FirstIntegral",
    "phase",
    "metric",
    "first_integral",
    "hs_residual",
    "volume_element",
    "sphere_volume",
]


def _check_dimension(n) -> float:
    if not math.isfinite(n) or n < 2:
        raise InputError(f"dimension must be >= 2, got {n!r}")
    return n


@dataclass(frozen=True)
class JetSample:
    """Derivatives of a radial potential at radius ``r``.

    ``uppp`` is optional; operations that need the third derivative
    (:func:`first_integral`, :func:`hs_residual`) reject jets without it.
    """

    r: float
    u: float = 0.0
    up: float = 0.0
    upp: float = 0.0
    uppp: float | None = None

    def __post_init__(self):
        values = [self.r, self.u, self.up, self.upp]
        if self.uppp is not None:
            values.append(self.uppp)
        if not all(math.isfinite(x) for x in values):
            raise InputError(f"non-finite jet: {self}")
        if self.r < 0:
            raise InputError(f"negative radius r={self.r}")


@dataclass(frozen=True)
class MetricSample:
    g_rr: float
    g_VV: float
    sqrt_g: float
    n: float


@dataclass(frozen=True)
class PhaseValue:
    theta: float
    theta_r: float | None = None


@dataclass(frozen=True)
class FirstIntegral:
    """The conserved constant C. Zero means special Lagrangian."""

    c: float

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise InputError(f"non-finite first integral {self.c!r}")

    def __float__(self):
        return float(self.c)


def _require_positive_r(sample: JetSample):
    if sample.r == 0:
        raise DomainError("u'/r is undefined at r = 0; use the origin analysis instead")


def _theta_r(n, r, up, upp, uppp):
    # (u'/r)' / (1 + (u'/r)^2) simplifies to (u'' r - u') / (r^2 + u'^2)
    return uppp / (1.0 + upp * upp) + (n - 1) * (upp * r - up) / (r * r + up * up)


def phase(n, sample: JetSample) -> PhaseValue:
    """Lagrangian phase at ``sample`` (principal arctan branch).

    ``theta_r`` is filled in only when the jet carries ``uppp``.
    """
    _check_dimension(n)
    _require_positive_r(sample)
    r, up, upp = sample.r, sample.up, sample.upp
    theta = math.atan(upp) + (n - 1) * math.atan(up / r)
    theta_r = None
    if sample.uppp is not None:
        theta_r = _theta_r(n, r, up, upp, sample.uppp)
    return PhaseValue(theta, theta_r)


def metric(n, sample: JetSample) -> MetricSample:
    _check_dimension(n)
    g_rr = 1.0 + sample.upp * sample.upp
    g_vv = sample.r * sample.r + sample.up * sample.up
    sqrt_g = math.sqrt(g_rr) * g_vv ** ((n - 1) / 2)
    return MetricSample(g_rr, g_vv, sqrt_g, n)


def first_integral(n, sample: JetSample) -> FirstIntegral:
    """Recover C = theta_r * sqrt(g) / g_rr from a jet including u'''."""
    if sample.uppp is None:
        raise InputError("first_integral needs the third derivative uppp")
    th = phase(n, sample)
    g_vv = sample.r * sample.r + sample.up * sample.up
    c = th.theta_r * g_vv ** ((n - 1) / 2) / math.sqrt(1.0 + sample.upp * sample.upp)
    return FirstIntegral(c)


def hs_residual(n, c, sample: JetSample) -> float:
    """theta_r - C sqrt(g_rr / g_VV^(n-1)); zero for a stationary jet."""
    _check_dimension(n)
    _require_positive_r(sample)
    if sample.uppp is None:
        raise InputError("hs_residual needs the third derivative uppp")
    c = float(c)
    r, up, upp = sample.r, sample.up, sample.upp
    g_vv = r * r + up * up
    if g_vv == 0:
        raise SingularityError("r^2 + u'^2 = 0")
    lhs = _theta_r(n, r, up, upp, sample.uppp)
    rhs = c * math.sqrt((1.0 + upp * upp) / g_vv ** (n - 1))
    res = lhs - rhs
    if not math.isfinite(res):
        raise SingularityError(f"non-finite residual at r={r}")
    return res


def volume_element(n, sample: JetSample) -> float:
    """Radial volume density; the graph volume is Vol(S^{n-1}) times its integral."""
    _require_positive_r(sample)
    return metric(n, sample).sqrt_g


def sphere_volume(n) -> float:
    """Vol(S^{n-1}) = 2 pi^{n/2} / Gamma(n/2), with Gamma by exact recursion."""
    if isinstance(n, float) and n.is_integer():
        n = int(n)
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InputError(f"sphere_volume needs an integer dimension >= 2, got {n!r}")
    n = int(n)
    m = n // 2
    if n % 2 == 0:
        # Gamma(m) = (m-1)!
        return 2.0 * math.pi**m / math.factorial(m - 1)
    # Gamma(m + 1/2) = (2m-1)!! sqrt(pi) / 2^m
    double_fact = math.prod(range(1, 2 * m, 2))
    return 2.0 ** (m + 1) * math.pi**m / double_fact


# vectorised helpers used by trajectories and the CLI exporters


def phase_values(n, r, up, upp):
    r = np.asarray(r, dtype=float)
    return np.arctan(upp) + (n - 1) * np.arctan(up / r)


def first_integral_values(n, r, up, upp, uppp):
    r = np.asarray(r, dtype=float)
    up = np.asarray(up, dtype=float)
    upp = np.asarray(upp, dtype=float)
    g_vv = r * r + up * up
    theta_r = np.asarray(uppp) / (1.0 + upp * upp) + (n - 1) * (upp * r - up) / g_vv
    return theta_r * g_vv ** ((n - 1) / 2) / np.sqrt(1.0 + upp * upp)

"""Theorem-level numerical procedures on radial solutions.

* :func:`shoot_existence` integrates the lambda-family from v(0) = v'(0) = 1
  and audits the a-priori bounds that keep the solution global.
* :func:`classify_origin` extrapolates u'(r) to r = 0 and sorts the solution
  into the flat-disk or half-cylinder alternative.
* :func:`dirichlet_energy` compares the quadrature of |grad theta|^2 with the
  closed form C Vol(S^{n-1}) (theta(b) - theta(a)).
* :func:`graph_volume`, :func:`first_variation` and
  :func:`calibration_compare` work on the volume functional directly.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import Quadratic, RadialPotential
from .errors import (
    DivergenceError,
    DomainError,
    EvaluationError,
    HamstatError,
    HypothesisViolation,
    InputError,
    InsufficientDataError,
    RangeError,
    StiffnessError,
)
from .geometry import JetSample, metric, phase, sphere_volume
from .ode import DEFAULT_ATOL, DEFAULT_RTOL, EventKind, ODEProblem, Trajectory, integrate
from .quadrature import adaptive_simpson

__all__ = [
    "ShootingProblem",
    "ShootingReport",
    "Verdict",
    "ClassificationReport",
    "EnergyReport",
    "Bump",
    "CalibrationResult",
    "shoot_existence",
    "classify_origin",
    "backward_to_origin",
    "origin_sweep",
    "richardson_table",
    "dirichlet_energy",
    "graph_volume",
    "first_variation",
    "calibration_compare",
]

QUAD_TOL = 1e-10
ZERO_TOL = 1e-6
RICHARDSON_DEPTH = 4
STABILITY_RTOL = 1e-3
ORIGIN_STOP = 1e-6


# shooting ------------------------------------------------------------------


@dataclass(frozen=True)
class ShootingProblem:
    """F_lambda = 0 started from v(0) = 1, v'(0) = 1; delta defaults to 0.5/sqrt(lambda)."""

    lam: float
    r_max: float = 10.0
    delta: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam < 2:
            raise HypothesisViolation(f"shooting existence needs lambda >= 2, got {self.lam}")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise InputError(f"r_max must be positive, got {self.r_max}")
        if self.delta is None:
            object.__setattr__(self, "delta", 0.5 / math.sqrt(self.lam))
        if not 0 < self.delta < 1 / math.sqrt(self.lam):
            raise InputError(f"delta must lie in (0, 1/sqrt(lambda)), got {self.delta}")
        if self.delta >= self.r_max:
            raise InputError("delta must be smaller than r_max")

    @property
    def n(self):
        return self.lam + 1

    @property
    def c(self):
        return -self.lam


@dataclass(frozen=True)
class ShootingReport:
    v_at_least_one: bool
    slope_positive: bool
    delta_bound: bool
    growth_bound: bool
    min_v: float
    min_slope: float
    min_delta_margin: float
    max_log_growth_excess: float
    r_reached: float

    @property
    def all_hold(self):
        return self.v_at_least_one and self.slope_positive and self.delta_bound and self.growth_bound

    def to_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["all_hold"] = self.all_hold
        return d


def _shooting_report(traj: Trajectory, delta):
    r, v, w = traj.r, traj.v, traj.w
    late = r >= delta
    v_delta = traj.sample_jet(delta).up if traj.span[1] >= delta else math.nan
    margin = v[late] - delta * w[late]
    # compare logs: exp(r/delta) overflows quickly
    excess = np.log(v[late]) - (math.log(v_delta) + r[late] / delta) if v_delta > 0 else np.array([np.inf])
    return ShootingReport(
        v_at_least_one=bool(np.all(v >= 1.0)),
        slope_positive=bool(np.all(w > 0.0)),
        delta_bound=bool(margin.size > 0 and np.all(margin > 0)),
        growth_bound=bool(excess.size > 0 and np.all(excess <= 0)),
        min_v=float(v.min()),
        min_slope=float(w.min()),
        min_delta_margin=float(margin.min()) if margin.size else math.nan,
        max_log_growth_excess=float(excess.max()) if excess.size else math.nan,
        r_reached=float(r[-1]),
    )


def shoot_existence(prob: ShootingProblem, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Integrate the lambda-family from (0, 1, 1) and check its a-priori bounds.

    Returns ``(trajectory, report)``. The report checks, on the samples,
    v >= 1 and v' > 0 throughout, and v - delta v' > 0 together with
    v(r) <= v(delta) exp(r / delta) on [delta, r_max]. If integration fails
    the :class:`StiffnessError` is re-raised with ``report`` attached for the
    partial trajectory.
    """
    problem = ODEProblem(prob.n, prob.c, 0.0, 1.0, 1.0)
    try:
        traj = integrate(problem, prob.r_max, rtol, atol)
    except StiffnessError as exc:
        part = exc.trajectory
        exc.report = _shooting_report(part, prob.delta) if part is not None and len(part) > 1 else None
        raise
    return traj, _shooting_report(traj, prob.delta)


# origin classification -----------------------------------------------------


class Verdict(str, enum.Enum):
    FLAT_DISK = "FlatDiskSL"
    HALF_CYLINDER = "HalfCylinder"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ClassificationReport:
    c_limit: float | str
    verdict: Verdict
    theta_const: float | None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "c_limit": self.c_limit,
            "verdict": self.verdict.value,
            "theta_const": self.theta_const,
            "diagnostics": self.diagnostics,
        }


def richardson_table(values, ratio=2.0):
    """Richardson tableau for samples at radii r_k = r_0 ratio^k.

    Assumes an error expansion in integer powers of r. Returns the rows of
    the tableau; ``rows[m][0]`` is the order-m estimate of the limit r -> 0.
    """
    rows = [list(values)]
    for m in range(1, len(values)):
        prev = rows[-1]
        fac = ratio**m
        rows.append([(fac * prev[i] - prev[i + 1]) / (fac - 1.0) for i in range(len(prev) - 1)])
    return rows


def classify_origin(traj: Trajectory, zero_tol=ZERO_TOL, depth=RICHARDSON_DEPTH, fi_tol=1e-8):
    """Decide which alternative of the origin dichotomy a trajectory follows.

    v is sampled on r_k = r_inner 2^k (k = 0..depth) and extrapolated to 0.
    The limit counts as resolved when the last two extrapolants agree to
    1e-3 (relative, with an absolute floor of zero_tol * max(1, r_outer)).
    A resolved limit below that floor together with a vanishing first
    integral gives FlatDiskSL; a resolved nonzero limit gives HalfCylinder.
    """
    if len(traj) < 2:
        raise InsufficientDataError("trajectory has fewer than two samples")
    r_inner, r_outer = traj.span
    reached_origin = any(ev.kind is EventKind.ORIGIN_APPROACH for ev in traj.events)
    if not (r_inner <= 1e-3 * r_outer or reached_origin):
        raise InsufficientDataError(f"inner radius {r_inner} is not close enough to the origin (outer {r_outer})")
    if r_inner <= 0:
        raise InsufficientDataError("inner endpoint is the origin itself")
    radii = [r_inner * 2.0**k for k in range(depth + 1)]
    if radii[-1] > r_outer:
        raise InsufficientDataError("too few samples near the origin for extrapolation")
    vals = [traj.sample_jet(r).up for r in radii]
    table = richardson_table(vals)
    diag_est = [row[0] for row in table]
    floor = zero_tol * max(1.0, r_outer)
    c_est = traj.c_est
    fi = float(np.nanmax(np.abs(c_est))) if np.any(np.isfinite(c_est)) else math.nan
    diagnostics = {
        "radii": radii,
        "v": vals,
        "estimates": diag_est,
        "first_integral": fi,
        "extrapolation": f"Richardson, integer powers of r, depth {depth}",
    }

    best = diag_est[-1]
    if not all(math.isfinite(x) for x in vals) or abs(best) > 1e8:
        return ClassificationReport("diverged", Verdict.UNDETERMINED, None, diagnostics)
    change = abs(diag_est[-1] - diag_est[-2])
    if change > STABILITY_RTOL * max(abs(best), floor):
        diagnostics["unresolved_change"] = change
        return ClassificationReport("undetermined", Verdict.UNDETERMINED, None, diagnostics)

    if abs(best) <= floor:
        if fi <= fi_tol:
            theta = float(np.nanmedian(traj.theta))
            return ClassificationReport(best, Verdict.FLAT_DISK, theta, diagnostics)
        return ClassificationReport(best, Verdict.UNDETERMINED, None, diagnostics)
    return ClassificationReport(best, Verdict.HALF_CYLINDER, None, diagnostics)


def backward_to_origin(n, c, r0, v0, w0, r_stop=ORIGIN_STOP, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    return integrate(ODEProblem(n, c, r0, v0, w0, "backward"), r_stop, rtol, atol)


def origin_sweep(count=20, seed=0, n=3, c=-2.0, v_range=(0.5, 3.0), w_range=(-1.0, 1.0),
                 r0=1.0, workers=None, max_draws=None):
    """Backward integrations from seeded random starts, each classified at 0.

    Starts whose backward solution leaves the class of radial graphs before
    reaching the origin (a BlowUp event) are not solutions on (0, r0) and
    are skipped; draws continue until ``count`` solutions reach the origin.
    Returns ``(results, skipped)`` where each result is a dict.
    """
    rng = np.random.default_rng(seed)
    max_draws = max_draws or 10 * count

    def run(start):
        v0, w0 = start
        traj = backward_to_origin(n, c, r0, v0, w0)
        out = {"v0": v0, "w0": w0, "events": [ev.to_dict() for ev in traj.events]}
        if traj.terminal_event is None or traj.terminal_event.kind is not EventKind.DOMAIN_END:
            out["reached_origin"] = False
            return out
        rep = classify_origin(traj)
        r_inner = traj.span[0]
        near = traj.r <= 100 * r_inner
        out.update(
            reached_origin=True,
            verdict=rep.verdict.value,
            c_limit=rep.c_limit,
            min_abs_v_near_origin=float(np.abs(traj.v[near]).min()),
        )
        return out

    results, skipped = [], []
    draws = 0
    pool = ThreadPoolExecutor(workers) if workers else None
    try:
        while len(results) < count and draws < max_draws:
            batch = [(float(rng.uniform(*v_range)), float(rng.uniform(*w_range)))
                     for _ in range(count - len(results))]
            draws += len(batch)
            outs = list(pool.map(run, batch)) if pool else [run(s) for s in batch]
            for out in outs:
                (results if out["reached_origin"] else skipped).append(out)
    finally:
        if pool:
            pool.shutdown()
    return results, skipped


# energy and volume -----------------------------------------------------------


@dataclass(frozen=True)
class EnergyReport:
    quad_value: float
    formula_value: float
    rel_dev: float
    c: float

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _jet_source(source):
    """(n, jet(r), breakpoints, first-integral) for a trajectory or potential."""
    if isinstance(source, Trajectory):
        return source.n, source.sample_jet, tuple(source.r.tolist()), source.c, source.span
    if isinstance(source, RadialPotential):
        traj = getattr(source.form, "trajectory", None)
        breaks = tuple(traj.r.tolist()) if traj is not None else ()
        return source.n, source.jet, breaks, None, source.domain
    raise InputError(f"expected a Trajectory or RadialPotential, got {type(source).__name__}")


def dirichlet_energy(source, a, b, tol=QUAD_TOL):
    """Dirichlet energy of the phase over the annulus a < r < b.

    quad_value integrates Vol(S^{n-1}) C^2 g_rr / sqrt(g) dr; the closed
    form is C Vol(S^{n-1}) (theta(b) - theta(a)). For a potential C is read
    from the jet at ``a``.
    """
    n, jet, breaks, c, (lo, hi) = _jet_source(source)
    if not (0 < a < b and lo <= a and b <= hi):
        raise RangeError(f"energy window ({a}, {b}) not inside the domain [{lo}, {hi}]")
    if c is None:
        from .geometry import first_integral

        c = first_integral(n, jet(a)).c
    c2 = c * c

    def density(r):
        j = jet(r)
        m = metric(n, j)
        return c2 * m.g_rr / m.sqrt_g

    vol = sphere_volume(n)
    quad = vol * adaptive_simpson(density, a, b, tol, breakpoints=breaks)
    formula = c * vol * (phase(n, jet(b)).theta - phase(n, jet(a)).theta)
    return EnergyReport(quad, formula, abs(quad - formula) / max(1.0, abs(formula)), c)


def _density(n, j: JetSample):
    return metric(n, j).sqrt_g


def _safe(f):
    def wrapped(r):
        try:
            val = f(r)
        except (HamstatError, ZeroDivisionError, OverflowError) as exc:
            raise EvaluationError(f"cannot evaluate the volume density at r={r}: {exc}") from exc
        if not math.isfinite(val):
            raise EvaluationError(f"non-finite volume density at r={r}")
        return val

    return wrapped


def graph_volume(potential: RadialPotential, a, b, tol=QUAD_TOL):
    """Volume of the gradient graph over the annulus a < |x| < b (a may be 0)."""
    lo, hi = potential.domain
    if not (0 <= a < b and lo <= a and b <= hi):
        raise RangeError(f"[{a}, {b}] is not inside the domain [{lo}, {hi}]")
    n = potential.n
    _, _, breaks, _, _ = _jet_source(potential)
    f = _safe(lambda r: _density(n, potential.jet(r)))
    return sphere_volume(n) * adaptive_simpson(f, a, b, tol, breakpoints=breaks)


@dataclass(frozen=True)
class Bump:
    """Compactly supported radial bump on [center - width, center + width].

    Two profiles are available, both scaled so that eta(center) = amplitude:

    ``"quartic"`` (default)
        (1 - s^2)^2 with s = (r - center) / width. eta' is continuous but
        eta'' jumps to 8 amplitude / width^2 at the ends of the support.
    ``"bspline"``
        The cardinal quartic B-spline on six equally spaced knots spanning
        the support. It is piecewise quartic and C^2.
    """

    center: float
    width: float
    amplitude: float = 1.0
    profile: str = "quartic"

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.center) and math.isfinite(self.amplitude)):
            raise InputError(f"invalid bump {self}")
        if self.profile not in ("quartic", "bspline"):
            raise InputError(f"unknown bump profile {self.profile!r}")

    @property
    def support(self):
        return self.center - self.width, self.center + self.width

    @property
    def knots(self):
        """Points where the integrand of a variation may lose smoothness."""
        if self.profile == "quartic":
            return (self.center,)
        return tuple(self.center + self.width * (0.4 * k - 1.0) for k in range(6))

    def value(self, r):
        s = (r - self.center) / self.width
        if abs(s) >= 1:
            return 0.0
        if self.profile == "quartic":
            return self.amplitude * (1.0 - s * s) ** 2
        x = 2.5 * (1.0 - abs(s))
        b = sum((-1) ** j * math.comb(5, j) * (x - j) ** 4 for j in range(3) if x > j) / 24.0
        return self.amplitude * b / _BSPLINE_PEAK

    def derivatives(self, r):
        """(eta', eta'') at r."""
        s = (r - self.center) / self.width
        if abs(s) >= 1:
            return 0.0, 0.0
        a = self.amplitude
        if self.profile == "quartic":
            q = 1.0 - s * s
            return a * (-4.0 * s * q / self.width), a * (12.0 * s * s - 4.0) / self.width**2
        # knot coordinate folded onto [0, 2.5] so the truncated power sums
        # never cancel large terms
        x = 2.5 * (1.0 - abs(s))
        mirror = 1.0 if s <= 0 else -1.0
        d1 = sum((-1) ** j * math.comb(5, j) * (x - j) ** 3 for j in range(3) if x > j) / 6.0
        d2 = sum((-1) ** j * math.comb(5, j) * (x - j) ** 2 for j in range(3) if x > j) / 2.0
        dx = 2.5 / self.width
        scale = a / _BSPLINE_PEAK
        return mirror * scale * d1 * dx, scale * d2 * dx * dx


_BSPLINE_PEAK = 115.0 / 192.0


def first_variation(potential: RadialPotential, bump: Bump, h=1e-4, tol=QUAD_TOL):
    """Central difference (F(u + h eta) - F(u - h eta)) / (2h) of the volume.

    Only the support of eta contributes. The difference is taken inside the
    integral and evaluated without cancellation, so neither quadrature
    error nor rounding is amplified by 1/(2h).
    """
    if not h > 0:
        raise InputError(f"step h must be positive, got {h}")
    lo, hi = bump.support
    dlo, dhi = potential.domain
    if not (dlo < lo and hi < dhi and lo > 0):
        raise RangeError(f"bump support ({lo}, {hi}) is not strictly inside the domain {potential.domain}")
    if bump.amplitude == 0:
        return 0.0
    n = potential.n

    def diff_density(r):
        j = potential.jet(r)
        e1, e2 = bump.derivatives(r)
        p_minus = j.upp - h * e2
        q_minus = j.up - h * e1
        base = _density(n, JetSample(r, j.u, q_minus, p_minus))
        # log rho(+) - log rho(-) from exact differences of squares, so the
        # difference keeps full relative precision even for tiny h
        dlog = 0.5 * math.log1p(4.0 * h * e2 * j.upp / (1.0 + p_minus * p_minus)) + 0.5 * (n - 1) * math.log1p(
            4.0 * h * e1 * j.up / (r * r + q_minus * q_minus)
        )
        return base * math.expm1(dlog) / (2.0 * h)

    return sphere_volume(n) * adaptive_simpson(_safe(diff_density), lo, hi, tol, breakpoints=bump.knots)


@dataclass(frozen=True)
class CalibrationResult:
    vol_graph: float
    vol_quadratic: float
    theta_match: bool
    theta_rho: float
    max_phase_deviation: float

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _origin_integrable(potential, rho):
    """Log-log slope test for the volume density near r = 0."""
    n = potential.n
    r1, r2 = 1e-7 * rho, 1e-6 * rho
    try:
        d1 = _density(n, potential.jet(r1))
        d2 = _density(n, potential.jet(r2))
    except (HamstatError, OverflowError) as exc:
        raise DivergenceError(f"volume density not evaluable near the origin: {exc}") from exc
    slope = math.log(d2 / d1) / math.log(r2 / r1)
    return slope > -1.0 + 1e-3, slope


def calibration_compare(potential: RadialPotential, rho, samples=64, tol=QUAD_TOL):
    """Compare the graph volume over B_rho with that of the matching quadratic.

    The comparison potential is u'(rho) |x|^2 / (2 rho), which has the same
    gradient on the sphere of radius rho. ``theta_match`` holds when the
    phase of ``potential`` is constant on (0, rho] and equals
    n arctan(u'(rho)/rho); then the two volumes must coincide.
    """
    lo, hi = potential.domain
    if not (lo < rho < hi or (lo == 0 and 0 < rho < hi)):
        raise RangeError(f"rho={rho} not in the interior of the domain {potential.domain}")
    n = potential.n
    j_rho = potential.jet(rho)
    k = j_rho.up / rho
    if not math.isfinite(k):
        raise InputError("u'(rho) is not finite")

    a = 0.0
    try:
        potential.jet(0.0)
    except (DomainError, RangeError, ZeroDivisionError, HamstatError):
        ok, slope = _origin_integrable(potential, rho)
        if not ok:
            raise DivergenceError(f"volume integral diverges at the origin (density ~ r^{slope:.3f})")
        a = max(lo, 1e-12 * rho)
    vol_graph = graph_volume(potential, a, rho, tol)
    quad = RadialPotential(n, Quadratic(k), (0.0, math.inf))
    vol_quad = graph_volume(quad, 0.0, rho, tol)

    theta_rho = n * math.atan(k)
    radii = [max(lo, 0.0) + (rho - max(lo, 0.0)) * (i / samples) for i in range(1, samples + 1)]
    dev = max(abs(phase(n, potential.jet(r)).theta - theta_rho) for r in radii)
    return CalibrationResult(vol_graph, vol_quad, dev <= 1e-8, theta_rho, dev)

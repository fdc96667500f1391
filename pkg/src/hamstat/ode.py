"""Adaptive integration of the reduced radial equation in v = u'.

Writing w = v', the fourth-order radial problem becomes the first-order system

    v' = w
    w' = (1 + w^2) [ C (1 + w^2)^{1/2} / (r^2 + v^2)^{(n-1)/2}
                     - (n - 1) (w r - v) / (r^2 + v^2) ]

which is integrated with the Dormand-Prince 5(4) embedded pair. Samples
store (r, v, w, w'), so every step carries a cubic Hermite interpolant in
both v and w. The phase is recomputed from the arctan formula at each
sample rather than integrated.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, RangeError, SingularityError, StiffnessError
from .geometry import JetSample, first_integral_values, phase_values

__all__ = [
    "ODEProblem",
    "EventKind",
    "Event",
    "Trajectory",
    "rhs",
    "integrate",
    "sample_jet",
    "trajectory_from_potential",
    "DEFAULT_RTOL",
    "DEFAULT_ATOL",
]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12

BLOWUP_SLOPE = 1e12
# |w| reachable before the step floor is hit near a vertical tangent, where
# w ~ (r - r*)^(-1/2); an underflow above this slope is reported as BlowUp
UNDERFLOW_BLOWUP_SLOPE = 1e4
ORIGIN_RADIUS = 1e-12
ORIGIN_NORM2 = 1e-24

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# fifth-order minus embedded fourth-order weights (7 stages, FSAL)
# continuous extension of the pair (Shampine), used only to police the
# accuracy of the cubic Hermite dense output at step midpoints
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])
_MID_WEIGHTS = _P @ np.array([0.5, 0.25, 0.125, 0.0625])
DENSE_SAFETY = 10.0

_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

# the same coefficients as arrays so a step is a handful of small matmuls
_A_ROWS = tuple(np.array(row) for row in _A)
_B_VEC = np.array(_B)
_E_VEC = np.array(_E)


class EventKind(str, enum.Enum):
    VZERO = "VZero"
    BLOWUP = "BlowUp"
    ORIGIN_APPROACH = "OriginApproach"
    DOMAIN_END = "DomainEnd"


TERMINAL = {EventKind.BLOWUP, EventKind.ORIGIN_APPROACH, EventKind.DOMAIN_END}


@dataclass(frozen=True)
class Event:
    kind: EventKind
    r: float
    payload: tuple  # (v, w) at the event

    def to_dict(self):
        return {"kind": self.kind.value, "r": self.r, "v": self.payload[0], "w": self.payload[1]}


@dataclass(frozen=True)
class ODEProblem:
    """Initial value problem for the reduced equation.

    ``c`` is the first integral; ``c = -(n - 1)`` is the shooting family
    F_lambda = 0 with lambda = n - 1.
    """

    n: float
    c: float
    r0: float
    v0: float
    w0: float
    direction: str = "forward"

    def __post_init__(self):
        for name in ("n", "c", "r0", "v0", "w0"):
            val = getattr(self, name)
            if not isinstance(val, (int, float, np.floating, np.integer)) or not math.isfinite(val):
                raise InputError(f"{name} must be a finite number, got {val!r}")
        if self.n < 2:
            raise InputError(f"dimension n must be >= 2, got {self.n}")
        if self.r0 < 0:
            raise InputError(f"r0 must be >= 0, got {self.r0}")
        if self.r0 == 0 and self.v0 == 0:
            raise InputError("r0 = 0 requires v0 != 0 (right-hand side singular)")
        if self.direction not in ("forward", "backward"):
            raise InputError(f"direction must be 'forward' or 'backward', got {self.direction!r}")
        if self.direction == "backward" and self.r0 == 0:
            raise InputError("cannot integrate backward from r0 = 0")


def rhs(n, c, r, v, w):
    """Return (v', w') of the reduced system at state (r, v, w)."""
    rho2 = r * r + v * v
    if rho2 == 0:
        raise SingularityError("r^2 + v^2 = 0")
    q = 1.0 + w * w
    bracket = c * math.sqrt(q) / rho2 ** ((n - 1) / 2) - (n - 1) * (w * r - v) / rho2
    return w, q * bracket


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Ordered samples of a solution of the reduced equation.

    Arrays are read-only. ``r`` is strictly monotone in the integration
    direction. ``dw`` holds w' = v'' evaluated from the right-hand side, so
    each interval carries a cubic Hermite interpolant for v (data v, w) and
    for w (data w, dw).
    """

    r: np.ndarray
    v: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    problem: ODEProblem
    events: tuple = ()
    tolerances: tuple = (DEFAULT_RTOL, DEFAULT_ATOL)
    theta: np.ndarray = field(init=False)
    u: np.ndarray = field(init=False)

    def __post_init__(self):
        for name in ("r", "v", "w", "dw"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.problem.n
        with np.errstate(divide="ignore", invalid="ignore"):
            theta = phase_values(n, self.r, self.v, self.w) if len(self.r) else np.empty(0)
        theta = np.where(self.r > 0, theta, np.nan)
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        u = np.zeros_like(self.r)
        if len(self.r) > 1:
            h = np.diff(self.r)
            pieces = h / 2 * (self.v[:-1] + self.v[1:]) + h * h / 12 * (self.w[:-1] - self.w[1:])
            u[1:] = np.cumsum(pieces)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self):
        return len(self.r)

    @property
    def n(self):
        return self.problem.n

    @property
    def c(self):
        return self.problem.c

    @property
    def samples(self):
        return list(zip(self.r.tolist(), self.v.tolist(), self.w.tolist(), self.theta.tolist()))

    @property
    def span(self):
        if len(self.r) == 0:
            return (math.nan, math.nan)
        return (float(self.r.min()), float(self.r.max()))

    @property
    def c_est(self):
        """First integral recovered at each sample from the jet (r, v, w, w')."""
        with np.errstate(divide="ignore", invalid="ignore"):
            c = first_integral_values(self.n, self.r, self.v, self.w, self.dw)
        return np.where(self.r > 0, c, np.nan)

    @property
    def dense(self):
        """Per-interval cubic coefficients, shape (N-1, 2, 4).

        Row 0 is v, row 1 is w; coefficients are in powers of (r - r_i).
        """
        h = np.diff(self.r)
        out = np.empty((len(h), 2, 4))
        for row, (y, dy) in enumerate(((self.v, self.w), (self.w, self.dw))):
            y0, y1, d0, d1 = y[:-1], y[1:], dy[:-1], dy[1:]
            slope = (y1 - y0) / h
            out[:, row, 0] = y0
            out[:, row, 1] = d0
            out[:, row, 2] = (3 * slope - 2 * d0 - d1) / h
            out[:, row, 3] = (d0 + d1 - 2 * slope) / (h * h)
        return out

    @property
    def terminal_event(self):
        for ev in self.events:
            if ev.kind in TERMINAL:
                return ev
        return None

    def sample_jet(self, r):
        return sample_jet(self, r)

    def _locate(self, r):
        lo, hi = self.span
        tol = 1e-14 * max(1.0, abs(hi))
        if not (lo - tol <= r <= hi + tol) or len(self.r) == 0:
            raise RangeError(f"r={r} outside trajectory span [{lo}, {hi}]")
        if self.r[0] <= self.r[-1]:
            i = int(np.searchsorted(self.r, r))
            if i < len(self.r) and self.r[i] == r:
                return i, True
            i = min(max(i - 1, 0), len(self.r) - 2)
        else:
            rev = self.r[::-1]
            j = int(np.searchsorted(rev, r))
            if j < len(rev) and rev[j] == r:
                return len(self.r) - 1 - j, True
            j = min(max(j - 1, 0), len(rev) - 2)
            i = len(self.r) - 2 - j
        return i, False


def _hermite(y0, y1, d0, d1, h, s):
    """Value, derivative and antiderivative (from 0) of the cubic Hermite at offset s."""
    t = s / h
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    val = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    dval = ((6 * t**2 - 6 * t) * y0 + (3 * t**2 - 4 * t + 1) * h * d0 + (-6 * t**2 + 6 * t) * y1
            + (3 * t**2 - 2 * t) * h * d1) / h
    ival = h * (
        (t**4 / 2 - t**3 + t) * y0
        + (t**4 / 4 - 2 * t**3 / 3 + t**2 / 2) * h * d0
        + (-(t**4) / 2 + t**3) * y1
        + (t**4 / 4 - t**3 / 3) * h * d1
    )
    return val, dval, ival


def sample_jet(traj: Trajectory, r) -> JetSample:
    """Jet of the trajectory at radius ``r`` via dense output.

    u is the cumulative integral of v from r0 (u(r0) = 0) and u''' is the
    derivative of the interpolant for w.
    """
    i, exact = traj._locate(r)
    if exact:
        return JetSample(float(traj.r[i]), float(traj.u[i]), float(traj.v[i]), float(traj.w[i]), float(traj.dw[i]))
    h = traj.r[i + 1] - traj.r[i]
    s = r - traj.r[i]
    v, w, iv = _hermite(traj.v[i], traj.v[i + 1], traj.w[i], traj.w[i + 1], h, s)
    w2, dw, _ = _hermite(traj.w[i], traj.w[i + 1], traj.dw[i], traj.dw[i + 1], h, s)
    # v' from the v-interpolant and w from the w-interpolant agree to interpolation
    # error; the w-interpolant is used so that (u'', u''') come from one cubic
    return JetSample(float(r), float(traj.u[i] + iv), float(v), float(w2), float(dw))


def trajectory_from_potential(potential, radii, c=None):
    """Build a trajectory by sampling an exact potential at ``radii``.

    Useful as a noise-free reference for the analysis routines. ``c``
    defaults to the first integral recovered at the first radius.
    """
    jets = [potential.jet(float(r)) for r in radii]
    if c is None:
        from .geometry import first_integral

        c = first_integral(potential.n, jets[0]).c
    direction = "forward" if jets[0].r < jets[-1].r else "backward"
    problem = ODEProblem(potential.n, float(c), jets[0].r, jets[0].up, jets[0].upp, direction)
    return Trajectory(
        [j.r for j in jets], [j.up for j in jets], [j.upp for j in jets], [j.uppp for j in jets],
        problem, (), (0.0, 0.0),
    )


# integrator ----------------------------------------------------------------


def _initial_step(f, r0, y0, f0, direction, rtol, atol, max_step):
    scale = atol + np.abs(y0) * rtol
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    try:
        f1 = f(r0 + direction * h0, y0 + direction * h0 * f0)
        d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    except (SingularityError, OverflowError):
        return h0 * 1e-3
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, max_step)


def integrate(problem: ODEProblem, r_end, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, max_steps=200_000):
    """Integrate ``problem`` from r0 to ``r_end``.

    Stops early at the first terminal event (BlowUp when |w| > 1e12,
    OriginApproach when r < 1e-12 or r^2 + v^2 < 1e-24). Sign changes of v
    are recorded as non-terminal VZero events located on the interpolant.
    Raises :class:`StiffnessError` carrying the partial trajectory if the
    step size underflows.
    """
    if not (rtol > 0 and atol > 0):
        raise InputError("tolerances must be positive")
    if not math.isfinite(r_end) or r_end < 0:
        raise InputError(f"r_end must be finite and >= 0, got {r_end}")
    direction = 1.0 if problem.direction == "forward" else -1.0
    if (r_end - problem.r0) * direction <= 0:
        raise InputError(f"r_end={r_end} inconsistent with {problem.direction} integration from r0={problem.r0}")

    n, c = problem.n, problem.c
    span = abs(r_end - problem.r0)

    def f(r, y):
        dv, dw = rhs(n, c, r, y[0], y[1])
        return np.array([dv, dw])

    def max_step(r):
        if direction < 0:
            return min(0.1 * span, 0.5 * r)
        return 0.1 * span

    r = problem.r0
    y = np.array([problem.v0, problem.w0], dtype=float)
    k1 = f(r, y)
    rs, vs, ws, dws = [r], [y[0]], [y[1]], [k1[1]]
    events = []
    h = _initial_step(f, r, y, k1, direction, rtol, atol, max_step(r))
    h_min = 1e-15 * span

    def partial():
        return Trajectory(rs, vs, ws, dws, problem, events, (rtol, atol))

    for _ in range(max_steps):
        remaining = abs(r_end - r)
        h = min(h, max_step(r), remaining)
        if h < h_min and h < remaining:
            if abs(y[1]) > UNDERFLOW_BLOWUP_SLOPE and _slope_growing(ws):
                events.append(Event(EventKind.BLOWUP, r, (y[0], y[1])))
                return partial()
            raise StiffnessError(f"step size underflow at r={r} (h={h:.3e})", partial())
        try:
            y_new, k7, err, dense_err = _dp_step(f, r, y, k1, direction * h)
            ok = all(math.isfinite(x) for x in (*y_new, *err, *dense_err))
        except (SingularityError, OverflowError, ZeroDivisionError):
            ok = False
        if not ok:
            h *= 0.25
            continue
        s0 = atol + rtol * max(abs(y[0]), abs(y_new[0]))
        s1 = atol + rtol * max(abs(y[1]), abs(y_new[1]))
        err_norm = math.sqrt(0.5 * ((err[0] / s0) ** 2 + (err[1] / s1) ** 2))
        dense_norm = max(abs(dense_err[0]) / s0, abs(dense_err[1]) / s1)
        if err_norm > 1.0:
            h *= max(0.2, 0.9 * err_norm ** (-0.2))
            continue
        if dense_norm > 1.0:
            # Hermite error scales like h^4
            h *= max(0.2, 0.9 * dense_norm ** (-0.25))
            continue

        r_new = r_end if h == remaining else r + direction * h
        v_old = y[0]
        r_old = r
        r, y, k1 = r_new, y_new, k7
        rs.append(r)
        vs.append(y[0])
        ws.append(y[1])
        dws.append(k7[1])

        if v_old * y[0] < 0 or (y[0] == 0 and v_old != 0):
            events.append(_locate_vzero(rs, vs, ws, r_old, r))
        if abs(y[1]) > BLOWUP_SLOPE:
            events.append(Event(EventKind.BLOWUP, r, (y[0], y[1])))
            return partial()
        if r < ORIGIN_RADIUS or r * r + y[0] * y[0] < ORIGIN_NORM2:
            events.append(Event(EventKind.ORIGIN_APPROACH, r, (y[0], y[1])))
            return partial()
        if r == r_end:
            events.append(Event(EventKind.DOMAIN_END, r, (y[0], y[1])))
            return partial()

        grow = min(err_norm ** -0.2 if err_norm else 10.0, dense_norm ** -0.25 if dense_norm else 10.0)
        factor = min(10.0, max(0.2, 0.9 * grow))
        h *= factor
    raise StiffnessError(f"exceeded {max_steps} steps before r_end", partial())


def _slope_growing(ws, k=5):
    tail = np.abs(np.asarray(ws[-k:]))
    return len(tail) == k and bool(np.all(np.diff(tail) > 0))


def _dp_step(f, r, y, k1, h):
    ks = np.empty((7, 2))
    ks[0] = k1
    for i in range(1, 6):
        ks[i] = f(r + _C[i] * h, y + h * (_A_ROWS[i] @ ks[:i]))
    y_new = y + h * (_B_VEC @ ks[:6])
    k7 = f(r + h, y_new)
    ks[6] = k7
    err = h * (_E_VEC @ ks)
    # Hermite midpoint minus the pair's fourth-order continuous extension
    y_mid = y + h * (_MID_WEIGHTS @ ks)
    herm_mid = 0.5 * (y + y_new) + h / 8 * (k1 - k7)
    dense_err = DENSE_SAFETY * (herm_mid - y_mid)
    return y_new, k7, err, dense_err


def _locate_vzero(rs, vs, ws, r_old, r_new):
    v0, v1, w0, w1 = vs[-2], vs[-1], ws[-2], ws[-1]
    h = r_new - r_old
    if v1 == 0:
        return Event(EventKind.VZERO, r_new, (0.0, w1))

    def v_at(s):
        return _hermite(v0, v1, w0, w1, h, s)[0]

    lo, hi = min(0.0, h), max(0.0, h)
    s = brentq(v_at, lo, hi, xtol=1e-15 * max(1.0, abs(r_new)), rtol=4 * np.finfo(float).eps)
    w = _hermite(v0, v1, w0, w1, h, s)[1]
    return Event(EventKind.VZERO, float(r_old + s), (0.0, float(w)))

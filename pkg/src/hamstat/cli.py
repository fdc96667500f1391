"""Command-line interface: ``hamstat <command> [flags]``.

Parameters come from an optional JSON file (``--config``) overlaid by
command-line flags. Each command has a fixed parameter schema and unknown
keys are rejected. Exit status is 0 on success, 1 when ``verify`` finds a
failing check or a computation fails, and 2 on invalid input.

``--sweep key=v1,v2,...`` (or ``key=start:stop:count``) runs one command per
value of a numeric parameter concurrently and writes indexed output files
``stem.000.ext``, ``stem.001.ext``, ...
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acceptance
from .analysis import (
    ShootingProblem,
    backward_to_origin,
    calibration_compare,
    classify_origin,
    dirichlet_energy,
    graph_volume,
    origin_sweep,
    shoot_existence,
)
from .closed_forms import (
    SL2D,
    ClosedForm2DParams,
    RadialPotential,
    RadialProfile,
    Sampled,
    explicit_example,
    lewy_yuan_rotate,
    make_quadratic,
)
from .errors import HamstatError, InputError
from .io import Check, ReportEnvelope, trajectory_text, write_text
from .ode import DEFAULT_ATOL, DEFAULT_RTOL, ODEProblem, integrate

__all__ = ["RunConfig", "UsageError", "build_config", "run", "main"]

COMMANDS = ("solve", "shoot", "classify", "energy", "volume", "family2d", "rotate", "verify")
REQUIRED = object()

_ODE = {"n": REQUIRED, "c": REQUIRED, "r0": REQUIRED, "v0": REQUIRED, "w0": REQUIRED,
        "rtol": DEFAULT_RTOL, "atol": DEFAULT_ATOL}
# a profile source is either a named potential or an initial value problem
_SOURCE = {"potential": None, "n": None, "theta": None, "c": None, "r0": None, "v0": None, "w0": None,
           "rtol": DEFAULT_RTOL, "atol": DEFAULT_ATOL}

SCHEMAS = {
    "solve": {**_ODE, "r_end": REQUIRED},
    "shoot": {"lambda": REQUIRED, "r_end": 10.0, "rtol": DEFAULT_RTOL, "atol": DEFAULT_ATOL},
    "classify": {"n": 3, "c": -2.0, "r0": 1.0, "v0": None, "w0": None, "r_end": 1e-6, "seed": None,
                 "count": 20, "rtol": DEFAULT_RTOL, "atol": DEFAULT_ATOL},
    "energy": {**_SOURCE, "a": REQUIRED, "b": REQUIRED},
    "volume": {**_SOURCE, "a": 0.0, "b": REQUIRED, "rho": None},
    "family2d": {"a": REQUIRED, "b": REQUIRED, "v0": REQUIRED, "theta": REQUIRED, "branch": None,
                 "samples": 101},
    "rotate": {**_SOURCE, "a": REQUIRED, "b": REQUIRED, "alpha": REQUIRED, "samples": 201},
    "verify": {"suite": "all"},
}
INTEGER_KEYS = {"seed", "count", "samples", "branch"}
STRING_KEYS = {"potential", "suite"}
POTENTIALS = ("linear", "log", "quadratic")
TRAJECTORY_COMMANDS = ("solve", "shoot")


class UsageError(InputError):
    """Invalid command-line or config input; maps to exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict
    output_path: str | None = None
    format: str = "json"
    sweep: tuple = field(default=())

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")


# ---------------------------------------------------------------------------
# parameter handling


def _coerce(key, value):
    if value is None:
        return None
    if key in STRING_KEYS:
        return str(value)
    try:
        if key in INTEGER_KEYS:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        x = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"parameter {key!r} must be numeric, got {value!r}") from None
    if not math.isfinite(x):
        raise UsageError(f"parameter {key!r} must be finite, got {value!r}")
    return x


def validate_params(command, params):
    """Fill defaults, coerce types and reject unknown or missing keys."""
    schema = SCHEMAS[command]
    for key in params:
        if key not in schema:
            raise UsageError(f"unknown parameter {key!r} for command {command!r}")
    out = {}
    for key, default in schema.items():
        value = params.get(key, None if default is REQUIRED else default)
        if value is None and default is REQUIRED:
            raise UsageError(f"command {command!r} needs parameter {key!r}")
        out[key] = _coerce(key, value)
    return out


def _parse_sweep(text):
    if "=" not in text:
        raise UsageError(f"--sweep expects key=values, got {text!r}")
    key, spec = text.split("=", 1)
    key = key.strip().replace("-", "_")
    try:
        if ":" in spec:
            start, stop, num = spec.split(":")
            values = np.linspace(float(start), float(stop), int(num)).tolist()
        else:
            values = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse sweep values {spec!r}") from None
    if not values:
        raise UsageError("--sweep needs at least one value")
    return key, tuple(values)


def _parser():
    p = argparse.ArgumentParser(prog="hamstat", description="Radial Hamiltonian stationary graphs.")
    p.add_argument("command", choices=COMMANDS)
    # numeric flags default to None so that we can tell which were given
    for flag in ("n", "c", "r0", "v0", "w0", "r-end", "rtol", "atol", "rho", "a", "b", "theta", "alpha"):
        p.add_argument(f"--{flag}", type=float, default=None)
    p.add_argument("--lambda", dest="lambda_", type=float, default=None)
    p.add_argument("--branch", type=int, choices=(-1, 1), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--potential", choices=POTENTIALS, default=None)
    p.add_argument("--suite", default=None, help="'all' or a comma separated list of criterion numbers")
    p.add_argument("--out", default=None, help="output file; standard output when omitted")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--config", default=None, help="JSON file of parameters; flags override it")
    p.add_argument("--sweep", default=None, help="key=v1,v2,... or key=start:stop:count")
    return p


def build_config(argv) -> RunConfig:
    args = _parser().parse_args(argv)
    params = {}
    fmt = out = sweep = None
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        fmt = loaded.pop("format", None)
        out = loaded.pop("out", None)
        sweep = loaded.pop("sweep", None)
        params.update(loaded)
    flags = {k: v for k, v in vars(args).items() if v is not None}
    for meta in ("command", "config"):
        flags.pop(meta, None)
    fmt = flags.pop("format", fmt)
    out = flags.pop("out", out)
    sweep = flags.pop("sweep", sweep)
    if "lambda_" in flags:
        flags["lambda"] = flags.pop("lambda_")
    params.update(flags)
    sweep_spec = _parse_sweep(sweep) if sweep else ()
    if sweep_spec and sweep_spec[0] not in SCHEMAS[args.command]:
        raise UsageError(f"cannot sweep unknown parameter {sweep_spec[0]!r} for {args.command!r}")
    if fmt is None:
        fmt = "csv" if args.command in TRAJECTORY_COMMANDS else "json"
    return RunConfig(args.command, params, out, fmt, sweep_spec)


# ---------------------------------------------------------------------------
# commands


def _ode_problem(p):
    return ODEProblem(p["n"], p["c"], p["r0"], p["v0"], p["w0"])


def _source(p, lo, hi):
    """A RadialPotential covering [lo, hi], named or integrated."""
    if p.get("potential"):
        name = p["potential"]
        if name == "linear":
            return explicit_example(3)[0] if p["n"] in (None, 3) else _bad_n(name, p["n"])
        if name == "log":
            return explicit_example(4)[0] if p["n"] in (None, 4) else _bad_n(name, p["n"])
        if p["n"] is None or p["theta"] is None:
            raise UsageError("the quadratic potential needs n and theta")
        return make_quadratic(p["n"], p["theta"])
    missing = [k for k in ("n", "c", "r0", "v0", "w0") if p.get(k) is None]
    if missing:
        raise UsageError(f"give --potential or the initial value problem; missing {', '.join(missing)}")
    prob = _ode_problem(p)
    if not prob.r0 <= lo:
        raise UsageError(f"r0={prob.r0:g} must not exceed the left end {lo:g}")
    traj = integrate(prob, hi, p["rtol"], p["atol"])
    if traj.span[1] < hi:
        raise HamstatError(f"integration stopped at r={traj.span[1]:g} before {hi:g} ({traj.terminal_event.kind.value})")
    return RadialPotential(prob.n, Sampled(traj), domain=traj.span)


def _bad_n(name, n):
    raise UsageError(f"the {name} potential is a solution only in its own dimension, got n={n:g}")


def _trajectory_summary(traj):
    return {
        "samples": len(traj),
        "span": list(traj.span),
        "final_state": {"r": traj.r[-1], "v": traj.v[-1], "w": traj.w[-1]},
        "events": [ev.to_dict() for ev in traj.events],
    }


def cmd_solve(p):
    traj = integrate(_ode_problem(p), p["r_end"], p["rtol"], p["atol"])
    return _trajectory_summary(traj), (), traj


def cmd_shoot(p):
    prob = ShootingProblem(p["lambda"], r_max=p["r_end"])
    traj, rep = shoot_existence(prob, p["rtol"], p["atol"])
    res = {**_trajectory_summary(traj), "delta": prob.delta, "invariants": rep.to_dict()}
    checks = (
        Check("v >= 1", rep.v_at_least_one, rep.min_v, 1.0),
        Check("v' > 0", rep.slope_positive, rep.min_slope, 0.0),
        Check("v - delta v' > 0", rep.delta_bound, rep.min_delta_margin, 0.0),
        Check("v <= v(delta) exp(r/delta)", rep.growth_bound, rep.max_log_growth_excess, 0.0),
    )
    return res, checks, traj


def cmd_classify(p):
    if p["v0"] is None and p["w0"] is None:
        if p["seed"] is None:
            raise UsageError("classify needs --v0 and --w0, or --seed for randomized starts")
        results, skipped = origin_sweep(p["count"], seed=p["seed"], n=p["n"], c=p["c"], r0=p["r0"])
        return {"runs": results, "skipped_blowups": skipped}, (), None
    if p["v0"] is None or p["w0"] is None:
        raise UsageError("classify needs both --v0 and --w0")
    traj = backward_to_origin(p["n"], p["c"], p["r0"], p["v0"], p["w0"], r_stop=p["r_end"],
                              rtol=p["rtol"], atol=p["atol"])
    rep = classify_origin(traj)
    return {**rep.to_dict(), "events": [ev.to_dict() for ev in traj.events]}, (), None


def cmd_energy(p):
    rep = dirichlet_energy(_source(p, p["a"], p["b"]), p["a"], p["b"])
    return rep.to_dict(), (Check("rel_dev", rep.rel_dev <= 1e-8, rep.rel_dev, 1e-8),), None


def cmd_volume(p):
    hi = max(p["b"], p["rho"] or 0.0)
    pot = _source(p, p["a"], hi)
    res = {"volume": graph_volume(pot, p["a"], p["b"])}
    if p["rho"] is not None:
        res["calibration"] = calibration_compare(pot, p["rho"]).to_dict()
    return res, (), None


def cmd_family2d(p):
    branch = p["branch"]
    params = ClosedForm2DParams.from_anchor(p["a"], 0.0, p["v0"], p["theta"], branch)
    form = SL2D(params)
    radii = np.linspace(p["a"], p["b"], p["samples"])
    jets = [form.jet(float(r)) for r in radii]
    prof = RadialProfile([j.r for j in jets], [j.up for j in jets], [j.upp for j in jets])
    res = {
        "params": {"a": params.a, "u_a": params.u_a, "up_a": params.up_a, "theta": params.theta,
                   "beta": params.beta, "branch": params.branch},
        "r": prof.r, "u": [j.u for j in jets], "v": prof.v, "dv": prof.dv, "phase": prof.phase(2),
    }
    return res, (), prof


def cmd_rotate(p):
    pot = _source(p, p["a"], p["b"])
    prof = RadialProfile.from_potential(pot, np.linspace(p["a"], p["b"], p["samples"]))
    rot = lewy_yuan_rotate(prof, p["alpha"])
    n = pot.n
    norm = float(np.max(np.abs(np.hypot(rot.r, rot.v) - np.hypot(prof.r, prof.v))))
    shift = float(np.max(np.abs(rot.phase(n) - (prof.phase(n) - n * p["alpha"]))))
    res = {"r": rot.r, "v": rot.v, "dv": rot.dv, "phase": rot.phase(n),
           "norm_deviation": norm, "phase_shift_deviation": shift,
           "arc_length": {"before": prof.arc_length(), "after": rot.arc_length()}}
    return res, (), rot


def cmd_verify(p):
    suite = p["suite"]
    if suite == "all":
        numbers = sorted(acceptance.CRITERIA)
    else:
        try:
            numbers = [int(x) for x in suite.split(",")]
        except ValueError:
            raise UsageError(f"suite must be 'all' or criterion numbers, got {suite!r}") from None
        bad = [k for k in numbers if k not in acceptance.CRITERIA]
        if bad:
            raise UsageError(f"unknown criteria {bad}")
    results = acceptance.run_suite(numbers)
    for res in results:
        print(res.summary_line(), file=sys.stderr)
    checks = tuple(
        Check(f"criterion {res.number}: {c.name}", c.passed, c.measured, c.threshold)
        for res in results for c in res.checks
    )
    return {"criteria": [res.to_dict() for res in results]}, checks, None


HANDLERS = {
    "solve": cmd_solve,
    "shoot": cmd_shoot,
    "classify": cmd_classify,
    "energy": cmd_energy,
    "volume": cmd_volume,
    "family2d": cmd_family2d,
    "rotate": cmd_rotate,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# execution


def _profile_csv(prof):
    lines = ["r,v,dv"] + [",".join(format(float(x), ".17g") for x in row) for row in zip(prof.r, prof.v, prof.dv)]
    return "\n".join(lines) + "\n"


def _emit(config: RunConfig, params, outcome, path):
    """Write one command's output; returns its envelope.

    Trajectory commands write the trajectory itself (CSV or JSON) and, when
    it goes to a file, print the envelope. Profile commands can write a
    CSV of (r, v, dv). Everything else writes the JSON envelope.
    """
    results, checks, data = outcome
    env = ReportEnvelope(config.command, params, results, tuple(checks))
    if config.command in TRAJECTORY_COMMANDS:
        text = trajectory_text(data, config.format)
        if path is not None:
            write_text(path, text)
            text = env.to_json()
    elif config.format == "csv":
        if not isinstance(data, RadialProfile):
            raise UsageError(f"command {config.command!r} has no CSV output; use --format json")
        text = _profile_csv(data)
    else:
        text = env.to_json()
    if path is not None and config.command not in TRAJECTORY_COMMANDS:
        write_text(path, text)
    else:
        sys.stdout.write(text)
    return env


def _indexed(path, i):
    if path is None:
        return None
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{i:03d}{p.suffix}"))


def run(config: RunConfig):
    """Execute a config; returns the list of envelopes (one per sweep value)."""
    if not config.sweep:
        params = validate_params(config.command, config.params)
        outcome = HANDLERS[config.command](params)
        return [_emit(config, params, outcome, config.output_path)]
    key, values = config.sweep
    all_params = [validate_params(config.command, {**config.params, key: v}) for v in values]
    with ThreadPoolExecutor() as pool:
        outcomes = list(pool.map(HANDLERS[config.command], all_params))
    # emit in index order so stdout is deterministic
    return [
        _emit(config, params, outcome, _indexed(config.output_path, i))
        for i, (params, outcome) in enumerate(zip(all_params, outcomes))
    ]


def main(argv=None):
    try:
        config = build_config(argv)
        envelopes = run(config)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except InputError as exc:
        print(f"hamstat: error: {exc}", file=sys.stderr)
        return 2
    except HamstatError as exc:
        print(f"hamstat: computation failed: {exc}", file=sys.stderr)
        return 1
    return 0 if all(env.ok for env in envelopes) else 1


if __name__ == "__main__":
    sys.exit(main())

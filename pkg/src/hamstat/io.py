"""Flat-file output for trajectories and JSON reports.

CSV files carry the columns ``r,v,dv,theta,c_est,g_rr,g_vv`` with every
value printed to 17 significant digits, which is lossless for binary64, so
re-reading a file reproduces the in-memory samples bit for bit. JSON
reports are wrapped in a :class:`ReportEnvelope` with ``schema_version``
"1" and are written with sorted keys for byte-stable output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import HamstatError, InputError

__all__ = [
    "CSV_COLUMNS",
    "SCHEMA_VERSION",
    "OutputError",
    "Check",
    "ReportEnvelope",
    "trajectory_columns",
    "trajectory_text",
    "write_trajectory",
    "write_text",
    "read_trajectory_csv",
    "write_report",
    "to_jsonable",
]

CSV_COLUMNS = ("r", "v", "dv", "theta", "c_est", "g_rr", "g_vv")
SCHEMA_VERSION = "1"


class OutputError(HamstatError, OSError):
    """Writing an output file failed; ``path`` names the destination."""

    def __init__(self, path, reason):
        super().__init__(f"cannot write {path}: {reason}")
        self.path = str(path)


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def trajectory_columns(traj):
    """The CSV columns of a trajectory as a dict of float arrays."""
    r, v, w = traj.r, traj.v, traj.w
    return {
        "r": r,
        "v": v,
        "dv": w,
        "theta": traj.theta,
        "c_est": traj.c_est,
        "g_rr": 1.0 + w * w,
        "g_vv": r * r + v * v,
    }


def to_jsonable(obj):
    """Convert reports, arrays and numpy scalars into plain JSON values.

    Non-finite floats become ``null`` so the output stays strict JSON.
    """
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def _write_text(path, text):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(path, exc.strerror or exc) from exc


def _csv_text(traj):
    cols = trajectory_columns(traj)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i in range(len(traj)):
        writer.writerow([_fmt(cols[name][i]) for name in CSV_COLUMNS])
    return buf.getvalue()


def _json_text(payload):
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def trajectory_text(traj, format="csv"):
    """The file contents :func:`write_trajectory` would write."""
    if format == "csv":
        return _csv_text(traj)
    if format == "json":
        payload = dict(trajectory_columns(traj))
        payload["events"] = [ev.to_dict() for ev in traj.events]
        return _json_text(payload)
    raise InputError(f"unknown trajectory format {format!r}")


def write_trajectory(traj, path, format="csv"):
    """Write a trajectory as CSV or JSON.

    The JSON form has one array per CSV column plus the ``events`` list.
    """
    _write_text(path, trajectory_text(traj, format))


def write_text(path, text):
    """Write ``text`` with LF line endings, raising :class:`OutputError` on failure."""
    _write_text(path, text)


def read_trajectory_csv(path):
    """Parse a file written by :func:`write_trajectory` into float arrays."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise InputError(f"{path} does not start with the header {','.join(CSV_COLUMNS)}")
    body = np.array([[float(x) for x in row] for row in rows[1:]], dtype=float).reshape(-1, len(CSV_COLUMNS))
    return {name: body[:, i] for i, name in enumerate(CSV_COLUMNS)}


@dataclass(frozen=True)
class Check:
    """One named pass/fail comparison of a measured value to a threshold."""

    name: str
    passed: bool
    measured: object
    threshold: object

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "measured": self.measured, "threshold": self.threshold}


@dataclass(frozen=True)
class ReportEnvelope:
    """Versioned wrapper around a command result.

    ``inputs`` echoes the validated parameters and ``checks`` lists the
    comparisons the command made (always nonempty for ``verify``).
    """

    command: str
    inputs: dict
    results: object
    checks: tuple = ()
    schema_version: str = field(default=SCHEMA_VERSION)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "checks": list(self.checks),
        }

    def to_json(self):
        return _json_text(self)


def write_report(envelope: ReportEnvelope, path):
    _write_text(path, envelope.to_json())

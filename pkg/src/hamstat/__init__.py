"""Numerical toolkit for radial Hamiltonian stationary gradient graphs.

The package is layered: :mod:`hamstat.geometry` evaluates the phase, metric
and first integral of a radial jet; :mod:`hamstat.closed_forms` holds the
exact solutions and the unitary rotation of profiles; :mod:`hamstat.ode`
integrates the reduced second-order equation; :mod:`hamstat.analysis`
runs the existence, classification, energy and volume procedures; and
:mod:`hamstat.cli` with :mod:`hamstat.io` exposes them as a command-line tool.
"""

from .analysis import (
    Bump,
    ClassificationReport,
    EnergyReport,
    ShootingProblem,
    Verdict,
    calibration_compare,
    classify_origin,
    dirichlet_energy,
    first_variation,
    graph_volume,
    shoot_existence,
)
from .closed_forms import (
    ClosedForm2DParams,
    RadialPotential,
    RadialProfile,
    explicit_example,
    lewy_yuan_rotate,
    make_quadratic,
    sl2d_eval,
)
from .geometry import JetSample, first_integral, hs_residual, metric, phase, sphere_volume
from .ode import EventKind, ODEProblem, Trajectory, integrate, rhs, sample_jet

__version__ = "0.1.0"

__all__ = [
    "Bump",
    "ClassificationReport",
    "EnergyReport",
    "ShootingProblem",
    "Verdict",
    "calibration_compare",
    "classify_origin",
    "dirichlet_energy",
    "first_variation",
    "graph_volume",
    "shoot_existence",
    "ClosedForm2DParams",
    "RadialPotential",
    "RadialProfile",
    "explicit_example",
    "lewy_yuan_rotate",
    "make_quadratic",
    "sl2d_eval",
    "JetSample",
    "first_integral",
    "hs_residual",
    "metric",
    "phase",
    "sphere_volume",
    "EventKind",
    "ODEProblem",
    "Trajectory",
    "integrate",
    "rhs",
    "sample_jet",
]

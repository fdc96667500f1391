"""Exception hierarchy shared by every hamstat module."""


class HamstatError(Exception):
    """Base class for all library errors."""


class InputError(HamstatError, ValueError):
    """Malformed or non-finite input."""


class DomainError(InputError):
    """A pointwise quantity was requested where it is undefined (e.g. r = 0)."""


class RangeError(InputError):
    """A radius lies outside the span of a trajectory or potential domain."""


class PhaseRangeError(InputError):
    pass


class DegeneratePhaseError(InputError):
    """sin(theta) = 0 in the two-dimensional closed form."""


class BranchDomainError(InputError):
    pass


class UnsupportedDimensionError(InputError):
    pass


class HypothesisViolation(InputError):
    """A theorem hypothesis (e.g. lambda >= 2 for shooting) does not hold."""


class SingularityError(HamstatError, ArithmeticError):
    """r^2 + u'^2 vanished, so the radial equation is singular."""


class RotationFoldError(HamstatError):
    """The rotated profile is no longer a radial graph (r-bar not monotone)."""


class InsufficientDataError(HamstatError):
    pass


class DivergenceError(HamstatError, ArithmeticError):
    pass


class EvaluationError(HamstatError):
    pass


class StiffnessError(HamstatError):
    """Step size underflow. The partial trajectory is kept on ``trajectory``."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory

"""Exception taxonomy shared across the package."""


class PencloseError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PencloseError):
    """A configuration value is missing, malformed, or out of range."""


class DegenerateInputError(PencloseError):
    """An input sits at a point where a formula is undefined."""


class OrbitCollapseError(PencloseError):
    """The oscillator orbit fell toward the origin; the step is too large."""


class PeriodDetectionError(PencloseError):
    """No full revolution of the orbit was found within the integration span."""


class ExponentOverflowError(PencloseError):
    """An exponential argument exceeds the range of float64."""


class ResolutionError(PencloseError):
    """A grid is too coarse to resolve the oscillation or e-folding width."""


class EmptyIntersectionError(PencloseError):
    """Half-plane constraints are inconsistent; their intersection is empty."""


class UnboundedRegionError(PencloseError):
    """Half-plane directions do not positively span the plane."""


class PositivityError(PencloseError):
    """A conductivity value is not bounded away from zero."""


class BudgetError(PencloseError):
    """A requested mesh exceeds the configured vertex budget."""


class NonConvergenceError(PencloseError):
    """The nonlinear solver did not reach tolerance within max iterations."""


class LineSearchError(PencloseError):
    """Backtracking failed to find a descent step."""


class NoiseFloorError(PencloseError):
    """Indicator values sit below the solver-noise floor."""


class InsufficientDataError(PencloseError):
    """Too few usable samples for a fit."""


class ReconstructionError(PencloseError):
    """Too few directions produced usable support estimates."""

"""Exception hierarchy for snailsim.

Validation problems (bad config, bad units) are distinct from numerical
failures (no root bracketed, integrator breakdown, truncated-basis leakage)
so the CLI can map them to different exit codes.
"""


class SnailSimError(Exception):
    """Base class for all snailsim errors."""


class ValidationError(SnailSimError):
    """Bad user input: config schema or unit-range violations."""


class SchemaError(ValidationError):
    """Config file does not match the expected schema (carries field path)."""


class UnitError(ValidationError):
    """A physical quantity is outside its allowed range."""


class NumericalError(SnailSimError):
    """A numerical procedure failed to produce a trustworthy result."""


class NoMinimumFound(NumericalError):
    """No potential minimum with positive curvature bracketed on the branch."""


class NoRootInInterval(NumericalError):
    """A sign-changing root was not found in the given interval."""


class InvalidStiffness(NumericalError):
    """Non-positive quadratic coefficient: the mode equation degenerates."""


class DimensionMismatch(NumericalError):
    """Operators or states with incompatible Fock-space dimensions."""


class TruncationLeak(NumericalError):
    """Population leaked into the top of the truncated Fock basis."""


class IntegratorFailure(NumericalError):
    """The ODE integrator failed (step-size collapse or non-convergence)."""


class BudgetExceeded(NumericalError):
    """Gate synthesis could not reach the target within the gate budget."""


class UnsupportedModeCount(SnailSimError):
    """Requested register size is not supported."""

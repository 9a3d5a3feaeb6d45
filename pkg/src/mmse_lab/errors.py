"""Exception hierarchy for the lab.

Every error raised on purpose by this package derives from MmseLabError so
callers (and the CLI) can distinguish engine failures from programming bugs.
"""


class MmseLabError(Exception):
    """Base class for all errors raised by mmse_lab."""


class InvalidDistribution(MmseLabError, ValueError):
    """A finite joint / channel / moment summary violates its invariants."""


class InsufficientSamples(MmseLabError, ValueError):
    """Too few samples to carry out the requested empirical computation."""


class NonPositiveStep(MmseLabError, ValueError):
    """A quantization step must be strictly positive."""


class EmptySupport(MmseLabError, ValueError):
    """All measurement mass is zero; no conditional estimate exists."""


class DegenerateRange(MmseLabError, ValueError):
    """All measurement samples coincide; binning has no range to split."""


class AlphabetMismatch(MmseLabError, ValueError):
    """Channel and joint (or two channels) disagree on an alphabet."""


class MissingWitness(MmseLabError, ValueError):
    """The requested check needs a coupling witness the scenario lacks."""


class SingularLimitCovariance(MmseLabError, ValueError):
    """The limit measurement covariance is singular; the sequence audit
    is undefined there.  Per-index values are attached for inspection."""

    def __init__(self, message: str, per_n_values=None):
        super().__init__(message)
        self.per_n_values = per_n_values


class SelfCheckError(MmseLabError, ArithmeticError):
    """Two independent internal computations of the same quantity disagree
    beyond tolerance.  Indicates a bug, not bad input."""


class ScenarioRunError(MmseLabError, RuntimeError):
    """An engine error occurred while running a scenario; carries context."""

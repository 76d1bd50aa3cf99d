"""Exception hierarchy shared by every module of the package."""


class ParetoGofError(Exception):
    """Base class for all errors raised by paretogof."""


class ParameterDomainError(ParetoGofError, ValueError):
    """A distribution or tuning parameter lies outside its admissible range."""


class EmptySampleError(ParetoGofError, ValueError):
    """No observations are available (n = 0, or nothing survives a threshold)."""


class DegenerateSampleError(ParetoGofError, ValueError):
    """The sample carries no information about the shape (e.g. every value is 1)."""


class SampleValidationError(ParetoGofError, ValueError):
    """Observations are non-finite or fall outside the support [1, inf)."""


class UnknownTestError(ParetoGofError, KeyError):
    """A test token does not name any implemented statistic."""

    def __str__(self):
        # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class DatasetIOError(ParetoGofError, OSError):
    """A dataset file is missing or contains an unparsable line."""

    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.path = path
        self.line = line


class NumericalError(ParetoGofError, ArithmeticError):
    """A statistic evaluated to NaN or a numerical routine failed to converge."""


class ReplicationError(ParetoGofError, RuntimeError):
    """A Monte Carlo replication failed twice; the study cell is aborted."""

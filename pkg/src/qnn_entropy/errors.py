"""Exception types raised across the package.

Every error raised on purpose derives from QnnError so callers can
distinguish anticipated failure modes from genuine bugs.
"""


class QnnError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSizeError(QnnError, ValueError):
    """A size argument (qubit count, bond index, dimension) is out of range."""


class SizeMismatchError(QnnError, ValueError):
    """Two objects that must agree in size do not."""


class DomainError(QnnError, ValueError):
    """A scalar argument lies outside the function's domain."""


class DecompositionError(QnnError, RuntimeError):
    """A matrix factorization failed to converge on every available driver."""


class DegenerateStateError(QnnError, ValueError):
    """A spectrum or state is numerically zero and cannot be normalized."""


class UnitarityError(QnnError, ValueError):
    """A gate matrix deviates from unitarity beyond tolerance."""


class CapacityError(QnnError, ValueError):
    """A dense representation was requested above the supported size."""


class InternalConsistencyError(QnnError, RuntimeError):
    """A cached invariant (canonical form, bond spectrum) is violated.

    Raising this means the engine detected stale or corrupted internal
    state; results produced afterwards would be silently wrong.
    """


class UndefinedMetricError(QnnError, ValueError):
    """A metric is mathematically undefined for the given inputs."""


class UnsupportedCaseError(QnnError, ValueError):
    """The requested case is deliberately outside the implemented domain."""


class NotConvergedError(QnnError, RuntimeError):
    """An iterative search exhausted its budget without reaching its target."""


class InsufficientDataError(QnnError, ValueError):
    """Too few data points to perform the requested estimate."""


class CsvSchemaError(QnnError, ValueError):
    """A results file does not match the wire format (header or row shape)."""


class ConfigError(QnnError, ValueError):
    """An experiment configuration value is missing, unknown, or invalid.

    Carries the offending field name so the CLI can point at it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field

"""Error hierarchy shared by every l2sep app."""


class L2SepError(Exception):
    """Base class for all domain errors raised by this project."""
    exit_code = 1


class ConfigurationError(L2SepError):
    """Invalid parameters, config files or CLI arguments."""
    exit_code = 2


class NumericalError(L2SepError):
    """A numerical procedure could not produce a trustworthy answer."""
    exit_code = 3


# ─── instances ───────────────────────────────────────────────────────────────

class InstanceFormatError(ConfigurationError):
    """
    A serialized instance could not be parsed.

    `errors` carries the field-keyed details reported by the serializer,
    `line`/`column` the position of a JSON syntax error.
    """

    def __init__(self, message, errors=None, line=None, column=None):
        self.errors = errors or {}
        self.line = line
        self.column = column
        location = f' (line {line}, column {column})' if line is not None else ''
        super().__init__(f'{message}{location}')


class InstanceValidationError(InstanceFormatError):
    """The instance parsed but violates a data-model invariant (e.g. lb > ub)."""


class InstanceTooLargeError(ConfigurationError):
    """Enumeration oracles refuse instances above their size limit."""


# ─── lp ──────────────────────────────────────────────────────────────────────

class LpNumericalError(NumericalError):
    """Singular basis or a pivot sequence that lost accuracy."""


class NotBasicError(L2SepError):
    """A tableau row was requested for a variable that is not basic."""


# ─── metrics ─────────────────────────────────────────────────────────────────

class MetricDomainError(NumericalError):
    """An improvement or aggregate is undefined for its inputs (e.g. t0 <= 0)."""


# ─── subspace / model / bandit ───────────────────────────────────────────────

class EmptySubspaceError(ConfigurationError):
    """No configuration passes the instance-agnostic performance filter."""

    def __init__(self, threshold):
        self.threshold = threshold
        super().__init__(
            f'No configuration has mean improvement above the threshold b={threshold}.'
        )


class CheckpointMismatchError(ConfigurationError):
    """A model checkpoint was written for a different architecture."""


class EmptyBufferError(ConfigurationError):
    """Training was requested on an empty data buffer."""


class UcbNumericalError(NumericalError):
    """The UCB normalizing matrix lost positive definiteness."""

    def __init__(self, message, state_dump=None):
        self.state_dump = state_dump or {}
        super().__init__(message)

"""Exception hierarchy. Each class maps to one CLI exit code."""


class CoexistError(Exception):
    exit_code = 1


class InputError(CoexistError, ValueError):
    """Malformed input: unparsable expression, non-finite samples, bad shapes."""

    exit_code = 2


class ResonanceError(CoexistError):
    exit_code = 3


class MixedSignError(CoexistError):
    """The Green's function does not have a strict constant sign."""

    exit_code = 4


class NotFoundError(CoexistError):
    """Radius search exhausted without a certificate."""

    exit_code = 5

    def __init__(self, message, best_margins=None):
        super().__init__(message)
        self.best_margins = best_margins or {}


class NoConvergenceError(CoexistError):
    exit_code = 6

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class IndexMismatchError(CoexistError):
    exit_code = 7


class ConfigurationError(CoexistError):
    """Inputs are well formed but violate a structural assumption."""

    exit_code = 8


class DomainError(ConfigurationError):
    pass


class EvaluationError(ConfigurationError):
    pass


class BoundaryZeroError(ConfigurationError):
    pass


class RefinementError(ConfigurationError):
    pass


class InvariantViolation(CoexistError, AssertionError):
    exit_code = 1

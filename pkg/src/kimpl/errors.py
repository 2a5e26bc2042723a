"""Exception hierarchy.

The CLI maps each family to its own exit status, so new errors should
subclass one of the three families below rather than ``KImplError``.
"""


class KImplError(Exception):
    """Base class for all errors raised by kimpl."""


class PreconditionError(KImplError, ValueError):
    """An input violates an operation's stated precondition."""


class InvalidProfileError(PreconditionError, IndexError):
    pass


class HypothesisViolation(PreconditionError):
    """A structural hypothesis (e.g. two strategies per player) does not hold."""


class UnsupportedError(PreconditionError):
    """The request is outside the supported fragment (e.g. n > 2 players)."""


class BudgetExceededError(PreconditionError):
    def __init__(self, message, estimate=None, cap=None):
        super().__init__(message)
        self.estimate = estimate
        self.cap = cap


class InfeasibleError(KImplError):
    """No object with the requested properties exists."""


class InternalGuardError(KImplError, RuntimeError):
    """A loop that provably terminates ran out of candidates."""


class FormatError(KImplError):
    """Malformed input document.

    ``where`` is a human readable position: ``line 3, column 7`` for syntax
    errors, or a JSON path such as ``payoffs[1][0]`` for structural ones.
    """

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)

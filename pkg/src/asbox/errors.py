"""Exception types raised across the package."""


class AsboxError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(AsboxError):
    """Vector lengths disagree with each other or with the box."""

    def __init__(self, expected, got, what="vector"):
        self.expected = expected
        self.got = got
        super().__init__(f"{what}: expected length {expected}, got {got}")


class InfeasiblePointError(AsboxError):
    """A point that must lie in the feasible box does not."""


class InvalidWeightsError(AsboxError):
    """Weight vector is not a probability vector."""


class LineSearchError(AsboxError):
    """Backtracking exhausted its budget; usually an inconsistent oracle.

    Carries the last step size tried in ``last_t``.
    """

    def __init__(self, last_t, backtracks):
        self.last_t = last_t
        self.backtracks = backtracks
        super().__init__(
            f"no Armijo step after {backtracks} backtracks (last t={last_t:.3e})"
        )


class ParseError(AsboxError):
    """Malformed input data; ``line`` is the 1-based offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoViolatorError(AsboxError):
    """The Monte-Carlo violator check requires at least one planted violator."""

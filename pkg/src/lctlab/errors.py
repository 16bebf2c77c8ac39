"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class LctLabError(Exception):
    exit_code = 4


class ParseError(LctLabError, ValueError):
    """Malformed ideal or polynomial source."""

    exit_code = 1


class DomainError(LctLabError, ValueError):
    """A precondition on the mathematical input is violated (e.g. not m-primary)."""

    exit_code = 2


class BracketError(DomainError):
    """Threshold bisection never saw divergence below the bracket cap."""


class ResourceError(LctLabError, RuntimeError):
    """A desk-scale cap (generator count, degree, basis size, ...) was exceeded."""

    exit_code = 3


class InvariantError(LctLabError, AssertionError):
    """An internal invariant broke. Always a bug."""

    exit_code = 4

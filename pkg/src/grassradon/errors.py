"""Exception hierarchy shared by all modules.

Every error raised deliberately by the library derives from
:class:`GrassRadonError`, so callers (and the CLI) can separate library
diagnostics from programming errors.
"""

from __future__ import annotations


class GrassRadonError(Exception):
    """Base class for all library errors."""


class RankDeficient(GrassRadonError):
    pass


class DimensionMismatch(GrassRadonError):
    pass


class UnsupportedDimension(GrassRadonError):
    pass


class BadDimension(GrassRadonError):
    pass


class UnsupportedCase(GrassRadonError):
    pass


class DomainMismatch(GrassRadonError):
    pass


class NotOrthogonal(GrassRadonError):
    pass


class BadRadii(GrassRadonError):
    pass


class ParseError(GrassRadonError):
    """Malformed text input.

    Parameters
    ----------
    message : str
        Human readable description.
    position : int
        0-based offset of the offending character in the input text.
    expected : str
        What the parser was looking for at ``position``.
    """

    def __init__(self, message: str, position: int = 0, expected: str = ""):
        super().__init__(f"{message} at column {position}" + (f" (expected {expected})" if expected else ""))
        self.position = position
        self.expected = expected


class UnknownField(GrassRadonError):
    pass


class UnknownParam(GrassRadonError):
    pass


class RuleTooCoarse(GrassRadonError):
    pass


class OddDegree(GrassRadonError):
    pass


class NotEven(GrassRadonError):
    pass


class NotCompactlySupported(GrassRadonError):
    pass


class OverflowGuard(GrassRadonError):
    pass


class ConditionANotRepresentable(GrassRadonError):
    pass

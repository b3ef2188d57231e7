"""
Floerkit - Errors Module

Exception hierarchy shared by every module. The CLI maps FloerError to
exit code 1 and the HTTP API maps it to a 400 response.
"""

from typing import Optional


class FloerError(Exception):
    """Base class for all domain errors"""


# -----------------------------------------------------------------------------
# Algebra
# -----------------------------------------------------------------------------

class CompositionNonzero(FloerError):
    """d_out composed with d_in is not zero"""


# -----------------------------------------------------------------------------
# Complexes
# -----------------------------------------------------------------------------

class BadSteps(FloerError, ValueError):
    """Constructor step list has the wrong length or a non-positive entry"""


class ParseError(FloerError, ValueError):
    """Text format violation, located by line and column"""

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class InvalidComplex(FloerError):
    """An operation that needs a valid complex received one with violations"""

    def __init__(self, report):
        self.report = report
        details = "; ".join(str(v) for v in report.violations[:5])
        more = len(report.violations) - 5
        if more > 0:
            details += f"; ... {more} more"
        super().__init__(f"invalid complex: {details}")


class EmptyComplex(FloerError):
    """The complex has no generators"""


class NotKnotLike(FloerError):
    """Column homology is not a single F, or a hook has no homology"""


# -----------------------------------------------------------------------------
# Regions
# -----------------------------------------------------------------------------

class NotSubquotient(FloerError, ValueError):
    """Region is not a difference of two downward-closed sets"""


class Infinite(FloerError, ValueError):
    """Region meets a generator diagonal in infinitely many points"""


class ExactnessFailure(FloerError):
    """A computed long exact sequence is not exact"""


# -----------------------------------------------------------------------------
# Surgery
# -----------------------------------------------------------------------------

class NTooSmall(FloerError, ValueError):
    """Surgery coefficient below the large-surgery threshold"""


class ParityFailure(FloerError):
    """R- and R+ have different parity, so (m, n) is not integral"""


class NotCoprime(FloerError, ValueError):
    """Surgery slope p/q is not in lowest terms (or q is zero)"""


class BadSample(FloerError, ValueError):
    """Stability sample outside the range p/q >= 2g - 1"""


# -----------------------------------------------------------------------------
# Classification
# -----------------------------------------------------------------------------

class TooLarge(FloerError):
    """Equivalence search refused an input above one of its caps"""

    def __init__(self, size: int, cap: int, unit: str = "generators"):
        self.size = size
        self.cap = cap
        super().__init__(f"{size} {unit} exceeds equivalence cap of {cap}")


class WrongClass(FloerError):
    """Operation only applies to a different classification verdict"""


class NonTermination(FloerError):
    """Simplification move budget exhausted"""

    def __init__(self, message: str, partial: Optional[object] = None):
        self.partial = partial
        super().__init__(message)

"""Exception types shared across the library.

Everything raised on purpose derives from HahnSeriesError so callers (and the
command line front end) can separate domain errors from genuine bugs.
"""


class HahnSeriesError(Exception):
    """Base class for all library errors."""


class RankMismatchError(HahnSeriesError):
    """Operands built over different ranks were mixed."""


class NonAccessibleError(HahnSeriesError):
    """A bounded enumeration would exceed its cap.

    Raised instead of silently dropping terms: in lexicographic order a bound
    can sit above infinitely many grid points (e.g. every (0, k) < (1, 0)), so
    hitting the cap means the requested truncation or bound is not reachable
    with finite work, not that the answer is empty.
    """


class UndeterminedValuationError(HahnSeriesError):
    """A valuation was requested below the known-exact part of a series."""


class SpecValidationError(HahnSeriesError):
    """A derivation specification violates one of the named axioms.

    ``violations`` holds one human-readable string per failed axiom,
    each naming the axiom and the offending indices.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ParseError(HahnSeriesError):
    """Series/exponent text did not match the grammar.

    ``position`` is the 0-based offset into the input where parsing failed.
    """

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)

"""Truncated generalized power series with exact rational coefficients.

A series is a finite, strictly increasing (lex) list of (exponent,
coefficient) terms, optionally carrying a truncation exponent beta.  The
truncation is an honesty marker: the series is known exactly below beta and
asserts nothing at or above it.  Every operation computes the tightest sound
truncation for its result:

  add/sub        min(beta_a, beta_b)
  multiply       min(beta_a + v(b), beta_b + v(a))   (v from the known terms)
  term division  beta - exponent of the divisor

The zero series with no truncation is the exact zero, with valuation the
infinity marker (represented as None).  A series that is empty but truncated
is *unknown below beta*: asking for its valuation raises.

Coefficients are Fractions; no floats are accepted anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    NonAccessibleError,
    RankMismatchError,
    UndeterminedValuationError,
)
from .exponents import Exponent

DEFAULT_CAP = 10000

Term = tuple[Exponent, Fraction]


@dataclass(frozen=True)
class ValuationResult:
    """Minimum exponent of the support and its coefficient.

    ``value`` is None exactly for the zero series (v(0) = infinity) and then
    ``leading_coefficient`` is None as well.
    """

    value: Exponent | None
    leading_coefficient: Fraction | None

    @property
    def is_infinite(self) -> bool:
        return self.value is None


@dataclass(frozen=True)
class GeneralizedSeries:
    rank: int
    terms: tuple[Term, ...]
    truncation: Exponent | None = None

    def __post_init__(self):
        last = None
        for expo, coeff in self.terms:
            if expo.rank != self.rank:
                raise RankMismatchError(
                    f"term exponent rank {expo.rank} in rank-{self.rank} series")
            if coeff == 0:
                raise ValueError("zero coefficient stored")
            if last is not None and not last < expo:
                raise ValueError("terms not strictly increasing")
            last = expo
        if self.truncation is not None:
            if self.truncation.rank != self.rank:
                raise RankMismatchError("truncation rank mismatch")
            if self.terms and not self.terms[-1][0] < self.truncation:
                raise ValueError("term at or above the truncation")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_terms(cls, rank: int,
                   terms: Iterable[tuple[Exponent, Fraction | int | str]],
                   truncation: Exponent | None = None) -> GeneralizedSeries:
        """Build a series from unsorted terms, merging duplicate exponents.

        Terms at or above the truncation carry no information and are
        dropped; zero coefficients (after merging) are dropped too.
        """
        acc: dict[Exponent, Fraction] = {}
        for expo, coeff in terms:
            acc[expo] = acc.get(expo, Fraction(0)) + Fraction(coeff)
        kept = sorted(
            (e, c) for e, c in acc.items()
            if c != 0 and (truncation is None or e < truncation))
        return cls(rank, tuple(kept), truncation)

    @classmethod
    def zero(cls, rank: int, truncation: Exponent | None = None) -> GeneralizedSeries:
        return cls(rank, (), truncation)

    @classmethod
    def constant(cls, rank: int, value: Fraction | int | str) -> GeneralizedSeries:
        value = Fraction(value)
        if value == 0:
            return cls.zero(rank)
        return cls(rank, ((Exponent.zero(rank), value),))

    @classmethod
    def monomial(cls, rank: int, exponent: Exponent,
                 coefficient: Fraction | int | str = 1) -> GeneralizedSeries:
        coefficient = Fraction(coefficient)
        if coefficient == 0:
            return cls.zero(rank)
        return cls(rank, ((exponent, coefficient),))

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        """True only for the exact (untruncated) zero series."""
        return not self.terms and self.truncation is None

    def is_single_term(self) -> bool:
        return len(self.terms) == 1 and self.truncation is None

    def valuation_and_leading(self) -> ValuationResult:
        """v(a) and the leading coefficient; infinity marker for exact zero.

        Raises UndeterminedValuationError for an empty truncated series:
        nothing is known below the truncation, so the valuation is not
        determined by the data.
        """
        if self.terms:
            expo, coeff = self.terms[0]
            return ValuationResult(expo, coeff)
        if self.truncation is not None:
            raise UndeterminedValuationError(
                f"valuation undetermined below {self.truncation}")
        return ValuationResult(None, None)

    def valuation(self) -> Exponent | None:
        return self.valuation_and_leading().value

    def leading_term(self) -> Term:
        """delta(a) for nonzero a."""
        res = self.valuation_and_leading()
        if res.value is None:
            raise ValueError("zero series has no leading term")
        return (res.value, res.leading_coefficient)

    def valuation_lower_bound(self) -> Exponent | None:
        """An exponent below which the series is known to vanish.

        v(a) when terms exist, the truncation when empty-but-truncated, and
        None (meaning +infinity: the series is 0) otherwise.  Never raises.
        """
        if self.terms:
            return self.terms[0][0]
        return self.truncation

    def support(self) -> tuple[Exponent, ...]:
        return tuple(e for e, _ in self.terms)

    def coefficient(self, exponent: Exponent) -> Fraction:
        for e, c in self.terms:
            if e == exponent:
                return c
        return Fraction(0)

    # -- arithmetic --------------------------------------------------------

    def _check_rank(self, other: GeneralizedSeries) -> None:
        if self.rank != other.rank:
            raise RankMismatchError(f"rank {self.rank} vs {other.rank}")

    def __add__(self, other: GeneralizedSeries) -> GeneralizedSeries:
        self._check_rank(other)
        trunc = _min_optional(self.truncation, other.truncation)
        return GeneralizedSeries.from_terms(
            self.rank, list(self.terms) + list(other.terms), trunc)

    def __sub__(self, other: GeneralizedSeries) -> GeneralizedSeries:
        return self + (-other)

    def __neg__(self) -> GeneralizedSeries:
        return GeneralizedSeries(
            self.rank, tuple((e, -c) for e, c in self.terms), self.truncation)

    def scale(self, factor: Fraction | int | str) -> GeneralizedSeries:
        factor = Fraction(factor)
        if factor == 0:
            # 0 * unknown tail is exactly 0
            return GeneralizedSeries.zero(self.rank)
        return GeneralizedSeries(
            self.rank, tuple((e, factor * c) for e, c in self.terms),
            self.truncation)

    def __mul__(self, other: GeneralizedSeries) -> GeneralizedSeries:
        self._check_rank(other)
        trunc = None
        if self.truncation is not None:
            vb = other.valuation_lower_bound()
            if vb is not None:
                trunc = _min_optional(trunc, self.truncation + vb)
            # other == exact zero: product is exact zero, no truncation
        if other.truncation is not None:
            va = self.valuation_lower_bound()
            if va is not None:
                trunc = _min_optional(trunc, other.truncation + va)
        if (not self.terms) or (not other.terms):
            return GeneralizedSeries.zero(self.rank, trunc)
        if len(self.terms) * len(other.terms) > DEFAULT_CAP:
            raise NonAccessibleError(
                "non-accessible truncation: product would expand "
                f"{len(self.terms)}x{len(other.terms)} terms (cap {DEFAULT_CAP})")
        prods = [(ea + eb, ca * cb)
                 for ea, ca in self.terms for eb, cb in other.terms]
        return GeneralizedSeries.from_terms(self.rank, prods, trunc)

    def __pow__(self, n: int) -> GeneralizedSeries:
        if n < 0:
            raise ValueError("natural powers only; use invert_unit for units")
        out = GeneralizedSeries.constant(self.rank, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base_needed = n > 1
            if base_needed:
                base = base * base
            n >>= 1
        return out

    def divide_term(self, exponent: Exponent,
                    coefficient: Fraction | int | str) -> GeneralizedSeries:
        """Exact division by the single term coefficient * t^exponent."""
        coefficient = Fraction(coefficient)
        if coefficient == 0:
            raise ZeroDivisionError("division by zero term")
        trunc = None if self.truncation is None else self.truncation - exponent
        return GeneralizedSeries(
            self.rank,
            tuple((e - exponent, c / coefficient) for e, c in self.terms),
            trunc)

    def truncate(self, beta: Exponent) -> GeneralizedSeries:
        """Forget everything at or above beta."""
        trunc = _min_optional(self.truncation, beta)
        return GeneralizedSeries(
            self.rank, tuple((e, c) for e, c in self.terms if e < trunc),
            trunc)

    def invert_unit(self, output_truncation: Exponent,
                    cap: int = DEFAULT_CAP) -> GeneralizedSeries:
        """Inverse of a unit (v = 0) as a geometric series below the bound.

        a = c(1 - u) with v(u) > 0, so 1/a = (1 + u + u^2 + ...)/c.  The
        result's support lies in the semigroup generated by Supp u, so that
        semigroup is enumerated below the bound first: if it holds more than
        ``cap`` points the truncation is not accessible and the error is
        raised before any expensive expansion.
        """
        from .supports import GridSet, gs_enumerate_below, gs_semigroup
        lead = self.valuation_and_leading()
        if lead.value is None or not lead.value.is_zero():
            raise ValueError("invert_unit needs valuation 0 with nonzero lead")
        c = lead.leading_coefficient
        u = (GeneralizedSeries.constant(self.rank, 1)
             - self.scale(Fraction(1) / c)).truncate(output_truncation)
        if u.terms:
            candidates = gs_enumerate_below(
                gs_semigroup(GridSet.from_points(self.rank, u.support())),
                output_truncation, cap)
            max_steps = len(candidates) + 1
        else:
            max_steps = 1
        out = GeneralizedSeries.constant(self.rank, 1)
        power = u
        for _ in range(max_steps):
            if not power.terms:
                break
            out = out + power
            power = (power * u).truncate(output_truncation)
        else:
            if power.terms:
                raise NonAccessibleError(
                    f"non-accessible truncation {output_truncation} "
                    f"while inverting (cap {cap})")
        return out.scale(Fraction(1) / c).truncate(output_truncation)

    # -- decomposition and predicates ---------------------------------------

    def decompose_by_class(self) -> list[GeneralizedSeries]:
        """Split a strictly positive series by leading Archimedean class.

        Component k (1-based) collects the terms whose first nonzero exponent
        coordinate sits at position k.  Requires v(a) > 0; components sum to
        the input and have pairwise disjoint supports.
        """
        v = self.valuation_and_leading()
        if v.value is not None and not Exponent.zero(self.rank) < v.value:
            raise ValueError("decompose_by_class needs v(a) > 0")
        buckets: list[list[Term]] = [[] for _ in range(self.rank)]
        for e, c in self.terms:
            buckets[e.leading_class() - 1].append((e, c))
        return [
            GeneralizedSeries(self.rank, tuple(b), self.truncation)
            for b in buckets
        ]

    def __str__(self) -> str:
        from .textio import format_series
        return format_series(self)


def _min_optional(a: Exponent | None, b: Exponent | None) -> Exponent | None:
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


def same_valuation(a: GeneralizedSeries, b: GeneralizedSeries) -> bool:
    """The relation a =< b ("asymptotic"): v(a) = v(b)."""
    va, vb = a.valuation(), b.valuation()
    return va == vb if (va is not None and vb is not None) else va is vb


def equivalent(a: GeneralizedSeries, b: GeneralizedSeries) -> bool:
    """The relation a ~ b: v(a - b) > min(v(a), v(b))."""
    va, vb = a.valuation(), b.valuation()
    if va is None or vb is None:
        return False
    low = min(va, vb)
    vd = (a - b).valuation_lower_bound()
    return vd is None or low < vd


def in_positive_part(a: GeneralizedSeries) -> bool:
    """a in the maximal ideal: v(a) > 0 (true for exact zero)."""
    v = a.valuation()
    return v is None or Exponent.zero(a.rank) < v


def in_valuation_ring(a: GeneralizedSeries) -> bool:
    """v(a) >= 0 (true for exact zero)."""
    v = a.valuation()
    return v is None or not v < Exponent.zero(a.rank)


def eq_below_common_truncation(a: GeneralizedSeries, b: GeneralizedSeries) -> bool:
    """Equality of the parts both sides are exact about.

    The difference must vanish below the combined truncation; with no
    truncations anywhere this is plain equality.
    """
    diff = a - b
    return not diff.terms

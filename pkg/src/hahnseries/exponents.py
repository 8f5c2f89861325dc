"""Rational exponent vectors under lexicographic order, and multi-indices.

An Exponent is an element of the value group: a vector of r rationals
compared lexicographically.  Position k (1-based) corresponds to the k-th
Archimedean class; ``Exponent.unit(r, k)`` is the generator e_k.  Exponents
of the same rank form an ordered abelian group; mixing ranks is an error,
never a coercion.

Multi-indices (derivative-order multiplicities for differential polynomials)
are plain tuples of naturals.  The helpers below provide the combinatorial
statistics |I|, the weight ||I|| = 1*i_1 + ... + n*i_n, the factorial I!, the
componentwise partial order, and the anti-lexicographic total order in which
the highest differing position decides.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator

from .errors import RankMismatchError

MultiIndex = tuple[int, ...]


@total_ordering
class Exponent:
    """Immutable rank-r vector of rationals, ordered lexicographically."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[Fraction | int | str]):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in coords))

    def __setattr__(self, name, value):
        raise AttributeError("Exponent is immutable")

    @classmethod
    def zero(cls, rank: int) -> Exponent:
        return cls((0,) * rank)

    @classmethod
    def unit(cls, rank: int, k: int) -> Exponent:
        """The generator e_k, 1 at (1-based) position k."""
        if not 1 <= k <= rank:
            raise ValueError(f"class index {k} outside 1..{rank}")
        return cls(tuple(1 if i == k - 1 else 0 for i in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def _check_rank(self, other: Exponent) -> None:
        if not isinstance(other, Exponent):
            raise TypeError(f"expected Exponent, got {type(other).__name__}")
        if self.rank != other.rank:
            raise RankMismatchError(f"rank {self.rank} vs {other.rank}")

    def __add__(self, other: Exponent) -> Exponent:
        self._check_rank(other)
        return Exponent(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: Exponent) -> Exponent:
        self._check_rank(other)
        return Exponent(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> Exponent:
        return Exponent(-a for a in self.coords)

    def __mul__(self, scalar) -> Exponent:
        s = Fraction(scalar)
        return Exponent(s * a for a in self.coords)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Exponent):
            return NotImplemented
        self._check_rank(other)
        return self.coords == other.coords

    def __lt__(self, other: Exponent) -> bool:
        self._check_rank(other)
        return self.coords < other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __getitem__(self, k: int) -> Fraction:
        """Coordinate at 1-based class position k."""
        return self.coords[k - 1]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def leading_class(self) -> int | None:
        """1-based position of the first nonzero coordinate, None for 0."""
        for i, c in enumerate(self.coords):
            if c != 0:
                return i + 1
        return None

    def __repr__(self) -> str:
        return f"Exponent(({', '.join(str(c) for c in self.coords)}))"

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def lex_compare(a: Exponent, b: Exponent) -> int:
    """Three-way lexicographic comparison: -1, 0 or 1."""
    if a < b:
        return -1
    return 1 if b < a else 0


def ex(*coords) -> Exponent:
    """Shorthand constructor: ex(1, -2) == Exponent((1, -2))."""
    return Exponent(coords)


# ---------------------------------------------------------------------------
# Multi-indices


def mi_length(index: MultiIndex) -> int:
    """|I| = i_0 + ... + i_n."""
    return sum(index)


def mi_weight(index: MultiIndex) -> int:
    """||I|| = 1*i_1 + 2*i_2 + ... + n*i_n."""
    return sum(pos * mult for pos, mult in enumerate(index))


def mi_factorial(index: MultiIndex) -> int:
    """I! = i_0! i_1! ... i_n!."""
    out = 1
    for mult in index:
        out *= math.factorial(mult)
    return out


def mi_stats(index: MultiIndex) -> tuple[int, int, int]:
    """(|I|, ||I||, I!) in one call."""
    return mi_length(index), mi_weight(index), mi_factorial(index)


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    _check_len(a, b)
    return tuple(x + y for x, y in zip(a, b))


def mi_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise difference; caller must ensure b <= a."""
    _check_len(a, b)
    out = tuple(x - y for x, y in zip(a, b))
    if any(v < 0 for v in out):
        raise ValueError(f"{b} not componentwise below {a}")
    return out


def mi_le(a: MultiIndex, b: MultiIndex) -> bool:
    """Componentwise partial order a <= b."""
    _check_len(a, b)
    return all(x <= y for x, y in zip(a, b))


def antilex_compare(a: MultiIndex, b: MultiIndex) -> int:
    """Anti-lexicographic three-way comparison.

    The highest position where the indices differ decides: a < b iff
    a[k] < b[k] for k = max position with a[k] != b[k].
    """
    _check_len(a, b)
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return -1 if x < y else 1
    return 0


def antilex_key(index: MultiIndex) -> MultiIndex:
    """Sort key realizing the anti-lexicographic order (same-length indices)."""
    return tuple(reversed(index))


def _check_len(a: MultiIndex, b: MultiIndex) -> None:
    if len(a) != len(b):
        raise RankMismatchError(f"multi-index length {len(a)} vs {len(b)}")

"""Finitely generated over-approximations of well-ordered support sets.

A GridSet denotes a finite union of cosets, each an offset plus the
additive-semigroup combinations of finitely many lex-positive generators:

    denotation = union over cosets of { offset + k_1 g_1 + ... + k_m g_m }.

Positive generators keep every denoted set well-ordered.  The ``exact`` flag
records whether the denotation is the set being tracked or a superset of it;
operations that can only return supersets clear the flag, and every claim a
caller makes about an inexact GridSet must be a containment claim.

The four elementary transformations on supports are provided: set sum,
semigroup generation, adding a generator, and negative translation
(X restricted to >= beta, shifted down by beta).  Negative translation uses
the branch recursion on the number of generators: split on whether the
chosen generator is used at least k0 = min{k : k*g >= beta} times (a single
shifted coset) or fewer (one reduced instance per smaller multiplicity).
The generator to branch on is always taken among those that can reach beta
at all - a generator whose leading class sits beyond beta's can never reach
it, and when no generator can, the lattice simply has no points >= beta.

Membership and bounded enumeration are exact searches: membership peels the
target one Archimedean class at a time (only generators leading at class p
can produce the class-p coordinate), enumeration is a heap walk in lex
order.  Caps make the cost explicit; hitting one reports "unknown" or raises
instead of silently truncating.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

from .errors import NonAccessibleError, RankMismatchError
from .exponents import Exponent

MEMBER_CAP = 100000
ENUM_CAP = 10000


@dataclass(frozen=True)
class Coset:
    offset: Exponent
    generators: frozenset[Exponent]

    def __post_init__(self):
        zero = Exponent.zero(self.offset.rank)
        for g in self.generators:
            if g.rank != self.offset.rank:
                raise RankMismatchError("generator rank mismatch")
            if not zero < g:
                raise ValueError(f"generator {g} not lex-positive")

    @property
    def rank(self) -> int:
        return self.offset.rank


@dataclass(frozen=True)
class GridSet:
    rank: int
    cosets: frozenset[Coset]
    exact: bool = True

    def __post_init__(self):
        for c in self.cosets:
            if c.rank != self.rank:
                raise RankMismatchError("coset rank mismatch")

    # -- constructors ------------------------------------------------------

    @classmethod
    def empty(cls, rank: int) -> GridSet:
        return cls(rank, frozenset())

    @classmethod
    def point(cls, exponent: Exponent) -> GridSet:
        return cls(exponent.rank, frozenset({Coset(exponent, frozenset())}))

    @classmethod
    def zero_point(cls, rank: int) -> GridSet:
        return cls.point(Exponent.zero(rank))

    @classmethod
    def from_points(cls, rank: int, points: Iterable[Exponent]) -> GridSet:
        return cls(rank, frozenset(Coset(p, frozenset()) for p in points))

    @classmethod
    def lattice(cls, rank: int, generators: Iterable[Exponent],
                offset: Exponent | None = None) -> GridSet:
        """Single coset: offset (default 0) plus N-combinations of generators."""
        off = offset if offset is not None else Exponent.zero(rank)
        gens = frozenset(g for g in generators if not g.is_zero())
        return cls(rank, frozenset({Coset(off, gens)}))

    def is_empty(self) -> bool:
        return not self.cosets

    def union(self, other: GridSet) -> GridSet:
        self._check_rank(other)
        return GridSet(self.rank, self.cosets | other.cosets,
                       self.exact and other.exact)

    def mark_inexact(self) -> GridSet:
        return GridSet(self.rank, self.cosets, False)

    def _check_rank(self, other: GridSet) -> None:
        if self.rank != other.rank:
            raise RankMismatchError(f"rank {self.rank} vs {other.rank}")

    def __str__(self) -> str:
        from .textio import format_gridset
        return format_gridset(self)


# ---------------------------------------------------------------------------
# Elementary transformations


def gs_sum(x1: GridSet, x2: GridSet) -> GridSet:
    """Set sum {a + b}: cosets combine pairwise, generators pool."""
    x1._check_rank(x2)
    cosets = frozenset(
        Coset(c1.offset + c2.offset, c1.generators | c2.generators)
        for c1 in x1.cosets for c2 in x2.cosets)
    return GridSet(x1.rank, cosets, x1.exact and x2.exact)


def gs_semigroup(x: GridSet) -> GridSet:
    """The additive semigroup generated by the denoted set (or a superset).

    With all offsets zero the result is exact: one coset pooling every
    generator.  Nonzero offsets make the true semigroup not finitely
    presentable as cosets, so they are demoted to generators and the result
    is the containing lattice, flagged inexact.  Offsets below zero would
    break well-orderedness and are rejected.
    """
    zero = Exponent.zero(x.rank)
    if x.is_empty():
        return GridSet.zero_point(x.rank)
    gens: set[Exponent] = set()
    lossy = False
    for c in x.cosets:
        if c.offset < zero:
            raise ValueError(
                f"semigroup of a set with element {c.offset} < 0 would not "
                "be well-ordered")
        gens.update(c.generators)
        if not c.offset.is_zero():
            gens.add(c.offset)
            # a pure point just becomes a generator (still exact); a shifted
            # lattice only embeds in the full lattice (superset)
            lossy = lossy or bool(c.generators)
    coset = Coset(zero, frozenset(gens))
    return GridSet(x.rank, frozenset({coset}), x.exact and not lossy)


def gs_add_generator(x: GridSet, alpha: Exponent) -> GridSet:
    """X + N*alpha: alpha joins every coset's generators."""
    if not Exponent.zero(x.rank) < alpha:
        raise ValueError(f"new generator {alpha} must be lex-positive")
    cosets = frozenset(
        Coset(c.offset, c.generators | {alpha}) for c in x.cosets)
    return GridSet(x.rank, cosets, x.exact)


def gs_translate_neg(x: GridSet, beta: Exponent) -> GridSet:
    """(X restricted to >= beta) - beta, as a GridSet within Gamma_{>=0}.

    Exact: the branch recursion partitions the qualifying combinations by
    the multiplicity of one reachable generator, and each branch translates
    to a coset (or a smaller instance) without loss.
    """
    if beta.rank != x.rank:
        raise RankMismatchError("translation exponent rank mismatch")
    out: set[Coset] = set()
    for c in x.cosets:
        gens = sorted(c.generators)
        out.update(_translate_lattice(gens, beta - c.offset,
                                      _limit=len(gens)))
    return GridSet(x.rank, frozenset(out), x.exact)


def _translate_lattice(gens: list[Exponent], beta: Exponent,
                       _depth: int = 0, _limit: int = 0) -> list[Coset]:
    """Cosets denoting exactly { x - beta : x in <gens>, x >= beta }."""
    if _depth > _limit:
        raise AssertionError("translation recursion exceeded generator count")
    rank = beta.rank
    zero = Exponent.zero(rank)
    if not zero < beta:
        # every lattice point is >= 0 >= beta: plain shift
        return [Coset(-beta, frozenset(gens))]
    beta_class = beta.leading_class()
    reachable = [g for g in gens if g.leading_class() <= beta_class]
    if not reachable:
        # every generator leads past beta's class, so every combination has
        # coordinate 0 where beta is positive: nothing reaches beta
        return []
    pivot = max(reachable)
    k0 = 0
    acc = zero
    while acc < beta:
        acc = acc + pivot
        k0 += 1
    out = [Coset(acc - beta, frozenset(gens))]
    remaining = [g for g in gens if g != pivot]
    for used in range(k0):
        out.extend(_translate_lattice(
            remaining, beta - pivot * used, _depth + 1, _limit))
    return out


# ---------------------------------------------------------------------------
# Membership and enumeration


def gs_member(x: GridSet, gamma: Exponent, cap: int = MEMBER_CAP) -> str:
    """Is gamma in the denoted set: 'yes', 'no', or 'unknown' (cap hit).

    The search is exact: the class-p coordinate of a combination comes only
    from generators whose leading class is p, so multiplicities are solved
    one class at a time with hard bounds.
    """
    if gamma.rank != x.rank:
        raise RankMismatchError("membership query rank mismatch")
    budget = [cap]
    hit_cap = False
    for c in x.cosets:
        verdict = _lattice_member(sorted(c.generators), gamma - c.offset,
                                  1, budget)
        if verdict is True:
            return "yes"
        if verdict is None:
            hit_cap = True
    return "unknown" if hit_cap else "no"


def _lattice_member(gens: list[Exponent], target: Exponent, pos: int,
                    budget: list[int]) -> bool | None:
    if budget[0] <= 0:
        return None
    budget[0] -= 1
    rank = target.rank
    if pos > rank:
        return target.is_zero()
    coord = target[pos]
    here = [g for g in gens if g.leading_class() == pos]
    deeper = [g for g in gens if g.leading_class() > pos]
    if not here:
        if coord != 0:
            return False
        return _lattice_member(deeper, target, pos + 1, budget)
    if coord < 0:
        return False
    return _assign(here, deeper, target, pos, budget)


def _assign(here: list[Exponent], deeper: list[Exponent], target: Exponent,
            pos: int, budget: list[int]) -> bool | None:
    """DFS over multiplicities of the class-`pos` generators."""
    if budget[0] <= 0:
        return None
    budget[0] -= 1
    coord = target[pos]
    if not here:
        if coord != 0:
            return False
        return _lattice_member(deeper, target, pos + 1, budget)
    g, rest = here[0], here[1:]
    step = g[pos]  # > 0 by leading-class choice
    max_mult = int(coord / step)
    saw_cap = False
    for mult in range(max_mult + 1):
        sub = _assign(rest, deeper, target - g * mult, pos, budget)
        if sub is True:
            return True
        if sub is None:
            saw_cap = True
    return None if saw_cap else False


def gs_enumerate_below(x: GridSet, bound: Exponent,
                       cap: int = ENUM_CAP) -> list[Exponent]:
    """All denoted elements < bound, sorted lex; exact for exact GridSets.

    Raises NonAccessibleError past the cap: in lex order a bound can have
    infinitely many grid points below it.
    """
    if bound.rank != x.rank:
        raise RankMismatchError("enumeration bound rank mismatch")
    heap: list[tuple[Exponent, int]] = []
    gens_by_coset: list[tuple[Exponent, ...]] = []
    seen: set[Exponent] = set()
    for i, c in enumerate(x.cosets):
        gens_by_coset.append(tuple(sorted(c.generators)))
        if c.offset < bound:
            heapq.heappush(heap, (c.offset, i))
    out: list[Exponent] = []
    emitted: set[Exponent] = set()
    while heap:
        point, coset_idx = heapq.heappop(heap)
        if point not in emitted:
            emitted.add(point)
            out.append(point)
            if len(out) > cap:
                raise NonAccessibleError(
                    f"non-accessible bound {bound}: more than {cap} grid "
                    "points below it")
        for g in gens_by_coset[coset_idx]:
            nxt = point + g
            if nxt < bound and (nxt, coset_idx) not in seen:
                seen.add((nxt, coset_idx))
                heapq.heappush(heap, (nxt, coset_idx))
    return out


def gs_contains_gridset_sample(big: GridSet, small_points: Iterable[Exponent],
                               cap: int = MEMBER_CAP) -> bool:
    """True if every sample point is a member of ``big`` (helper for tests)."""
    return all(gs_member(big, p, cap) == "yes" for p in small_points)

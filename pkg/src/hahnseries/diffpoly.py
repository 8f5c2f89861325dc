"""Differential polynomials over the series field.

A differential polynomial of order n is a finite map from multi-indices
I = (i_0, ..., i_n) to series coefficients, standing for

    F(y) = sum_I c_I * y^(I),    y^(I) = y^{i_0} (Dy)^{i_1} ... (D^n y)^{i_n},

where D is the base derivation (derivation_index 0) or one of the rescaled
class derivations D_k.  Coefficients never store zero series; the zero
polynomial is representable only as the output of differentiation, never as
a top-level equation.

Besides evaluation and formal partial derivatives this module provides the
Weierstrass normal form (divide by t^{min Supp F}; the order w is the least
total degree among coefficients of valuation 0), the indicial polynomial of
a normalized order-1-in-w equation, and the support bound for evaluating at
a series of known class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .derivation import DerivationSpec, derive, script_t
from .errors import RankMismatchError, UndeterminedValuationError
from .exponents import (Exponent, MultiIndex, mi_factorial, mi_le, mi_length,
                        mi_sub, mi_weight)
from .polyroots import has_positive_irrational_root, rational_roots
from .series import GeneralizedSeries
from .supports import GridSet, gs_semigroup, gs_sum


@dataclass(frozen=True)
class DifferentialPolynomial:
    rank: int
    order: int
    derivation_index: int  # 0 for the base derivation, else the class k
    coefficients: dict[MultiIndex, GeneralizedSeries]
    provenance: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be a natural number")
        if not 0 <= self.derivation_index:
            raise ValueError("derivation index must be >= 0")
        for index, series in self.coefficients.items():
            if len(index) != self.order + 1:
                raise ValueError(
                    f"multi-index {index} has length {len(index)}, "
                    f"expected {self.order + 1}")
            if any(i < 0 for i in index):
                raise ValueError(f"negative entry in multi-index {index}")
            if series.rank != self.rank:
                raise RankMismatchError("coefficient rank mismatch")
            if not series.terms and series.truncation is None:
                raise ValueError("zero coefficient stored")

    @classmethod
    def from_coefficients(cls, rank: int, order: int, derivation_index: int,
                          entries: dict[MultiIndex, GeneralizedSeries],
                          allow_zero: bool = False,
                          provenance: tuple = ()) -> DifferentialPolynomial:
        kept = {
            tuple(i): s for i, s in entries.items()
            if s.terms or s.truncation is not None
        }
        if not kept and not allow_zero:
            raise ValueError("the zero differential polynomial is not a "
                             "valid equation")
        return cls(rank, order, derivation_index, kept, provenance)

    def is_zero(self) -> bool:
        return not self.coefficients

    def indices(self) -> list[MultiIndex]:
        return sorted(self.coefficients)

    def constant_coefficient(self) -> GeneralizedSeries:
        zero_index = (0,) * (self.order + 1)
        return self.coefficients.get(
            zero_index, GeneralizedSeries.zero(self.rank))

    def support(self) -> set[Exponent]:
        out: set[Exponent] = set()
        for s in self.coefficients.values():
            out.update(s.support())
        return out

    def min_support(self) -> Exponent:
        """min Supp F; raises when a truncation could hide the minimum."""
        best: Exponent | None = None
        for s in self.coefficients.values():
            v = s.valuation_lower_bound()
            if v is None:
                continue
            if best is None or v < best:
                best = v
        if best is None:
            raise ValueError("zero polynomial has no support")
        for s in self.coefficients.values():
            if not s.terms and s.truncation is not None \
                    and not best < s.truncation:
                raise UndeterminedValuationError(
                    "truncation hides the minimal support exponent")
        return best

    def map_coefficients(self, fn) -> DifferentialPolynomial:
        return DifferentialPolynomial.from_coefficients(
            self.rank, self.order, self.derivation_index,
            {i: fn(s) for i, s in self.coefficients.items()},
            allow_zero=True, provenance=self.provenance)

    def with_provenance(self, *records) -> DifferentialPolynomial:
        return DifferentialPolynomial(
            self.rank, self.order, self.derivation_index, self.coefficients,
            self.provenance + tuple(records))

    def __str__(self) -> str:
        from .textio import format_series
        parts = []
        for index in self.indices():
            parts.append(f"[{','.join(map(str, index))}] "
                         f"({format_series(self.coefficients[index])})")
        d = f"D{self.derivation_index}" if self.derivation_index else "D0"
        return f"<order {self.order} at {d}: " + " + ".join(parts) + ">"


def evaluate(poly: DifferentialPolynomial, y: GeneralizedSeries,
             spec: DerivationSpec) -> GeneralizedSeries:
    """F(y, Dy, ..., D^n y) with D fixed by the polynomial's derivation tag."""
    if y.rank != poly.rank:
        raise RankMismatchError("evaluation point rank mismatch")
    derivs = [y]
    for _ in range(poly.order):
        derivs.append(derive(derivs[-1], spec, poly.derivation_index))
    power_cache: dict[tuple[int, int], GeneralizedSeries] = {}

    def power(slot: int, mult: int) -> GeneralizedSeries:
        key = (slot, mult)
        if key not in power_cache:
            power_cache[key] = derivs[slot] ** mult
        return power_cache[key]

    total = GeneralizedSeries.zero(poly.rank)
    for index, coeff in poly.coefficients.items():
        term = coeff
        for slot, mult in enumerate(index):
            if mult:
                term = term * power(slot, mult)
        total = total + term
    return total


def partial_derivative(poly: DifferentialPolynomial,
                       index: MultiIndex) -> DifferentialPolynomial:
    """F^(I): the iterated formal partial with falling-factorial weights."""
    entries: dict[MultiIndex, GeneralizedSeries] = {}
    for j, coeff in poly.coefficients.items():
        if not mi_le(index, j):
            continue
        weight = 1
        for a, b in zip(j, index):
            for step in range(b):
                weight *= a - step
        target = mi_sub(j, index)
        scaled = coeff.scale(weight)
        if scaled.terms or scaled.truncation is not None:
            prev = entries.get(target)
            entries[target] = scaled if prev is None else prev + scaled
    return DifferentialPolynomial.from_coefficients(
        poly.rank, poly.order, poly.derivation_index, entries,
        allow_zero=True)


def taylor_check(poly: DifferentialPolynomial, p: GeneralizedSeries,
                 q: GeneralizedSeries,
                 spec: DerivationSpec) -> GeneralizedSeries:
    """Residual of the Taylor expansion identity; zero up to truncation.

    evaluate(F, p + q) - sum_I evaluate(F^(I), p)/I! * q^(I).
    """
    total = evaluate(poly, p + q, spec)
    maxima = [0] * (poly.order + 1)
    for index in poly.coefficients:
        maxima = [max(m, i) for m, i in zip(maxima, index)]
    q_derivs = [q]
    for _ in range(poly.order):
        q_derivs.append(derive(q_derivs[-1], spec, poly.derivation_index))
    for index in itertools.product(*(range(m + 1) for m in maxima)):
        part = partial_derivative(poly, index)
        if part.is_zero():
            continue
        piece = evaluate(part, p, spec).scale(
            Fraction(1, mi_factorial(index)))
        for slot, mult in enumerate(index):
            if mult:
                piece = piece * (q_derivs[slot] ** mult)
        total = total - piece
    return total


def weierstrass_normalize(
        poly: DifferentialPolynomial
) -> tuple[DifferentialPolynomial, int, Exponent]:
    """Divide by t^{min Supp F}; return (normalized, w, shift).

    After the shift every coefficient has valuation >= 0, some coefficient
    of total degree w sits at valuation 0, and every lower total degree
    stays strictly positive.
    """
    shift = poly.min_support()
    normalized = poly.map_coefficients(lambda s: s.divide_term(shift, 1))
    w = weierstrass_order(normalized)
    return normalized, w, shift


def weierstrass_order(poly: DifferentialPolynomial) -> int:
    zero = Exponent.zero(poly.rank)
    w: int | None = None
    for index, coeff in poly.coefficients.items():
        v = coeff.valuation_lower_bound()
        if v is None:
            continue
        if v < zero:
            raise ValueError(
                f"coefficient at {index} has v = {v} < 0: not normalized")
        if coeff.terms and coeff.terms[0][0] == zero:
            length = mi_length(index)
            w = length if w is None else min(w, length)
    if w is None:
        raise ValueError("no coefficient of valuation 0: not normalized")
    return w


@dataclass(frozen=True)
class IndicialData:
    """The indicial polynomial of a normalized equation of Weierstrass order 1.

    ``witness_set`` lists the multi-indices of length 1 whose coefficients
    have valuation 0; ``pi_coefficients`` is dense, lowest degree first, with
    the X^d entry coming from the witness of weight d.  ``rational_roots``
    are the positive rational roots (each exactly a root), and
    ``irrational_root_flag`` certifies whether a further positive real root
    exists outside the rationals.
    """

    witness_set: tuple[MultiIndex, ...]
    pi_coefficients: tuple[Fraction, ...]
    rational_roots: tuple[Fraction, ...]
    irrational_root_flag: bool

    def pi_value(self, x: Fraction) -> Fraction:
        out = Fraction(0)
        for c in reversed(self.pi_coefficients):
            out = out * x + c
        return out


def indicial_data(poly: DifferentialPolynomial,
                  spec: DerivationSpec) -> IndicialData:
    w = weierstrass_order(poly)
    if w != 1:
        raise ValueError(f"indicial polynomial needs Weierstrass order 1, "
                         f"got {w}")
    zero = Exponent.zero(poly.rank)
    witnesses = []
    coeffs = [Fraction(0)] * (poly.order + 1)
    for index, coeff in poly.coefficients.items():
        if mi_length(index) == 1 and coeff.terms \
                and coeff.terms[0][0] == zero:
            witnesses.append(index)
            coeffs[mi_weight(index)] += coeff.terms[0][1]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    roots = sorted(
        r for r in rational_roots(list(coeffs)) if r > 0)
    flag = has_positive_irrational_root(list(coeffs))
    return IndicialData(tuple(sorted(witnesses)), tuple(coeffs),
                        tuple(roots), flag)


def evaluation_support_bound(poly: DifferentialPolynomial, y_class: int,
                             y_support: GridSet,
                             spec: DerivationSpec) -> GridSet:
    """A GridSet containing Supp F(y) for y of leading class ``y_class``.

    Case split: at a class derivation D_l the bound is
    Supp F + T_l + <Supp y>; at the base derivation the bound depends on
    whether the class sits below the distinguished class k0 (derivative
    valuations shift by theta of the class) or at/above it (shift by
    ||I|| theta^(k0) per coefficient).
    """
    rank = poly.rank
    supp_points = GridSet.from_points(rank, poly.support())
    if poly.derivation_index >= 1:
        l = poly.derivation_index
        if y_class < l:
            raise ValueError(
                f"class {y_class} below the derivation class {l}")
        t_part = script_t(spec, l, poly.order)
        return gs_sum(gs_sum(supp_points, t_part), gs_semigroup(y_support))
    k0 = spec.constants.k0
    if y_class < k0:
        theta = spec.constants.theta(y_class)
        shifted = GridSet.empty(rank)
        for i in range(poly.order + 1):
            shifted = shifted.union(
                gs_sum(y_support, GridSet.point(i * theta)))
        return gs_sum(gs_sum(supp_points, script_t(spec, y_class, poly.order)),
                      gs_semigroup(shifted))
    theta0 = spec.constants.theta(k0)
    points = set()
    for index, coeff in poly.coefficients.items():
        shift = mi_weight(index) * theta0
        points.update(e + shift for e in coeff.support())
    base = GridSet.from_points(rank, points)
    return gs_sum(gs_sum(base, script_t(spec, k0, poly.order)),
                  gs_semigroup(y_support))

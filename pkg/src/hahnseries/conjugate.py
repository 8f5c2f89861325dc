"""The three equation transformations: conjugations and change of derivation.

Additive conjugation y = a + y~ rewrites an equation through the Taylor
expansion (new coefficients F^(J)(a)/J!).  Multiplicative conjugation
y = m z expands each D^j y = sum_i binom(j,i) D^{j-i}m D^i z and collects.
Change of derivation D_k -> D_l substitutes

    D_k^i y = q_{1,i} D_l y + ... + q_{i,i} D_l^i y,

where the q multi-sequence obeys q_{1,1} = m, q_{1,i+1} = D_k q_{1,i},
q_{j+1,i+1} = q_{j,i} m + D_k q_{j+1,i}, q_{i+1,i+1} = q_{i,i} m with
m = d_l/d_k (d_0 = 1).  Each q_{j,i} is an N-combination of products of
derivatives of m with j factors of total derivative weight i - j; the
symbolic form is available for cross-checking against closed forms
(q_{1,i} = D_k^{i-1} m, q_{i,i} = m^i).

Each transformation returns the new polynomial with a provenance record
carrying the applicable support bound, assembled from the supports of F,
the T_k sets, and the conjugation data by elementary transformations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .derivation import DerivationSpec, derive, script_t
from .diffpoly import DifferentialPolynomial, evaluate, partial_derivative
from .errors import HahnSeriesError
from .exponents import Exponent, MultiIndex, mi_factorial, mi_length, mi_weight
from .provenance import record
from .series import GeneralizedSeries
from .supports import GridSet, gs_add_generator, gs_semigroup, gs_sum


class ChangeOfDerivationError(HahnSeriesError):
    """No well-defined case of the change of derivation applies."""


# ---------------------------------------------------------------------------
# Additive conjugation


def additive_conjugate(poly: DifferentialPolynomial, a: GeneralizedSeries,
                       spec: DerivationSpec) -> DifferentialPolynomial:
    """The equation satisfied by y~ = y - a: coefficients F^(J)(a)/J!."""
    if a.rank != poly.rank:
        raise ValueError("conjugation series rank mismatch")
    maxima = [0] * (poly.order + 1)
    for index in poly.coefficients:
        maxima = [max(m, i) for m, i in zip(maxima, index)]
    entries: dict[MultiIndex, GeneralizedSeries] = {}
    for index in itertools.product(*(range(m + 1) for m in maxima)):
        part = partial_derivative(poly, index)
        if part.is_zero():
            continue
        value = evaluate(part, a, spec).scale(
            Fraction(1, mi_factorial(index)))
        if value.terms or value.truncation is not None:
            entries[index] = value
    bound = additive_support_bound(poly, a, spec)
    rec = record("additive-conjugation", support_bound=bound,
                 r_points=tuple(a.support()),
                 support=str(sorted(str(e) for e in a.support())))
    return DifferentialPolynomial.from_coefficients(
        poly.rank, poly.order, poly.derivation_index, entries,
        provenance=poly.provenance + (rec,))


def additive_support_bound(poly: DifferentialPolynomial,
                           a: GeneralizedSeries,
                           spec: DerivationSpec) -> GridSet | None:
    """Supp bound for the additive conjugation, per case; None off-case."""
    rank = poly.rank
    zero = Exponent.zero(rank)
    supp_a = a.support()
    if any(not zero < e for e in supp_a):
        return None
    supp_f = GridSet.from_points(rank, poly.support())
    k = poly.derivation_index
    if k >= 1:
        if any(e.leading_class() < k for e in supp_a):
            return None
        gen_part = gs_semigroup(GridSet.from_points(rank, supp_a))
        return gs_sum(gs_sum(supp_f, script_t(spec, k, poly.order)), gen_part)
    classes = {e.leading_class() for e in supp_a}
    if len(classes) != 1:
        return None
    l = classes.pop()
    k0 = spec.constants.k0
    if l < k0:
        theta = spec.constants.theta(l)
        shifted = {e + i * theta for e in supp_a
                   for i in range(poly.order + 1)}
        gen_part = gs_semigroup(GridSet.from_points(rank, shifted))
        return gs_sum(gs_sum(supp_f, script_t(spec, l, poly.order)), gen_part)
    theta0 = spec.constants.theta(k0)
    points = set()
    for index, coeff in poly.coefficients.items():
        shift = mi_weight(index) * theta0
        points.update(e + shift for e in coeff.support())
    base = GridSet.from_points(rank, points)
    gen_part = gs_semigroup(GridSet.from_points(rank, supp_a))
    return gs_sum(gs_sum(base, script_t(spec, k0, poly.order)), gen_part)


# ---------------------------------------------------------------------------
# Multiplicative conjugation

_ZPoly = dict[MultiIndex, GeneralizedSeries]


def _zpoly_scale(poly: _ZPoly, s: GeneralizedSeries) -> _ZPoly:
    return {j: c * s for j, c in poly.items()}


def _zpoly_mul_linear(poly: _ZPoly,
                      form: list[tuple[int, GeneralizedSeries]]) -> _ZPoly:
    out: _ZPoly = {}
    for j, c in poly.items():
        for slot, s in form:
            prod = c * s
            if not prod.terms and prod.truncation is None:
                continue
            key = j[:slot] + (j[slot] + 1,) + j[slot + 1:]
            prev = out.get(key)
            out[key] = prod if prev is None else prev + prod
    return out


def _collect(rank: int, order: int, derivation_index: int,
             pieces: _ZPoly) -> dict[MultiIndex, GeneralizedSeries]:
    entries: dict[MultiIndex, GeneralizedSeries] = {}
    for j, c in pieces.items():
        if c.terms or c.truncation is not None:
            entries[j] = c
    return entries


def multiplicative_conjugate(poly: DifferentialPolynomial,
                             m: GeneralizedSeries,
                             spec: DerivationSpec) -> DifferentialPolynomial:
    """The equation satisfied by z where y = m z, for a single-term m."""
    if not m.is_single_term():
        raise ValueError("multiplicative conjugation needs a single term")
    n = poly.order
    lam, _ = m.leading_term()
    m_derivs = [m]
    for _ in range(n):
        m_derivs.append(derive(m_derivs[-1], spec, poly.derivation_index))
    zero_index = (0,) * (n + 1)
    forms: list[list[tuple[int, GeneralizedSeries]]] = []
    for j in range(n + 1):
        forms.append([(i, m_derivs[j - i].scale(comb(j, i)))
                      for i in range(j + 1)])
    acc: _ZPoly = {}
    for index, coeff in poly.coefficients.items():
        piece: _ZPoly = {zero_index: coeff}
        for slot, mult in enumerate(index):
            for _ in range(mult):
                piece = _zpoly_mul_linear(piece, forms[slot])
        for j, c in piece.items():
            prev = acc.get(j)
            acc[j] = c if prev is None else prev + c
    entries = _collect(poly.rank, n, poly.derivation_index, acc)
    bound = multiplicative_support_bound(poly, lam, spec)
    rec = record("multiplicative-conjugation", support_bound=bound,
                 r_points=(lam,) if Exponent.zero(poly.rank) < lam else (),
                 exponent=str(lam))
    return DifferentialPolynomial.from_coefficients(
        poly.rank, n, poly.derivation_index, entries, allow_zero=True,
        provenance=poly.provenance + (rec,))


def multiplicative_support_bound(poly: DifferentialPolynomial, lam: Exponent,
                                 spec: DerivationSpec) -> GridSet | None:
    rank = poly.rank
    zero = Exponent.zero(rank)
    if lam.is_zero():
        return GridSet.from_points(rank, poly.support())
    supp_f = GridSet.from_points(rank, poly.support())
    k = poly.derivation_index
    if k >= 1:
        if not zero < lam or lam.leading_class() < k:
            return None
        return gs_add_generator(
            gs_sum(supp_f, script_t(spec, k, poly.order)), lam)
    if not zero < lam:
        return None
    l = lam.leading_class()
    k0 = spec.constants.k0
    base_class = l if l < k0 else k0
    theta = spec.constants.theta(base_class)
    out = gs_sum(supp_f, script_t(spec, base_class, poly.order))
    for i in range(poly.order + 1):
        gen = lam + i * theta
        if zero < gen:
            out = gs_add_generator(out, gen)
        else:
            # fall back to the pointwise variant when a shifted generator
            # would not be lex-positive
            return _multiplicative_pointwise_bound(poly, lam, spec)
    return out


def _multiplicative_pointwise_bound(poly: DifferentialPolynomial,
                                    lam: Exponent,
                                    spec: DerivationSpec) -> GridSet:
    k0 = spec.constants.k0
    theta0 = spec.constants.theta(k0)
    points = set()
    for index, coeff in poly.coefficients.items():
        for j in range(mi_weight(index) + 1):
            shift = mi_length(index) * lam + j * theta0
            points.update(e + shift for e in coeff.support())
    return gs_sum(GridSet.from_points(poly.rank, points),
                  script_t(spec, k0, poly.order))


def multiplicative_structure(index: MultiIndex) -> dict[
        tuple[MultiIndex, MultiIndex], int]:
    """Symbolic expansion of y^(I) under y = m z.

    Returns the positive integer multiplicities l_{J,K} of the products
    m^(K) z^(J): expand each factor D^j(mz) = sum_i binom(j,i) D^{j-i}m D^i z
    and multiply out.  Used as the cross-check oracle for the coefficient
    formula of the multiplicative conjugation.
    """
    n = len(index) - 1
    zero = (0,) * (n + 1)
    acc: dict[tuple[MultiIndex, MultiIndex], int] = {(zero, zero): 1}
    for slot, mult in enumerate(index):
        for _ in range(mult):
            nxt: dict[tuple[MultiIndex, MultiIndex], int] = {}
            for (k_idx, j_idx), count in acc.items():
                for i in range(slot + 1):
                    key_k = k_idx[:slot - i] + (k_idx[slot - i] + 1,) \
                        + k_idx[slot - i + 1:]
                    key_j = j_idx[:i] + (j_idx[i] + 1,) + j_idx[i + 1:]
                    weight = count * comb(slot, i)
                    nxt[(key_k, key_j)] = nxt.get((key_k, key_j), 0) + weight
            acc = nxt
    return acc


# ---------------------------------------------------------------------------
# The q multi-sequence


@dataclass(frozen=True)
class QMatrix:
    """Entries q_{j,i} (1 <= j <= i <= order) plus the ratio m = d_l/d_k."""

    source_class: int
    target_class: int
    order: int
    m: GeneralizedSeries
    entries: dict[tuple[int, int], GeneralizedSeries]

    def entry(self, j: int, i: int) -> GeneralizedSeries:
        return self.entries[(j, i)]


def qji_coefficients(spec: DerivationSpec, k: int, l: int,
                     order: int) -> QMatrix:
    """The substitution coefficients for D_k^i y in terms of D_l^j y."""
    rank = spec.rank
    if k == 0:
        m = spec.constants.d_series(rank, l)
    else:
        expo_l, coeff_l = spec.constants.d_term(l)
        expo_k, coeff_k = spec.constants.d_term(k)
        m = GeneralizedSeries.monomial(
            rank, expo_l - expo_k, coeff_l / coeff_k)
    entries: dict[tuple[int, int], GeneralizedSeries] = {}
    if order >= 1:
        entries[(1, 1)] = m
    for i in range(1, order):
        entries[(1, i + 1)] = derive(entries[(1, i)], spec, k)
        for j in range(1, i):
            entries[(j + 1, i + 1)] = entries[(j, i)] * m + derive(
                entries[(j + 1, i)], spec, k)
        entries[(i + 1, i + 1)] = entries[(i, i)] * m
    return QMatrix(k, l, order, m, entries)


Jet = tuple[int, ...]
JetPoly = dict[Jet, int]


def _jet_trim(jet: Jet) -> Jet:
    while jet and jet[-1] == 0:
        jet = jet[:-1]
    return jet


def _jet_mul(a: JetPoly, b: JetPoly) -> JetPoly:
    out: JetPoly = {}
    for ja, ca in a.items():
        for jb, cb in b.items():
            width = max(len(ja), len(jb))
            key = _jet_trim(tuple(
                (ja[i] if i < len(ja) else 0) + (jb[i] if i < len(jb) else 0)
                for i in range(width)))
            out[key] = out.get(key, 0) + ca * cb
    return {j: c for j, c in out.items() if c}


def _jet_derive(p: JetPoly) -> JetPoly:
    out: JetPoly = {}
    for jet, coeff in p.items():
        for pos, mult in enumerate(jet):
            if not mult:
                continue
            lifted = list(jet) + [0] * (pos + 2 - len(jet))
            lifted[pos] -= 1
            lifted[pos + 1] += 1
            key = _jet_trim(tuple(lifted))
            out[key] = out.get(key, 0) + coeff * mult
    return {j: c for j, c in out.items() if c}


def qji_symbolic(order: int) -> dict[tuple[int, int], JetPoly]:
    """The q_{j,i} as formal polynomials in m, Dm, D^2 m, ...

    A jet key (e_0, e_1, ...) stands for m^{e_0} (Dm)^{e_1} (D^2m)^{e_2} ...;
    values are the positive integer coefficients.
    """
    m: JetPoly = {(1,): 1}
    entries: dict[tuple[int, int], JetPoly] = {}
    if order >= 1:
        entries[(1, 1)] = dict(m)
    for i in range(1, order):
        entries[(1, i + 1)] = _jet_derive(entries[(1, i)])
        for j in range(1, i):
            entries[(j + 1, i + 1)] = _jet_add(
                _jet_mul(entries[(j, i)], m),
                _jet_derive(entries[(j + 1, i)]))
        entries[(i + 1, i + 1)] = _jet_mul(entries[(i, i)], m)
    return entries


def _jet_add(a: JetPoly, b: JetPoly) -> JetPoly:
    out = dict(a)
    for j, c in b.items():
        out[j] = out.get(j, 0) + c
    return {j: c for j, c in out.items() if c}


# ---------------------------------------------------------------------------
# Change of derivation


def change_derivation(poly: DifferentialPolynomial, target: int,
                      spec: DerivationSpec) -> DifferentialPolynomial:
    """Rewrite the equation for the derivation D_target.

    Well-defined cases: (1) class to higher class; (2) base derivation to a
    class l with v(d_l) >= 0, directly; (2b) base derivation to l <= k0 with
    v(d_l) < 0, after the multiplicative pre-step y = d_l^-n z (recorded in
    provenance; solutions transform accordingly).  Anything else is refused.
    """
    k = poly.derivation_index
    rank = poly.rank
    if not 1 <= target <= rank:
        raise ChangeOfDerivationError(f"target class {target} outside "
                                      f"1..{rank}")
    if k == target:
        return poly
    consts = spec.constants
    if k >= 1:
        if target < k:
            raise ChangeOfDerivationError(
                f"change of derivation D_{k} -> D_{target} undefined for "
                "a lower target class")
        out = _substitute(poly, qji_coefficients(spec, k, target, poly.order),
                          target)
        bound = gs_sum(GridSet.from_points(rank, poly.support()),
                       script_t(spec, k, poly.order))
        return out.with_provenance(record(
            "change-derivation", support_bound=bound, source=k, target=target,
            pre_step=""))
    theta_l = consts.theta(target)
    zero = Exponent.zero(rank)
    if not theta_l < zero:
        out = _substitute(poly,
                          qji_coefficients(spec, 0, target, poly.order),
                          target)
        bound = _change_bound_base(poly, target, spec)
        return out.with_provenance(record(
            "change-derivation", support_bound=bound, source=0,
            target=target, pre_step=""))
    if target > consts.k0:
        raise ChangeOfDerivationError(
            f"change of derivation D_0 -> D_{target} with v(d_{target}) < 0 "
            f"and {target} > k0 = {consts.k0}: derivatives of solutions in "
            "that class cannot all stay infinitesimal")
    # pre-step: y = d_l^-n z keeps every later coefficient valuation >= 0
    n = poly.order
    expo, coeff = consts.d_term(target)
    pre = GeneralizedSeries.monomial(rank, -n * expo, coeff ** -n
                                     if n else Fraction(1))
    shifted = multiplicative_conjugate(poly, pre, spec)
    out = _substitute(shifted, qji_coefficients(spec, 0, target, poly.order),
                      target)
    bound = gs_add_generator(
        gs_sum(GridSet.from_points(rank, poly.support()),
               script_t(spec, target, poly.order)),
        -theta_l) if n else GridSet.from_points(rank, poly.support())
    return out.with_provenance(record(
        "change-derivation", support_bound=bound, source=0, target=target,
        pre_step=str(-n * expo)))


def _change_bound_base(poly: DifferentialPolynomial, l: int,
                       spec: DerivationSpec) -> GridSet | None:
    rank = poly.rank
    zero = Exponent.zero(rank)
    k0 = spec.constants.k0
    base = GridSet.from_points(rank, poly.support())
    cls = l if l < k0 else k0
    theta = spec.constants.theta(cls)
    out = gs_sum(base, script_t(spec, cls, poly.order))
    if theta.is_zero():
        return out
    if zero < theta:
        return gs_add_generator(out, theta)
    return None


def _substitute(poly: DifferentialPolynomial, q: QMatrix,
                target: int) -> DifferentialPolynomial:
    """Replace D_k^i y by sum_j q_{j,i} D_target^j y and collect."""
    n = poly.order
    zero_index = (0,) * (n + 1)
    one = GeneralizedSeries.constant(poly.rank, 1)
    forms: list[list[tuple[int, GeneralizedSeries]]] = [[(0, one)]]
    for i in range(1, n + 1):
        forms.append([(j, q.entry(j, i)) for j in range(1, i + 1)])
    acc: _ZPoly = {}
    for index, coeff in poly.coefficients.items():
        piece: _ZPoly = {zero_index: coeff}
        for slot, mult in enumerate(index):
            for _ in range(mult):
                piece = _zpoly_mul_linear(piece, forms[slot])
        for j, c in piece.items():
            prev = acc.get(j)
            acc[j] = c if prev is None else prev + c
    entries = _collect(poly.rank, n, target, acc)
    return DifferentialPolynomial.from_coefficients(
        poly.rank, n, target, entries, allow_zero=True,
        provenance=poly.provenance)


def transform_support_bound(kind: str, poly: DifferentialPolynomial,
                            spec: DerivationSpec,
                            a: GeneralizedSeries | None = None,
                            lam: Exponent | None = None,
                            target: int | None = None) -> GridSet | None:
    """Dispatch to the right-hand side of the applicable support bound."""
    if kind == "additive":
        return additive_support_bound(poly, a, spec)
    if kind == "multiplicative":
        return multiplicative_support_bound(poly, lam, spec)
    if kind == "change-derivation":
        k = poly.derivation_index
        if k >= 1:
            return gs_sum(GridSet.from_points(poly.rank, poly.support()),
                          script_t(spec, k, poly.order))
        theta_l = spec.constants.theta(target)
        if not theta_l < Exponent.zero(poly.rank):
            return _change_bound_base(poly, target, spec)
        return gs_add_generator(
            gs_sum(GridSet.from_points(poly.rank, poly.support()),
                   script_t(spec, target, poly.order)),
            -theta_l)
    raise ValueError(f"unknown transformation kind {kind!r}")

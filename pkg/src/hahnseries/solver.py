"""Term-by-term solving of polynomial differential equations.

The solver looks for series solutions with valuation above the threshold
alpha_0 = max(0, -n v(d_k0)) (below which not all derivatives stay
infinitesimal), one Archimedean class at a time, most dominant class first.
Each class branch rewrites the equation for the class derivation D_c,
normalizes it, and proceeds by the Weierstrass order w:

  w = 0   the unit constant coefficient can never be cancelled: the
          residual valuation is pinned - stabilization.
  w = 1   the dichotomy loop: the next exponent is either the residual
          valuation (newton step, coefficient -lead/pi(mu_c)) or has its
          class-c coordinate among the positive rational roots of the
          indicial polynomial.  Resonances at the top class are free
          coefficients resolved by policy; below the top class they open a
          block explored through the conjugation package (additive by the
          prefix, multiplicative by t^(rho e_c), normalize), whose content
          is a recursive solve over the higher classes plus a constant
          layer.
  w >= 2  one reduction step: candidate leading terms balance the valuation
          levels min_{|I|=l} v(c_I) + l*mu across total degrees l (the
          coefficient is a nonzero rational root of the balance
          polynomial); the additive/multiplicative conjugation plus
          normalization yields a strictly smaller (w, reverse class)
          instance.  The length-(w-1) partial derivatives are solved with a
          token budget first and their outcomes recorded; identically
          vanishing subresults impose no constraint.

Every outcome is re-checked against the substitution oracle (the original
equation evaluated at the reported prefix drives the valuation trace),
stabilized outcomes carry probe evidence, and every prefix exponent lands
in the reported support bound R, assembled from the recorded supports, the
T_k sets and the candidate exponents by elementary transformations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .conjugate import (ChangeOfDerivationError, additive_conjugate,
                        change_derivation, multiplicative_conjugate)
from .derivation import DerivationSpec, script_t
from .diffpoly import (DifferentialPolynomial, IndicialData, evaluate,
                       indicial_data, partial_derivative,
                       weierstrass_normalize)
from .errors import HahnSeriesError
from .exponents import Exponent, mi_length, mi_weight
from .polyroots import has_positive_irrational_root, rational_roots
from .provenance import TransformRecord, record
from .series import GeneralizedSeries
from .supports import GridSet, gs_semigroup


@dataclass(frozen=True)
class SolveBudget:
    max_terms: int = 12
    max_branches: int = 64
    max_reduction_depth: int = 6
    enumeration_cap: int = 10000

    def __post_init__(self):
        if min(self.max_terms, self.max_branches, self.max_reduction_depth,
               self.enumeration_cap) <= 0:
            raise ValueError("budget components must be positive")


@dataclass(frozen=True)
class ResonancePolicy:
    """What to do at a free coefficient: zero it, take a value, or report."""

    kind: str = "zero"
    value: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("zero", "value", "report"):
            raise ValueError(f"unknown resonance policy {self.kind!r}")
        if self.kind == "value" and self.value is None:
            raise ValueError("value policy needs a rational value")

    @classmethod
    def parse(cls, text: str) -> ResonancePolicy:
        if text in ("zero", "report"):
            return cls(text)
        if text.startswith("value:"):
            return cls("value", Fraction(text[len("value:"):]))
        raise ValueError(f"unknown resonance policy {text!r}")


@dataclass(frozen=True)
class ResonanceNote:
    exponent: Exponent
    note: str


SOLUTION = "solution"
STABILIZED = "stabilized"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class SolveOutcome:
    variant: str
    prefix: GeneralizedSeries
    valuation_trace: tuple[tuple[int, Exponent | None], ...]
    resonances: tuple[ResonanceNote, ...]
    support_bound: GridSet
    provenance: tuple[TransformRecord, ...]
    warnings: tuple[str, ...] = ()
    stabilized_value: Exponent | None = None
    stabilization_evidence: tuple[Exponent, ...] = ()
    certified_below: Exponent | None = None


def alpha0(spec: DerivationSpec, order: int) -> Exponent:
    """max(0, -order * v(d_k0)): the infinitesimal-derivatives threshold."""
    zero = Exponent.zero(spec.rank)
    shifted = (-order) * spec.constants.theta(spec.constants.k0)
    return shifted if zero < shifted else zero


def reduce_to_positive(poly: DifferentialPolynomial,
                       coefficient: Fraction, exponent: Exponent,
                       spec: DerivationSpec
                       ) -> tuple[DifferentialPolynomial, Exponent | None]:
    """Conjugate away a candidate leading term at or below alpha_0.

    Applies the additive conjugation by m0 t^mu0 followed by the
    multiplicative conjugation by t^(mu0 - alpha_0); the associated unknown
    changes to (y - m0 t^mu0) / t^(mu0 - alpha_0), whose valuation exceeds
    alpha_0.  Returns (new polynomial, shift); the identity with shift None
    when mu0 > alpha_0 and no reduction is needed.
    """
    if poly.derivation_index != 0:
        raise ValueError("reduction applies to base-derivation equations")
    a0 = alpha0(spec, poly.order)
    if a0 < exponent:
        return poly, None
    shifted = additive_conjugate(
        poly, GeneralizedSeries.monomial(poly.rank, exponent, coefficient),
        spec)
    shift = exponent - a0
    out = multiplicative_conjugate(
        shifted, GeneralizedSeries.monomial(poly.rank, shift), spec)
    return out, shift


# ---------------------------------------------------------------------------
# Weierstrass-order-1 steps (public surface used by the loop)


@dataclass(frozen=True)
class Candidate:
    exponent: Exponent  # full exponent for newton, rho*e_c for resonance
    kind: str           # "newton" | "resonance"


def next_candidates(poly: DifferentialPolynomial,
                    prefix: GeneralizedSeries, spec: DerivationSpec,
                    floor: Exponent | None = None) -> list[Candidate]:
    """Possible next exponents after ``prefix`` for a normalized w=1 equation.

    The newton candidate is the residual valuation when it lies in the
    equation's class beyond the floor; resonance candidates fix the class-c
    coordinate to a positive rational indicial root (deeper coordinates are
    determined by the recursive solve over higher classes).  Roots whose
    coordinate exceeds the residual's cannot belong to any solution - the
    residual would be pinned - and are pruned.
    """
    c = poly.derivation_index
    if c < 1:
        raise ValueError("candidates need a class derivation")
    data = indicial_data(poly, spec)
    if floor is None:
        floor = _last_exponent(prefix)
    residual = evaluate(poly, prefix, spec)
    residual.valuation_and_leading()  # raises when truncation hides it
    return _loop_candidates(poly, data, residual, c, floor)


def _last_exponent(prefix: GeneralizedSeries) -> Exponent | None:
    return prefix.terms[-1][0] if prefix.terms else None


def _loop_candidates(poly: DifferentialPolynomial, data: IndicialData,
                     residual: GeneralizedSeries, c: int,
                     gate: Exponent | None) -> list[Candidate]:
    if not residual.terms:
        return []
    v_res = residual.terms[0][0]
    rank = poly.rank
    out: list[Candidate] = []
    if v_res.leading_class() == c and (gate is None or gate < v_res) \
            and data.pi_value(v_res[c]) != 0:
        out.append(Candidate(v_res, "newton"))
    for rho in data.rational_roots:
        if rho > v_res[c]:
            continue  # dead skip: nothing could cancel the residual
        base = rho * Exponent.unit(rank, c)
        if gate is not None:
            if rho < gate[c]:
                continue
            if rho == gate[c] and (c == rank or not gate < base):
                # same class-c coordinate: at the top class the exponent is
                # pinned at or behind the gate; lower classes re-enter the
                # block, where the shifted floor rejects consumed exponents
                if c == rank:
                    continue
        out.append(Candidate(base, "resonance"))
    out.sort(key=lambda d: (d.exponent[c], d.kind != "newton", d.exponent))
    return out


@dataclass(frozen=True)
class W1Step:
    coefficient: Fraction | None  # None when the coefficient is free
    free: bool
    prefix: GeneralizedSeries


def solve_w1_step(poly: DifferentialPolynomial, prefix: GeneralizedSeries,
                  exponent: Exponent, spec: DerivationSpec,
                  policy: ResonancePolicy = ResonancePolicy()) -> W1Step:
    """Coefficient at a candidate exponent.

    At a newton exponent with pi(mu_c) != 0 the coefficient cancels the
    residual's leading term; at an indicial root it is free, resolved by the
    policy.  A residual lead sitting at an indicial root admits no
    consistent coefficient: dead branch.
    """
    c = poly.derivation_index
    data = indicial_data(poly, spec)
    pi_at = data.pi_value(exponent[c])
    residual = evaluate(poly, prefix, spec)
    v_res = residual.valuation()
    if pi_at != 0:
        if v_res is None or v_res != exponent:
            raise HahnSeriesError(
                f"candidate {exponent} is neither the residual valuation "
                "nor an indicial root")
        coeff = -residual.leading_term()[1] / pi_at
        return W1Step(coeff, False, prefix + GeneralizedSeries.monomial(
            poly.rank, exponent, coeff))
    if v_res is not None and v_res == exponent:
        raise HahnSeriesError(
            f"dead branch: residual lead at {exponent} sits at an indicial "
            "root and cannot be cancelled")
    if policy.kind == "value":
        return W1Step(policy.value, True,
                      prefix + GeneralizedSeries.monomial(
                          poly.rank, exponent, policy.value))
    return W1Step(None, True, prefix)


# ---------------------------------------------------------------------------
# Weierstrass reduction (w >= 2)


@dataclass(frozen=True)
class ReducedInstance:
    poly: DifferentialPolynomial
    leading_exponent: Exponent
    leading_coefficient: Fraction
    shift: Exponent          # v_min divided out after the conjugations
    w_before: int
    w_after: int
    target_class: int


@dataclass(frozen=True)
class ReductionResult:
    needed: bool
    instances: tuple[ReducedInstance, ...]
    subproblem_reports: tuple[tuple[tuple[int, ...], str], ...]
    warnings: tuple[str, ...] = ()


def _balance_candidates(poly: DifferentialPolynomial, c: int,
                        floor: Exponent | None
                        ) -> tuple[list[tuple[Exponent, Fraction]],
                                   list[str]]:
    """Leading-term candidates (mu, m) from balancing valuation levels."""
    levels: dict[int, Exponent] = {}
    for index, coeff in poly.coefficients.items():
        v = coeff.valuation_lower_bound()
        if v is None:
            continue
        length = mi_length(index)
        if length not in levels or v < levels[length]:
            levels[length] = v
    warnings: list[str] = []
    mus: set[Exponent] = set()
    for l1, l2 in itertools.combinations(sorted(levels), 2):
        mu = (levels[l1] - levels[l2]) * Fraction(1, l2 - l1)
        if mu.leading_class() != c or mu[c] <= 0:
            continue
        if floor is not None and not floor < mu:
            continue
        minval = min(levels[ell] + ell * mu for ell in levels)
        if levels[l1] + l1 * mu == minval and levels[l2] + l2 * mu == minval:
            mus.add(mu)
    out: list[tuple[Exponent, Fraction]] = []
    for mu in sorted(mus):
        minval = min(levels[ell] + ell * mu for ell in levels)
        active = {ell for ell in levels if levels[ell] + ell * mu == minval}
        balance = [Fraction(0)] * (max(active) + 1)
        for index, coeff in poly.coefficients.items():
            length = mi_length(index)
            if length not in active or not coeff.terms:
                continue
            lead_expo, lead_coeff = coeff.terms[0]
            if lead_expo != levels[length]:
                continue
            balance[length] += lead_coeff * (mu[c] ** mi_weight(index))
        roots = sorted(r for r in rational_roots(balance) if r != 0)
        if _has_real_irrational_root(balance):
            warnings.append(
                f"irrational leading coefficient possible at exponent {mu}; "
                "those branches are not explored")
        out.extend((mu, m) for m in roots)
    return out, warnings


def _has_real_irrational_root(balance: list[Fraction]) -> bool:
    mirrored = [b * (-1) ** i for i, b in enumerate(balance)]
    return has_positive_irrational_root(balance) \
        or has_positive_irrational_root(mirrored)


def reduce_weierstrass(poly: DifferentialPolynomial, spec: DerivationSpec,
                       budget: SolveBudget = SolveBudget(),
                       floor: Exponent | None = None) -> ReductionResult:
    """One reduction step for an equation of Weierstrass order above 1.

    Runs the length-(w-1) partial derivatives through the solver with a
    token budget (their stabilization data is recorded; identically
    vanishing results impose no constraint), derives the leading-term
    candidates from the valuation balance, and applies the conjugation
    package per candidate.  No-op gate for w <= 1.
    """
    c = poly.derivation_index
    if c < 1:
        raise ValueError("reduction needs a class derivation")
    normalized, w, _shift = weierstrass_normalize(poly)
    if w <= 1:
        return ReductionResult(False, (), ())
    reports = []
    for index in _witnesses_below(normalized, w):
        part = partial_derivative(normalized, index)
        if part.is_zero():
            reports.append((tuple(index), "zero"))
            continue
        try:
            sub = solve(part, spec,
                        SolveBudget(max_terms=2, max_branches=4,
                                    max_reduction_depth=2))
            summary = ",".join(sorted({o.variant for o in sub})) or \
                "no constraint"
        except HahnSeriesError as err:
            summary = f"error: {err}"
        reports.append((tuple(index), summary))
    candidates, warnings = _balance_candidates(normalized, c, floor)
    instances = tuple(_reduce_with(normalized, mu, m, w, spec)
                      for mu, m in candidates)
    return ReductionResult(True, instances, tuple(reports), tuple(warnings))


def _witnesses_below(poly: DifferentialPolynomial,
                     w: int) -> list[tuple[int, ...]]:
    """Length-(w-1) indices one unit below the valuation-zero witnesses."""
    zero = Exponent.zero(poly.rank)
    witnesses = [i for i, s in poly.coefficients.items()
                 if mi_length(i) == w and s.terms
                 and s.terms[0][0] == zero]
    out = set()
    for index in witnesses:
        for pos, mult in enumerate(index):
            if mult:
                out.add(index[:pos] + (mult - 1,) + index[pos + 1:])
    return sorted(out)


def _reduce_with(normalized: DifferentialPolynomial, mu: Exponent,
                 m: Fraction, w: int,
                 spec: DerivationSpec) -> ReducedInstance:
    rank = normalized.rank
    conj = additive_conjugate(
        normalized, GeneralizedSeries.monomial(rank, mu, m), spec)
    hat = multiplicative_conjugate(
        conj, GeneralizedSeries.monomial(rank, mu), spec)
    reduced, w_after, v_min = weierstrass_normalize(hat)
    return ReducedInstance(reduced, mu, m, v_min, w, w_after,
                           normalized.derivation_index)


# ---------------------------------------------------------------------------
# Branch machinery


@dataclass(frozen=True)
class _Frame:
    """Affine coordinates: y = offset + coeff * t^shift * z."""

    offset: GeneralizedSeries
    shift: Exponent
    coeff: Fraction = Fraction(1)

    @classmethod
    def identity(cls, rank: int) -> _Frame:
        return cls(GeneralizedSeries.zero(rank), Exponent.zero(rank))

    def factor(self) -> GeneralizedSeries:
        return GeneralizedSeries.monomial(self.offset.rank, self.shift,
                                          self.coeff)

    def map_series(self, z: GeneralizedSeries) -> GeneralizedSeries:
        return self.offset + self.factor() * z

    def map_exponent(self, e: Exponent) -> Exponent:
        return self.shift + e

    def after_additive(self, q: GeneralizedSeries) -> _Frame:
        if not q.terms:
            return self
        return _Frame(self.offset + self.factor() * q, self.shift, self.coeff)

    def after_multiplicative(self, expo: Exponent,
                             coeff: Fraction = Fraction(1)) -> _Frame:
        return _Frame(self.offset, self.shift + expo, self.coeff * coeff)


@dataclass(frozen=True)
class _Branch:
    frame: _Frame
    trace: tuple[tuple[int, Exponent | None], ...] = ()
    resonances: tuple[ResonanceNote, ...] = ()
    warnings: tuple[str, ...] = ()
    provenance: tuple[TransformRecord, ...] = ()

    def note(self, exponent: Exponent, text: str) -> _Branch:
        if any(n.exponent == exponent for n in self.resonances):
            return self
        return replace(self, resonances=self.resonances
                       + (ResonanceNote(exponent, text),))

    def warn(self, text: str) -> _Branch:
        if text in self.warnings:
            return self
        return replace(self, warnings=self.warnings + (text,))

    def logged(self, *records: TransformRecord) -> _Branch:
        return replace(self, provenance=self.provenance + tuple(records))

    def traced(self, length: int, value: Exponent | None) -> _Branch:
        return replace(self, trace=self.trace + ((length, value),))


@dataclass
class _Ctx:
    original: DifferentialPolynomial
    spec: DerivationSpec
    budget: SolveBudget
    policy: ResonancePolicy
    branches_left: int
    outcomes: list[SolveOutcome] = field(default_factory=list)
    emitted: set = field(default_factory=set)

    def take_branch(self) -> bool:
        if self.branches_left <= 0:
            return False
        self.branches_left -= 1
        return True


def solve(poly: DifferentialPolynomial, spec: DerivationSpec,
          budget: SolveBudget = SolveBudget(),
          policy: ResonancePolicy = ResonancePolicy()) -> list[SolveOutcome]:
    """Depth-first branch exploration; deterministic outcome order."""
    spec.constants  # validate before any work
    if poly.is_zero():
        raise ValueError("cannot solve the zero equation")
    ctx = _Ctx(poly, spec, budget, policy, budget.max_branches)
    floor = alpha0(spec, poly.order)
    base = _Branch(_Frame.identity(poly.rank))
    if poly.derivation_index == 0:
        classes = list(range(spec.rank, 0, -1))
    else:
        classes = list(range(spec.rank, poly.derivation_index - 1, -1))
    _march(ctx, base, poly, classes, floor, allow_constant=False,
           depth=budget.max_reduction_depth)
    ctx.outcomes.sort(key=_outcome_key)
    return list(ctx.outcomes)


def _outcome_key(outcome: SolveOutcome):
    return (tuple(e.coords for e, _ in outcome.prefix.terms),
            outcome.variant)


def _emit(ctx: _Ctx, branch: _Branch, variant: str,
          prefix: GeneralizedSeries, *,
          stabilized_value: Exponent | None = None,
          evidence: tuple[Exponent, ...] = (),
          certified_below: Exponent | None = None) -> None:
    key = (variant, prefix.terms, stabilized_value)
    if key in ctx.emitted:
        # same outcome reached along another class branch: merge the notes
        for i, prior in enumerate(ctx.outcomes):
            if (prior.variant, prior.prefix.terms,
                    prior.stabilized_value) == key:
                known = {n.exponent for n in prior.resonances}
                extra = tuple(n for n in branch.resonances
                              if n.exponent not in known)
                fresh = tuple(w for w in branch.warnings
                              if w not in prior.warnings)
                if extra or fresh:
                    ctx.outcomes[i] = replace(
                        prior, resonances=prior.resonances + extra,
                        warnings=prior.warnings + fresh)
                break
        return
    ctx.emitted.add(key)
    bound = support_bound_R(branch.provenance, ctx.spec, ctx.original.rank)
    ctx.outcomes.append(SolveOutcome(
        variant, prefix, branch.trace, branch.resonances, bound,
        branch.provenance, branch.warnings, stabilized_value, evidence,
        certified_below))


def support_bound_R(provenance: tuple[TransformRecord, ...],
                    spec: DerivationSpec, rank: int) -> GridSet:
    """Replay a provenance trail into the support-bound semigroup R.

    Each record contributes exponent data in the coordinates local to its
    step; the semigroup generated by all of it contains every prefix
    exponent the branch produced (newton exponents lie in
    Supp F + T + <earlier exponents>, resonance/reduction exponents are
    recorded directly, and multiplicative shifts telescope through the
    recorded candidate exponents).
    """
    zero = Exponent.zero(rank)
    pieces = GridSet.empty(rank)
    points: set[Exponent] = set()
    for rec in provenance:
        for grid in rec.r_grids:
            pieces = pieces.union(grid)
        points.update(p for p in rec.r_points if not p < zero)
    if points:
        pieces = pieces.union(GridSet.from_points(rank, points))
    if pieces.is_empty():
        return GridSet.zero_point(rank)
    return gs_semigroup(pieces)


def _residual_value(ctx: _Ctx, prefix: GeneralizedSeries) -> Exponent | None:
    return evaluate(ctx.original, prefix, ctx.spec).valuation_lower_bound()


# -- the descent -------------------------------------------------------------


def _march(ctx: _Ctx, branch: _Branch, poly: DifferentialPolynomial,
           classes: list[int], floor: Exponent | None, allow_constant: bool,
           depth: int) -> bool:
    """Constant layer (blocks only), then each class, most dominant first."""
    variants: list[tuple[DifferentialPolynomial, _Branch]]
    engaged = False
    if allow_constant:
        layered = _constant_layer(ctx, branch, poly, floor)
        if layered is None:
            return True
        variants, engaged = layered
    else:
        variants = [(poly, branch)]
    for current, cur_branch in variants:
        for c in classes:
            try:
                prepared, class_branch, class_floor = _to_class(
                    ctx, cur_branch, current, c, floor)
            except ChangeOfDerivationError as err:
                cur_branch = cur_branch.warn(str(err))
                continue
            engaged |= _dispatch(ctx, class_branch, prepared, current, c,
                                 class_floor, depth)
        residual = current.constant_coefficient()
        if not residual.terms:
            prefix = cur_branch.frame.offset
            certified = (cur_branch.frame.map_exponent(residual.truncation)
                         if residual.truncation is not None else None)
            done = cur_branch.traced(len(prefix.terms),
                                     _residual_value(ctx, prefix))
            _emit(ctx, done, SOLUTION, prefix, certified_below=certified)
            engaged = True
    if not engaged:
        residual = poly.constant_coefficient()
        if residual.terms:
            _emit_stabilized(ctx, branch, branch.frame.offset)
            return True
    return engaged


def _constant_layer(ctx: _Ctx, branch: _Branch,
                    poly: DifferentialPolynomial, floor: Exponent | None):
    """Constant candidates of a block equation (exponent 0 locally).

    The valuation-zero level of the pure-power coefficients gives a
    polynomial constraint psi(C) = 0: identically zero psi means a free
    constant (policy); otherwise the branch continues through each nonzero
    rational root and, when psi(0) = 0, through the no-constant branch.
    Returns (continuations, engaged) or None when the policy stopped.
    """
    rank = poly.rank
    zero = Exponent.zero(rank)
    if floor is not None and not floor < zero:
        return [(poly, branch)], False
    psi: list[Fraction] = []
    for index, coeff in poly.coefficients.items():
        if any(index[1:]):
            continue
        degree = index[0]
        if len(psi) <= degree:
            psi.extend([Fraction(0)] * (degree + 1 - len(psi)))
        psi[degree] += coeff.coefficient(zero)
    while psi and psi[-1] == 0:
        psi.pop()
    mapped = branch.frame.map_exponent(zero)
    if not psi:
        if ctx.policy.kind == "value":
            value = ctx.policy.value
            shifted = additive_conjugate(
                poly, GeneralizedSeries.constant(rank, value), ctx.spec)
            noted = branch.note(mapped, f"free coefficient (took {value})")
            frame = branch.frame.after_additive(
                GeneralizedSeries.constant(rank, value))
            return [(shifted, replace(noted, frame=frame))], True
        noted = branch.note(mapped, "free coefficient (left 0)")
        if ctx.policy.kind == "report":
            residual = poly.constant_coefficient()
            if residual.terms:
                _emit_stabilized(ctx, noted, branch.frame.offset)
            else:
                _emit(ctx, noted, SOLUTION, branch.frame.offset)
            return None
        return [(poly, noted)], False
    out: list[tuple[DifferentialPolynomial, _Branch]] = []
    if psi[0] == 0:
        out.append((poly, branch))
    if _has_real_irrational_root(psi):
        branch = branch.warn("irrational constant candidate exists; the "
                             "branch set may be incomplete")
        out = [(p, branch) for p, _ in out]
    engaged = False
    for root in sorted(r for r in rational_roots(psi) if r != 0):
        if not ctx.take_branch():
            branch = branch.warn("branch budget exhausted; constant "
                                 "candidates dropped")
            out = [(p, branch) for p, _ in out]
            break
        shifted = additive_conjugate(
            poly, GeneralizedSeries.constant(rank, root), ctx.spec)
        frame = branch.frame.after_additive(
            GeneralizedSeries.constant(rank, root))
        rec = record("constant-step", value=root)
        out.append((shifted, replace(branch.logged(rec), frame=frame)))
        engaged = True
    return out, engaged


def _to_class(ctx: _Ctx, branch: _Branch, poly: DifferentialPolynomial,
              c: int, floor: Exponent | None):
    """Rewrite for D_c, tracking the 2b pre-step in the frame and floor."""
    if poly.derivation_index == c:
        return poly, branch, floor
    before = len(poly.provenance)
    changed = change_derivation(poly, c, ctx.spec)
    new_records = changed.provenance[before:]
    frame = branch.frame
    for rec in new_records:
        pre = rec.get("pre_step")
        if pre:
            from .textio import parse_exponent
            shift = parse_exponent(pre, poly.rank)
            _, t_coeff = ctx.spec.constants.d_term(c)
            factor = t_coeff ** (-poly.order) if poly.order else Fraction(1)
            frame = frame.after_multiplicative(shift, factor)
            if floor is not None:
                floor = floor - shift
    return changed, replace(branch.logged(*new_records), frame=frame), floor


def _dispatch(ctx: _Ctx, branch: _Branch, poly: DifferentialPolynomial,
              base_poly: DifferentialPolynomial, c: int,
              floor: Exponent | None, depth: int) -> bool:
    """Normalize and dispatch on the Weierstrass order."""
    normalized, w, shift = weierstrass_normalize(poly)
    entry = record(
        "normalize", shift=shift, weierstrass_order=w, target_class=c,
        r_points=tuple(normalized.support()),
        r_grids=tuple(script_t(ctx.spec, cc, poly.order)
                      for cc in range(c, ctx.spec.rank + 1)))
    branch = branch.logged(entry)
    if w == 0:
        return False
    if w == 1:
        return _w1_enter(ctx, branch, normalized, base_poly, c, floor, depth)
    return _reduce_branches(ctx, branch, normalized, base_poly, c, floor,
                            depth, w)


def _w1_enter(ctx: _Ctx, branch: _Branch, poly: DifferentialPolynomial,
              base_poly: DifferentialPolynomial, c: int,
              floor: Exponent | None, depth: int) -> bool:
    data = indicial_data(poly, ctx.spec)
    if data.irrational_root_flag:
        branch = branch.warn(
            "indicial polynomial has a positive irrational root; the "
            "branch set and the support bound may be incomplete")
    branch = branch.logged(record(
        "indicial", roots=",".join(str(r) for r in data.rational_roots),
        r_points=tuple(r * Exponent.unit(poly.rank, c)
                       for r in data.rational_roots)))
    return _w1_iterate(ctx, branch, poly, data, base_poly, c, floor,
                       GeneralizedSeries.zero(poly.rank), depth)


def _w1_iterate(ctx: _Ctx, branch: _Branch, poly: DifferentialPolynomial,
                data: IndicialData, base_poly: DifferentialPolynomial,
                c: int, floor: Exponent | None, q: GeneralizedSeries,
                depth: int) -> bool:
    full = branch.frame.map_series(q)
    residual = evaluate(poly, q, ctx.spec)
    branch = branch.traced(len(full.terms), _residual_value(ctx, full))
    if not residual.terms:
        return _finish_zero_residual(ctx, branch, poly, data, base_poly, c,
                                     floor, q, residual, depth)
    if len(full.terms) >= ctx.budget.max_terms:
        _emit(ctx, branch, BUDGET_EXHAUSTED, full)
        return True
    gate = _gate(floor, q)
    candidates = _loop_candidates(poly, data, residual, c, gate)
    if not candidates:
        if q.terms:
            _march_down(ctx, branch, base_poly, c, q, full, depth)
            return True
        return False
    first = True
    for cand in candidates:
        if not first and not ctx.take_branch():
            branch = branch.warn("branch budget exhausted; candidates "
                                 "dropped")
            break
        first = False
        if cand.kind == "newton":
            pi_at = data.pi_value(cand.exponent[c])
            coeff = -residual.leading_term()[1] / pi_at
            step = GeneralizedSeries.monomial(poly.rank, cand.exponent,
                                              coeff)
            rec = record("newton-step", exponent=cand.exponent,
                         coefficient=coeff, r_points=(cand.exponent,))
            _w1_iterate(ctx, branch.logged(rec), poly, data, base_poly, c,
                        floor, q + step, depth)
        else:
            _resonance_block(ctx, branch, poly, base_poly, c, floor, q,
                             cand.exponent, depth)
    return True


def _gate(floor: Exponent | None, q: GeneralizedSeries) -> Exponent | None:
    last = _last_exponent(q)
    if last is None:
        return floor
    if floor is None or floor < last:
        return last
    return floor


def _finish_zero_residual(ctx: _Ctx, branch: _Branch,
                          poly: DifferentialPolynomial, data: IndicialData,
                          base_poly: DifferentialPolynomial, c: int,
                          floor: Exponent | None, q: GeneralizedSeries,
                          residual: GeneralizedSeries, depth: int) -> bool:
    """Exact (or certified-below-truncation) solution; free families."""
    gate = _gate(floor, q)
    pending = [rho for rho in data.rational_roots
               if _root_beyond(gate, rho, c, poly.rank)]
    if ctx.policy.kind == "value" and pending:
        rho = pending[0]
        step = GeneralizedSeries.monomial(
            poly.rank, rho * Exponent.unit(poly.rank, c), ctx.policy.value)
        mapped = branch.frame.map_exponent(step.terms[0][0])
        noted = branch.note(mapped,
                            f"free coefficient (took {ctx.policy.value})")
        rec = record("resonance-step", exponent=step.terms[0][0],
                     coefficient=ctx.policy.value,
                     r_points=(step.terms[0][0],))
        return _w1_iterate(ctx, noted.logged(rec), poly, data, base_poly, c,
                           floor, q + step, depth)
    for rho in pending:
        mapped = branch.frame.map_exponent(rho * Exponent.unit(poly.rank, c))
        text = ("free coefficient (family reported; branch stopped)"
                if ctx.policy.kind == "report"
                else "free coefficient (left 0)")
        branch = branch.note(mapped, text)
    full = branch.frame.map_series(q)
    certified = (branch.frame.map_exponent(residual.truncation)
                 if residual.truncation is not None else None)
    _emit(ctx, branch, SOLUTION, full, certified_below=certified)
    return True


def _root_beyond(gate: Exponent | None, rho: Fraction, c: int,
                 rank: int) -> bool:
    if gate is None:
        return True
    base = rho * Exponent.unit(rank, c)
    if rho > gate[c]:
        return True
    return rho == gate[c] and c < rank and gate < base


def _resonance_block(ctx: _Ctx, branch: _Branch,
                     poly: DifferentialPolynomial,
                     base_poly: DifferentialPolynomial, c: int,
                     floor: Exponent | None, q: GeneralizedSeries,
                     base: Exponent, depth: int) -> bool:
    """Explore the block of exponents with class-c coordinate at a root."""
    rank = poly.rank
    if c == rank:
        # pinned exponent, free coefficient, no deeper coordinates
        if ctx.policy.kind != "value":
            # adding any multiple cannot move the residual: dead for
            # solutions; nothing to explore
            return False
        data = indicial_data(poly, ctx.spec)
        step = GeneralizedSeries.monomial(rank, base, ctx.policy.value)
        mapped = branch.frame.map_exponent(base)
        noted = branch.note(mapped,
                            f"free coefficient (took {ctx.policy.value})")
        rec = record("resonance-step", exponent=base,
                     coefficient=ctx.policy.value, r_points=(base,))
        return _w1_iterate(ctx, noted.logged(rec), poly, data, base_poly, c,
                           floor, q + step, depth)
    if depth <= 0:
        _emit(ctx, branch.warn("block depth exhausted"), BUDGET_EXHAUSTED,
              branch.frame.map_series(q))
        return True
    conj = additive_conjugate(poly, q, ctx.spec)
    hat = multiplicative_conjugate(
        conj, GeneralizedSeries.monomial(rank, base), ctx.spec)
    try:
        block, _w_block, v0 = weierstrass_normalize(hat)
    except ValueError:
        return False
    frame = branch.frame.after_additive(q).after_multiplicative(base)
    rec = record("resonance-block", exponent=base, shift=v0,
                 r_points=(base,) + tuple(block.support()))
    gate = _gate(floor, q)
    new_floor = gate - base if gate is not None else None
    classes = list(range(rank, c - 1, -1))
    return _march(ctx, replace(branch.logged(rec), frame=frame), block,
                  classes, new_floor, allow_constant=True, depth=depth - 1)


def _march_down(ctx: _Ctx, branch: _Branch,
                base_poly: DifferentialPolynomial, c: int,
                q: GeneralizedSeries, full: GeneralizedSeries,
                depth: int) -> None:
    """Residual out of reach of class c: continue below or stabilize."""
    lowest = base_poly.derivation_index if base_poly.derivation_index else 1
    lower = list(range(c - 1, lowest - 1, -1))
    marched = False
    if lower:
        conj = additive_conjugate(base_poly, q, ctx.spec)
        frame = branch.frame.after_additive(q)
        marched = _march(ctx, replace(branch, frame=frame), conj, lower,
                         _last_exponent(q), allow_constant=False, depth=depth)
    if not marched:
        _emit_stabilized(ctx, branch, full)


def _emit_stabilized(ctx: _Ctx, branch: _Branch,
                     prefix: GeneralizedSeries) -> None:
    value = _residual_value(ctx, prefix)
    rank = ctx.original.rank
    base = value if value is not None else Exponent.zero(rank)
    last = _last_exponent(prefix)
    if last is not None and base < last:
        base = last
    unit = Exponent.unit(rank, rank)
    probes = tuple(base + i * unit for i in (1, 2, 3))
    for probe in probes:
        extended = prefix + GeneralizedSeries.monomial(rank, probe)
        if _residual_value(ctx, extended) != value:
            branch = branch.warn(
                "stabilized value depends on the extension's first exponent "
                f"(probe {probe} disagrees)")
            break
    _emit(ctx, branch, STABILIZED, prefix, stabilized_value=value,
          evidence=probes)


def _reduce_branches(ctx: _Ctx, branch: _Branch,
                     normalized: DifferentialPolynomial,
                     base_poly: DifferentialPolynomial, c: int,
                     floor: Exponent | None, depth: int, w: int) -> bool:
    if depth <= 0:
        _emit(ctx, branch.warn("reduction depth exhausted"),
              BUDGET_EXHAUSTED, branch.frame.offset)
        return True
    result = reduce_weierstrass(normalized, ctx.spec, ctx.budget, floor)
    branch = branch.logged(record(
        "subproblems",
        reports="; ".join(f"{idx}:{s}"
                          for idx, s in result.subproblem_reports)))
    for text in result.warnings:
        branch = branch.warn(text)
    engaged = False
    first = True
    for inst in result.instances:
        if not first and not ctx.take_branch():
            branch = branch.warn(
                "branch budget exhausted; reduction candidates dropped")
            break
        first = False
        if inst.w_after >= inst.w_before:
            branch = branch.warn(
                f"reduction at {inst.leading_exponent} failed to lower the "
                "Weierstrass order; branch dropped")
            continue
        rec = record(
            "reduction", exponent=inst.leading_exponent,
            coefficient=inst.leading_coefficient, w_before=inst.w_before,
            w_after=inst.w_after, target_class=c, shift=inst.shift,
            r_points=(inst.leading_exponent,) + tuple(inst.poly.support()))
        step = GeneralizedSeries.monomial(
            normalized.rank, inst.leading_exponent, inst.leading_coefficient)
        frame = branch.frame.after_additive(step).after_multiplicative(
            inst.leading_exponent)
        sub = replace(branch.logged(rec), frame=frame)
        engaged = True
        if inst.w_after == 0:
            full = frame.offset
            sub = sub.traced(len(full.terms), _residual_value(ctx, full))
            _emit_stabilized(ctx, sub, full)
            continue
        new_floor = None
        if floor is not None:
            lowered = floor - inst.leading_exponent
            if Exponent.zero(normalized.rank) < lowered:
                new_floor = lowered
        _dispatch(ctx, sub, inst.poly, inst.poly, c, new_floor, depth - 1)
    return engaged

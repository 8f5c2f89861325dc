"""Hardy-type derivations on generalized series fields.

A derivation is specified by the r logarithmic derivatives t_k'/t_k; the
Leibniz rule for monomials and termwise linearity determine everything else:

    (t^alpha)' = t^alpha * (alpha_1 t_1'/t_1 + ... + alpha_r t_r'/t_r).

``validate_spec`` checks the axioms that make this a Hardy-type derivation
(so that l'Hospital and log-derivative compatibility actually hold) and
computes the derived constants for each class k:

    d_k       leading term of t_k'/t_k (coefficient and exponent theta^(k))
    tau^(k)   v(t_k') = e_k + theta^(k)
    tilde(k)  leading class of theta^(k)  (absent when theta^(k) = 0)
    k0        the distinguished class: the unique k with tilde(k) = k,
              falling back to r when no class is self-led.

The checked axioms: each t_k' nonzero; v(t_k') strictly decreasing in k
(HD2); v(t_k'/t_k) strictly increasing (HD3); the tau-matrix conditions
(equal prefix, unit drop on the diagonal, lex inequality on the tails) that
the adjacent HD2/HD3 comparisons alone do not imply but l'Hospital for
arbitrary rational exponents requires; and the leading-class law for the
ratios d_k/d_l.

The rescaled derivations D_k(y) = y'/d_k act like Euler operators on
class-k monomials: D_k^i(t^mu) has leading term mu_k^i t^mu.  Division is
by the full leading term of t_k'/t_k, coefficient included; the monic
variant would break that law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import SpecValidationError
from .exponents import Exponent
from .series import GeneralizedSeries
from .supports import GridSet, gs_semigroup, gs_sum


@dataclass(frozen=True)
class ClassConstants:
    """Per-class data of a validated derivation."""

    d_coefficient: Fraction  # T_k, the leading coefficient of t_k'/t_k
    theta: Exponent          # v(t_k'/t_k) = v(d_k)
    tau: Exponent            # v(t_k') = e_k + theta
    tilde_class: int | None  # leading class of theta, None when theta = 0


@dataclass(frozen=True)
class SpecConstants:
    per_class: tuple[ClassConstants, ...]
    k0: int

    def for_class(self, k: int) -> ClassConstants:
        return self.per_class[k - 1]

    def theta(self, k: int) -> Exponent:
        return self.per_class[k - 1].theta

    def d_term(self, k: int) -> tuple[Exponent, Fraction]:
        c = self.per_class[k - 1]
        return c.theta, c.d_coefficient

    def d_series(self, rank: int, k: int) -> GeneralizedSeries:
        expo, coeff = self.d_term(k)
        return GeneralizedSeries.monomial(rank, expo, coeff)


@dataclass(frozen=True)
class DerivationSpec:
    """Rank plus the r series t_k'/t_k.  Immutable; constants cached."""

    rank: int
    log_derivatives: tuple[GeneralizedSeries, ...]
    _cache: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if len(self.log_derivatives) != self.rank:
            raise SpecValidationError(
                [f"expected {self.rank} log-derivatives, "
                 f"got {len(self.log_derivatives)}"])
        for s in self.log_derivatives:
            if s.rank != self.rank:
                raise SpecValidationError(
                    ["log-derivative rank differs from spec rank"])

    @property
    def constants(self) -> SpecConstants:
        if not self._cache:
            self._cache.append(validate_spec(self))
        return self._cache[0]

    def log_derivative(self, k: int) -> GeneralizedSeries:
        return self.log_derivatives[k - 1]


def validate_spec(spec: DerivationSpec) -> SpecConstants:
    """Check every axiom by name and compute the constants table.

    Raises SpecValidationError listing all violated axioms with the
    offending indices; returns SpecConstants when everything holds.
    """
    r = spec.rank
    violations: list[str] = []
    per_class: list[ClassConstants] = []
    for k in range(1, r + 1):
        ld = spec.log_derivative(k)
        if not ld.terms:
            violations.append(f"nonzero (k={k}): t_{k}'/t_{k} has no terms")
            per_class.append(ClassConstants(Fraction(0), Exponent.zero(r),
                                            Exponent.unit(r, k), None))
            continue
        theta, coeff = ld.leading_term()
        tau = Exponent.unit(r, k) + theta
        per_class.append(ClassConstants(coeff, theta, tau,
                                        theta.leading_class()))
    if violations:
        raise SpecValidationError(violations)

    for k in range(1, r):
        a, b = per_class[k - 1], per_class[k]
        if not b.tau < a.tau:
            violations.append(
                f"HD2 (k={k}->{k + 1}): v(t_{k}')={a.tau} not > "
                f"v(t_{k + 1}')={b.tau}")
        if not a.theta < b.theta:
            violations.append(
                f"HD3 (k={k}->{k + 1}): v(t_{k}'/t_{k})={a.theta} not < "
                f"v(t_{k + 1}'/t_{k + 1})={b.theta}")

    # tau-matrix conditions: prefix equality, unit drop at the diagonal,
    # lex inequality on the remaining tails
    for k in range(1, r):
        tau_k = per_class[k - 1].tau
        tau_n = per_class[k].tau
        for j in range(1, k):
            if tau_n[j] != tau_k[j]:
                violations.append(
                    f"tau-matrix prefix (k={k}, j={j}): "
                    f"tau_{j}^({k + 1})={tau_n[j]} != tau_{j}^({k})={tau_k[j]}")
        if tau_n[k] != tau_k[k] - 1:
            violations.append(
                f"tau-matrix diagonal (k={k}): tau_{k}^({k + 1})={tau_n[k]} "
                f"!= tau_{k}^({k})-1={tau_k[k] - 1}")
        tail_new = _tail_vector(r, k + 1, tau_n, drop_first=True)
        tail_old = _tail_vector(r, k + 1, tau_k, drop_first=False)
        if not tail_old < tail_new:
            violations.append(
                f"tau-matrix tail (k={k}): {tail_new} not > {tail_old}")

    # leading-class law for d_k/d_l: first nonzero coordinate of
    # theta^(k) - theta^(l) must sit at a position >= l and be positive
    for hi in range(2, r + 1):
        for lo in range(1, hi):
            diff = per_class[hi - 1].theta - per_class[lo - 1].theta
            m = diff.leading_class()
            if m is None or diff[m] <= 0 or m < lo:
                violations.append(
                    f"d-ratio law (k={hi}, l={lo}): v(d_{hi}/d_{lo})={diff} "
                    f"has no positive leading coordinate at class >= {lo}")

    self_led = [k for k in range(1, r + 1)
                if per_class[k - 1].tilde_class == k]
    if len(self_led) > 1:
        violations.append(
            f"k0 uniqueness: classes {self_led} all have tilde(k)=k")
    if violations:
        raise SpecValidationError(violations)
    k0 = self_led[0] if self_led else r
    return SpecConstants(tuple(per_class), k0)


def _tail_vector(rank: int, start: int, tau: Exponent,
                 drop_first: bool) -> Exponent:
    coords = [Fraction(0)] * rank
    for j in range(start, rank + 1):
        coords[j - 1] = tau[j]
    if drop_first:
        coords[start - 1] -= 1
    return Exponent(coords)


# ---------------------------------------------------------------------------
# The derivations


def derive_d0(a: GeneralizedSeries, spec: DerivationSpec) -> GeneralizedSeries:
    """a' per the Leibniz rule, termwise: sound truncation is automatic.

    a' = sum over classes k of [sum_alpha a_alpha alpha_k t^alpha] * t_k'/t_k;
    a term at or above a truncation beta differentiates to valuation at least
    beta + theta^(1), which is exactly the truncation the arithmetic derives.
    """
    out = GeneralizedSeries.zero(a.rank)
    for k in range(1, spec.rank + 1):
        scaled = tuple(
            (e, c * e[k]) for e, c in a.terms if e[k] != 0)
        factor = GeneralizedSeries(a.rank, scaled, a.truncation)
        out = out + factor * spec.log_derivative(k)
    return out


def derive_dk(a: GeneralizedSeries, spec: DerivationSpec, k: int,
              iterations: int = 1) -> GeneralizedSeries:
    """D_k applied ``iterations`` times: y -> y'/d_k; i = 0 is the identity."""
    if not 1 <= k <= spec.rank:
        raise ValueError(f"class index {k} outside 1..{spec.rank}")
    if iterations < 0:
        raise ValueError("iteration count must be a natural number")
    expo, coeff = spec.constants.d_term(k)
    out = a
    for _ in range(iterations):
        out = derive_d0(out, spec).divide_term(expo, coeff)
    return out


def derive(a: GeneralizedSeries, spec: DerivationSpec, k: int,
           iterations: int = 1) -> GeneralizedSeries:
    """D_k^i with k = 0 meaning the base derivation."""
    if k == 0:
        out = a
        for _ in range(iterations):
            out = derive_d0(out, spec)
        return out
    return derive_dk(a, spec, k, iterations)


@dataclass(frozen=True)
class DerivativeValuationPrediction:
    """Outcome of the case analysis for v(d_k^(i)).

    ``kind`` is 'zero' (the derivative vanishes identically), 'exact'
    (``value`` holds the predicted valuation), or 'candidates' (the resonant
    sub-case where the statement only pins the valuation down to a finite
    set over the unspecified class k-hat > k0).
    """

    kind: str
    value: Exponent | None = None
    candidates: tuple[Exponent, ...] = ()


def predicted_dk_derivative_valuation(
        spec: DerivationSpec, k: int, i: int) -> DerivativeValuationPrediction:
    """Predict v(d_k^(i)) for i >= 1 by case analysis on k, k0 and tilde(k)."""
    if i < 1:
        raise ValueError("prediction defined for i >= 1")
    consts = spec.constants
    r = spec.rank
    k0 = consts.k0
    theta_k = consts.theta(k)
    if theta_k.is_zero():
        return DerivativeValuationPrediction("zero")
    theta_k0 = consts.theta(k0)
    if k >= k0:
        return DerivativeValuationPrediction("exact", theta_k + i * theta_k0)
    tilde = consts.for_class(k).tilde_class
    if tilde < k0:
        return DerivativeValuationPrediction(
            "exact", theta_k + i * consts.theta(tilde))
    if tilde > k0:
        return DerivativeValuationPrediction(
            "exact", theta_k + consts.theta(tilde) + (i - 1) * theta_k0)
    # tilde == k0: resonance test on the k0 coordinates
    ratio = -theta_k[k0] / theta_k0[k0]
    if ratio.denominator == 1 and ratio > 0:
        j = int(ratio)
        if i <= j:
            return DerivativeValuationPrediction(
                "exact", theta_k + i * theta_k0)
        cands = tuple(
            theta_k + consts.theta(khat) + (i - 1) * theta_k0
            for khat in range(k0 + 1, r + 1))
        return DerivativeValuationPrediction("candidates", None, cands)
    return DerivativeValuationPrediction("exact", theta_k + i * theta_k0)


# ---------------------------------------------------------------------------
# The support sets T_k


def script_t(spec: DerivationSpec, k: int, order: int) -> GridSet:
    """The set sum over i <= order, l >= k of <Supp (D_k^i t_l)/t_l>.

    Contains 0 (the l = k term has valuation 0); every other element is
    positive.  order = 0 gives the singleton {0} (empty sum convention).
    """
    if not 1 <= k <= spec.rank:
        raise ValueError(f"class index {k} outside 1..{spec.rank}")
    rank = spec.rank
    total = GridSet.zero_point(rank)
    zero = Exponent.zero(rank)
    for i in range(1, order + 1):
        for l in range(k, rank + 1):
            t_l = GeneralizedSeries.monomial(rank, Exponent.unit(rank, l))
            ratio = derive_dk(t_l, spec, k, i).divide_term(
                Exponent.unit(rank, l), 1)
            points = [e for e in ratio.support() if not e.is_zero()]
            for e in points:
                if e < zero:
                    raise AssertionError(
                        f"negative support element {e} in (D_{k}^{i} t_{l})/t_{l}")
            if points:
                total = gs_sum(total, gs_semigroup(
                    GridSet.from_points(rank, points)))
    return total


# ---------------------------------------------------------------------------
# Reference derivations


def spec_a() -> DerivationSpec:
    """Rank 1: t_1 behaves like 1/x under d/dx, so t_1'/t_1 = -t_1."""
    return DerivationSpec(1, (
        GeneralizedSeries.monomial(1, Exponent((1,)), -1),))


def spec_b() -> DerivationSpec:
    """Rank 3 transseries triple t_1 = e^-x, t_2 = 1/x, t_3 = 1/log x.

    Direct differentiation gives t_3' = -t_2 t_3^2, hence t_3'/t_3 = -t_2 t_3.
    """
    return DerivationSpec(3, (
        GeneralizedSeries.constant(3, -1),
        GeneralizedSeries.monomial(3, Exponent((0, 1, 0)), -1),
        GeneralizedSeries.monomial(3, Exponent((0, 1, 1)), -1),
    ))


def spec_b_paper_literal() -> DerivationSpec:
    """The rank-3 triple with t_3' = -t_1 t_2^2 taken at face value.

    Then t_3'/t_3 = -t_1 t_2^2 t_3^-1 and v(t_3') = (1,2,0), which breaks
    HD2 against v(t_2') = (0,2,0); validate_spec rejects it.
    """
    return DerivationSpec(3, (
        GeneralizedSeries.constant(3, -1),
        GeneralizedSeries.monomial(3, Exponent((0, 1, 0)), -1),
        GeneralizedSeries.monomial(3, Exponent((1, 2, -1)), -1),
    ))


def spec_c() -> DerivationSpec:
    """Rank 2: t_1 = e^(-1/x), t_2 = x for x -> 0+; here v(d_k0) < 0."""
    return DerivationSpec(2, (
        GeneralizedSeries.monomial(2, Exponent((0, -2)), 1),
        GeneralizedSeries.monomial(2, Exponent((0, -1)), 1),
    ))

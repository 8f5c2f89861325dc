"""Exact arithmetic for generalized power series of finite rank.

Rational-exponent Hahn series with Hardy-type derivations: series and
support-set calculus, differential polynomials with conjugations and
changes of derivation, and a term-by-term differential-Puiseux solver.
"""

from .errors import (HahnSeriesError, NonAccessibleError, ParseError,
                     RankMismatchError, SpecValidationError,
                     UndeterminedValuationError)
from .exponents import (Exponent, antilex_compare, ex, lex_compare, mi_add,
                        mi_factorial, mi_le, mi_length, mi_stats, mi_sub,
                        mi_weight)
from .series import (GeneralizedSeries, ValuationResult, equivalent,
                     in_positive_part, in_valuation_ring, same_valuation)
from .supports import (Coset, GridSet, gs_add_generator, gs_enumerate_below,
                       gs_member, gs_semigroup, gs_sum, gs_translate_neg)
from .derivation import (DerivationSpec, SpecConstants,
                         DerivativeValuationPrediction, derive, derive_d0,
                         derive_dk, predicted_dk_derivative_valuation,
                         script_t, spec_a, spec_b, spec_b_paper_literal,
                         spec_c, validate_spec)
from .diffpoly import (DifferentialPolynomial, IndicialData,
                       evaluation_support_bound, evaluate, indicial_data,
                       partial_derivative, taylor_check,
                       weierstrass_normalize, weierstrass_order)
from .conjugate import (ChangeOfDerivationError, QMatrix, additive_conjugate,
                        change_derivation, multiplicative_conjugate,
                        multiplicative_structure, qji_coefficients,
                        qji_symbolic, transform_support_bound)
from .provenance import TransformRecord
from .solver import (Candidate, ReducedInstance, ReductionResult,
                     ResonanceNote, ResonancePolicy, SolveBudget,
                     SolveOutcome, alpha0, next_candidates,
                     reduce_to_positive, reduce_weierstrass, solve,
                     solve_w1_step, support_bound_R)
from .textio import (format_gridset, format_series, parse_exponent,
                     parse_gridset, parse_series)

__all__ = [name for name in dir() if not name.startswith("_")]

import random
from fractions import Fraction

import pytest

from hahnseries import (DerivationSpec, GeneralizedSeries,
                        SpecValidationError, ex, derive, derive_d0,
                        derive_dk, format_series, gs_member,
                        predicted_dk_derivative_valuation, script_t, spec_a,
                        spec_b, spec_b_paper_literal, spec_c, validate_spec)
from hahnseries.supports import gs_enumerate_below

from conftest import rand_positive_exponent, rand_positive_series


def test_spec_a_constants():
    c = spec_a().constants
    assert c.k0 == 1
    cc = c.for_class(1)
    assert cc.theta == ex(1) and cc.tau == ex(2)
    assert cc.tilde_class == 1 and cc.d_coefficient == -1


def test_spec_b_constants():
    c = spec_b().constants
    assert c.k0 == 2
    assert c.theta(1) == ex(0, 0, 0)
    assert c.for_class(1).tilde_class is None
    assert c.theta(2) == ex(0, 1, 0)
    assert c.for_class(2).tilde_class == 2
    assert c.theta(3) == ex(0, 1, 1)
    assert c.for_class(3).tilde_class == 2
    assert c.for_class(2).tau == ex(0, 2, 0)
    assert c.for_class(3).tau == ex(0, 1, 2)


def test_spec_c_constants():
    c = spec_c().constants
    assert c.k0 == 2
    assert c.theta(1) == ex(0, -2)
    assert c.theta(2) == ex(0, -1)
    assert c.for_class(2).tau == ex(0, 0)
    # the distinguishing feature: v(d_k0) < 0
    assert c.theta(2) < ex(0, 0)


def test_paper_literal_spec_b_rejected_with_named_hd2():
    with pytest.raises(SpecValidationError) as info:
        validate_spec(spec_b_paper_literal())
    text = "; ".join(info.value.violations)
    assert "HD2 (k=2->3)" in text
    assert "(0,2,0)" in text and "(1,2,0)" in text


def test_tau_matrix_mutant_rejected():
    # satisfies the adjacent HD2/HD3 comparisons yet breaks l'Hospital;
    # only the tau-matrix conditions catch it
    mutant = DerivationSpec(2, (
        GeneralizedSeries.monomial(2, ex(1, 0), 1),
        GeneralizedSeries.monomial(2, ex(2, -2), 1),
    ))
    consts = [s.leading_term() for s in mutant.log_derivatives]
    tau = [ex(1, 0) + consts[0][0], ex(0, 1) + consts[1][0]]
    assert tau[1] < tau[0]                # HD2 holds
    assert consts[0][0] < consts[1][0]    # HD3 holds
    with pytest.raises(SpecValidationError) as info:
        validate_spec(mutant)
    text = "; ".join(info.value.violations)
    assert "tau-matrix" in text
    # and l'Hospital really fails for it: t2 > t1^(1/2) but the derivative
    # valuations compare the other way
    a = GeneralizedSeries.monomial(2, ex(0, 1))
    b = GeneralizedSeries.monomial(2, ex(Fraction(1, 2), 0))
    va = derive_d0(a, mutant).valuation()
    vb = derive_d0(b, mutant).valuation()
    assert a.valuation() < b.valuation()
    assert not va < vb and va != vb


def test_derive_d0_examples(specs):
    sb = specs["B"]
    q = Fraction(5, 3)
    out = derive_d0(GeneralizedSeries.monomial(3, ex(0, q, 0)), sb)
    assert out.terms == ((ex(0, q + 1, 0), -q),)
    assert derive_d0(GeneralizedSeries.constant(3, 5), sb).is_zero()
    sc = specs["C"]
    out = derive_d0(GeneralizedSeries.monomial(2, ex(1, 0)), sc)
    assert out.terms == ((ex(1, -2), Fraction(1)),)


def test_derive_dk_examples(specs):
    sa = specs["A"]
    mu = Fraction(7, 2)
    out = derive_dk(GeneralizedSeries.monomial(1, ex(mu)), sa, 1, 1)
    assert out.terms == ((ex(mu), mu),)
    sb = specs["B"]
    q = Fraction(4)
    out = derive_dk(GeneralizedSeries.monomial(3, ex(0, 0, q)), sb, 3, 2)
    assert out.terms == ((ex(0, 0, q), q * q),)
    s = GeneralizedSeries.from_terms(2, [(ex(1, 2), 3)])
    assert derive_dk(s, specs["C"], 1, 0) == s


def test_derivation_truncation_soundness(specs):
    sb = specs["B"]
    a = GeneralizedSeries.from_terms(
        3, [(ex(0, 1, 0), 1)], truncation=ex(0, 3, 0))
    out = derive_d0(a, sb)
    # theta^(1) = 0, so the output is exact below the input truncation
    assert out.truncation == ex(0, 3, 0)
    sa = specs["A"]
    a = GeneralizedSeries.from_terms(1, [(ex(1), 1)], truncation=ex(3))
    assert derive_d0(a, sa).truncation == ex(4)  # beta + theta^(1)


def test_leibniz_rule(specs):
    rng = random.Random(21)
    for name, sp in specs.items():
        for _ in range(200):
            a = rand_positive_series(rng, sp.rank)
            b = rand_positive_series(rng, sp.rank)
            lhs = derive_d0(a * b, sp)
            rhs = derive_d0(a, sp) * b + a * derive_d0(b, sp)
            assert lhs == rhs, name


def test_hd4_lhospital(specs):
    rng = random.Random(22)
    for name, sp in specs.items():
        for _ in range(1000):
            alpha = rand_positive_exponent(rng, sp.rank)
            beta = rand_positive_exponent(rng, sp.rank)
            if rng.random() < 0.5:
                alpha = -alpha
            if rng.random() < 0.5:
                beta = -beta
            da = derive_d0(GeneralizedSeries.monomial(sp.rank, alpha), sp)
            db = derive_d0(GeneralizedSeries.monomial(sp.rank, beta), sp)
            va, vb = da.valuation(), db.valuation()
            assert ((not beta < alpha) == (not vb < va)), name


def test_hd5_log_derivative_compatibility(specs):
    rng = random.Random(23)
    zero_ranks = {name: ex(*([0] * sp.rank)) for name, sp in specs.items()}
    for name, sp in specs.items():
        zero = zero_ranks[name]
        for _ in range(1000):
            alpha = rand_positive_exponent(rng, sp.rank)
            beta = rand_positive_exponent(rng, sp.rank)
            if rng.random() < 0.5:
                alpha = -alpha
            if rng.random() < 0.5:
                beta = -beta
            abs_a = alpha if zero < alpha else -alpha
            abs_b = beta if zero < beta else -beta
            if abs_b < abs_a or abs_a == abs_b:
                a = GeneralizedSeries.monomial(sp.rank, alpha)
                b = GeneralizedSeries.monomial(sp.rank, beta)
                la = derive_d0(a, sp).divide_term(alpha, 1)
                lb = derive_d0(b, sp).divide_term(beta, 1)
                va, vb = la.valuation(), lb.valuation()
                assert not vb < va, name
                same_class = alpha.leading_class() == beta.leading_class()
                assert (va == vb) == same_class, name


def test_euler_leading_term_law(specs):
    # D_k^i(t^mu) has leading term mu_k^i t^mu for class-k mu
    rng = random.Random(24)
    for name, sp in specs.items():
        for _ in range(500):
            mu = rand_positive_exponent(rng, sp.rank)
            k = mu.leading_class()
            i = rng.randint(1, 3)
            out = derive_dk(GeneralizedSeries.monomial(sp.rank, mu), sp, k, i)
            lead_e, lead_c = out.leading_term()
            assert lead_e == mu and lead_c == mu[k] ** i, name


def test_positivity_preservation(specs):
    rng = random.Random(25)
    for name, sp in specs.items():
        zero = ex(*([0] * sp.rank))
        for _ in range(500):
            a = rand_positive_series(rng, sp.rank)
            k = rng.randint(1, sp.rank)
            i = rng.randint(1, 4)
            out = derive_dk(a, sp, k, i)
            v = out.valuation_lower_bound()
            assert v is None or zero < v, name


def test_monomial_derivative_valuation_law(specs):
    # v((t^alpha)') = alpha + theta^(leading class of alpha)
    rng = random.Random(26)
    for name, sp in specs.items():
        for _ in range(500):
            alpha = rand_positive_exponent(rng, sp.rank)
            if rng.random() < 0.5:
                alpha = -alpha
            k = alpha.leading_class()
            out = derive_d0(GeneralizedSeries.monomial(sp.rank, alpha), sp)
            assert out.valuation() == alpha + sp.constants.theta(k), name


def test_derivative_infinitesimal_criterion(specs):
    # all of y, y', ..., y^(n) infinitesimal iff v(y) > max(0, -n theta(k0))
    rng = random.Random(27)
    for name, sp in specs.items():
        zero = ex(*([0] * sp.rank))
        n = 2
        a0 = max(zero, -n * sp.constants.theta(sp.constants.k0))
        for _ in range(300):
            mu = rand_positive_exponent(rng, sp.rank, hi=4)
            y = GeneralizedSeries.monomial(sp.rank, mu)
            all_pos = True
            cur = y
            for _ in range(n):
                cur = derive_d0(cur, sp)
                v = cur.valuation_lower_bound()
                if v is not None and not zero < v:
                    all_pos = False
            assert all_pos == (a0 < mu), (name, mu)


def test_predicted_dk_derivative_valuations(specs):
    for name in ("B", "C"):
        sp = specs[name]
        for k in range(1, sp.rank + 1):
            d = sp.constants.d_series(sp.rank, k)
            cur = d
            for i in range(1, 5):
                cur = derive_d0(cur, sp)
                pred = predicted_dk_derivative_valuation(sp, k, i)
                if pred.kind == "zero":
                    assert cur.is_zero(), (name, k, i)
                elif pred.kind == "exact":
                    assert cur.valuation() == pred.value, (name, k, i)
                else:
                    assert cur.valuation() in pred.candidates, (name, k, i)


def test_predicted_examples(specs):
    sb, sc = specs["B"], specs["C"]
    assert predicted_dk_derivative_valuation(sb, 3, 1).value == ex(0, 2, 1)
    assert predicted_dk_derivative_valuation(sb, 1, 1).kind == "zero"
    assert predicted_dk_derivative_valuation(sc, 1, 2).value == ex(0, -4)


def test_script_t_examples(specs):
    sb = specs["B"]
    t2 = script_t(sb, 2, 1)
    pts = gs_enumerate_below(t2, ex(0, 0, 5))
    assert pts == [ex(0, 0, 0), ex(0, 0, 1), ex(0, 0, 2), ex(0, 0, 3),
                   ex(0, 0, 4)]
    sa = specs["A"]
    # (D_1^i t_1)/t_1 = 1 for every i, so T_1 is the origin alone
    t1 = script_t(sa, 1, 2)
    assert gs_enumerate_below(t1, ex(10)) == [ex(0)]
    assert gs_enumerate_below(script_t(sb, 1, 0), ex(0, 0, 1)) == \
        [ex(0, 0, 0)]


def test_script_t_positivity(specs):
    zero3 = ex(0, 0, 0)
    for name, sp in specs.items():
        zero = ex(*([0] * sp.rank))
        for k in range(1, sp.rank + 1):
            grid = script_t(sp, k, 2)
            for c in grid.cosets:
                assert not c.offset < zero
                for g in c.generators:
                    assert zero < g
    # for l > k the contributing supports are strictly positive
    sb = spec_b()
    for k in range(1, 3):
        for l in range(k + 1, 4):
            t_l = GeneralizedSeries.monomial(3, ex(*[1 if j == l - 1 else 0
                                                     for j in range(3)]))
            ratio = derive_dk(t_l, sb, k, 1).divide_term(
                t_l.terms[0][0], 1)
            v = ratio.valuation()
            assert zero3 < v

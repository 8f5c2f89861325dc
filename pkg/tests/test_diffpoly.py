import random
from fractions import Fraction

import pytest

from hahnseries import (DifferentialPolynomial, GeneralizedSeries, ex,
                        evaluate, evaluation_support_bound, gs_member,
                        indicial_data, partial_derivative, taylor_check,
                        weierstrass_normalize, weierstrass_order)
from hahnseries.supports import GridSet

from conftest import rand_poly, rand_series


def P(rank, order, derivation, entries):
    return DifferentialPolynomial.from_coefficients(rank, order, derivation,
                                                    entries)


def const(rank, v):
    return GeneralizedSeries.constant(rank, v)


def mono(rank, e, c=1):
    return GeneralizedSeries.monomial(rank, e, c)


@pytest.fixture
def euler(specs):
    return P(1, 1, 1, {(0, 1): const(1, 1), (1, 0): const(1, -2),
                       (0, 0): mono(1, ex(1))})


def test_evaluate_riccati_at_solution(specs):
    sa = specs["A"]
    ric = P(1, 1, 0, {(0, 1): const(1, 1), (2, 0): const(1, 1)})
    t1 = mono(1, ex(1))
    assert evaluate(ric, t1, sa).is_zero()


def test_evaluate_euler_identity(specs, euler):
    sa = specs["A"]
    y = mono(1, ex(1)) + mono(1, ex(2), 5)
    # D1 t^mu = mu t^mu exactly, so D1 y - 2y + t1 vanishes at t1 + 5t1^2
    # only through the t1-term; direct computation:
    out = evaluate(euler, y, sa)
    assert out == mono(1, ex(2), -5) + mono(1, ex(2), 10) + mono(1, ex(2), -5)
    assert out.is_zero()


def test_evaluate_at_zero_gives_constant_coefficient(specs):
    sb = specs["B"]
    c0 = mono(3, ex(0, 1, 0), 7)
    F = P(3, 1, 0, {(0, 0): c0, (1, 1): const(3, 2)})
    assert evaluate(F, GeneralizedSeries.zero(3), sb) == c0


def test_partial_derivative_examples():
    F = P(1, 0, 0, {(2,): const(1, 1)})
    d1 = partial_derivative(F, (1,))
    assert d1.coefficients == {(1,): const(1, 2)}
    d2 = partial_derivative(F, (2,))
    assert d2.coefficients == {(0,): const(1, 2)}
    G = P(1, 1, 0, {(1, 1): const(1, 1)})
    mixed = partial_derivative(G, (1, 1))
    assert mixed.coefficients == {(0, 0): const(1, 1)}
    H = P(1, 1, 0, {(0, 1): mono(1, ex(1))})
    assert partial_derivative(H, (0, 2)).is_zero()


def test_taylor_examples(specs):
    sa = specs["A"]
    F = P(1, 0, 0, {(2,): const(1, 1)})
    t1 = mono(1, ex(1))
    assert taylor_check(F, t1, t1 * t1, sa).is_zero()
    G = P(1, 1, 1, {(0, 1): const(1, 1)})
    rng = random.Random(31)
    p = rand_series(rng, 1)
    q = rand_series(rng, 1)
    assert taylor_check(G, p, q, sa).is_zero()


def test_taylor_random(specs):
    rng = random.Random(32)
    names = list(specs)
    for trial in range(100):
        sp = specs[names[trial % 3]]
        F = rand_poly(rng, sp.rank, rng.randint(0, 2), rng.randint(0, sp.rank))
        p = rand_series(rng, sp.rank, max_terms=2)
        q = rand_series(rng, sp.rank, max_terms=2)
        assert taylor_check(F, p, q, sp).is_zero()


def test_evaluation_is_additive_and_multiplicative(specs):
    rng = random.Random(33)
    sp = specs["B"]
    for _ in range(30):
        F = rand_poly(rng, 3, 1, 2)
        G = rand_poly(rng, 3, 1, 2)
        y = rand_series(rng, 3, max_terms=2)
        fg_sum = {}
        for idx in set(F.coefficients) | set(G.coefficients):
            s = GeneralizedSeries.zero(3)
            if idx in F.coefficients:
                s = s + F.coefficients[idx]
            if idx in G.coefficients:
                s = s + G.coefficients[idx]
            if s.terms:
                fg_sum[idx] = s
        if not fg_sum:
            continue
        H = P(3, 1, 2, fg_sum)
        assert evaluate(H, y, sp) == evaluate(F, y, sp) + evaluate(G, y, sp)
    # order-0 product rule
    for _ in range(30):
        F = rand_poly(rng, 2, 0, 0)
        G = rand_poly(rng, 2, 0, 0)
        y = rand_series(rng, 2, max_terms=2)
        prod = {}
        for i1, c1 in F.coefficients.items():
            for i2, c2 in G.coefficients.items():
                idx = (i1[0] + i2[0],)
                prod[idx] = prod.get(idx, GeneralizedSeries.zero(2)) + c1 * c2
        prod = {i: s for i, s in prod.items() if s.terms}
        if not prod:
            continue
        H = P(2, 0, 0, prod)
        sp2 = specs["C"]
        assert evaluate(H, y, sp2) == \
            evaluate(F, y, sp2) * evaluate(G, y, sp2)


def test_weierstrass_examples():
    F = P(1, 1, 1, {(0, 1): mono(1, ex(1)), (1, 0): mono(1, ex(2))})
    norm, w, shift = weierstrass_normalize(F)
    assert shift == ex(1) and w == 1
    assert norm.coefficients == {(0, 1): const(1, 1), (1, 0): mono(1, ex(1))}
    G = P(1, 0, 0, {(2,): const(1, 1), (1,): mono(1, ex(1))})
    assert weierstrass_normalize(G)[1] == 2
    H = P(1, 0, 0, {(0,): const(1, 1), (1,): const(1, 1)})
    assert weierstrass_normalize(H)[1] == 0


def test_weierstrass_idempotent(specs):
    rng = random.Random(34)
    for _ in range(100):
        F = rand_poly(rng, 2, 1, 0)
        norm, w, _ = weierstrass_normalize(F)
        again, w2, shift2 = weierstrass_normalize(norm)
        assert again == norm and w2 == w and shift2 == ex(0, 0)


def test_indicial_examples(specs, euler):
    sa = specs["A"]
    data = indicial_data(euler, sa)
    assert data.witness_set == ((0, 1), (1, 0))
    assert data.pi_coefficients == (-2, 1)
    assert data.rational_roots == (2,)
    assert not data.irrational_root_flag

    F = P(1, 1, 1, {(0, 1): const(1, 1), (0, 0): mono(1, ex(1))})
    data = indicial_data(F, sa)
    assert data.pi_coefficients == (0, 1)
    assert data.rational_roots == ()

    G = P(1, 2, 1, {(0, 0, 1): const(1, 1), (0, 1, 0): const(1, -2),
                    (1, 0, 0): const(1, 1), (0, 0, 0): mono(1, ex(1))})
    data = indicial_data(G, sa)
    assert data.pi_coefficients == (1, -2, 1)
    assert data.rational_roots == (1,)


def test_indicial_irrational_flag(specs):
    sa = specs["A"]
    # pi(X) = X^2 - 2: positive root sqrt(2) is irrational
    F = P(1, 2, 1, {(0, 0, 1): const(1, 1), (1, 0, 0): const(1, -2),
                    (0, 0, 0): mono(1, ex(1))})
    data = indicial_data(F, sa)
    assert data.rational_roots == ()
    assert data.irrational_root_flag


def test_indicial_needs_w1(specs):
    G = P(1, 0, 0, {(2,): const(1, 1), (1,): mono(1, ex(1))})
    with pytest.raises(ValueError):
        indicial_data(G, specs["A"])
    assert weierstrass_order(weierstrass_normalize(G)[0]) == 2


def test_indicial_degree_at_most_n(specs):
    rng = random.Random(35)
    checked = 0
    for _ in range(300):
        order = rng.randint(0, 2)
        F = rand_poly(rng, 1, order, 1)
        try:
            norm, w, _ = weierstrass_normalize(F)
            if w != 1:
                continue
            data = indicial_data(norm, specs["A"])
        except ValueError:
            continue
        checked += 1
        assert len(data.pi_coefficients) - 1 <= order
    assert checked > 20


def test_evaluation_support_bound_cases(specs):
    sa = specs["A"]
    euler = P(1, 1, 1, {(0, 1): const(1, 1), (1, 0): const(1, -2),
                        (0, 0): mono(1, ex(1))})
    y = mono(1, ex(2))
    bound = evaluation_support_bound(
        euler, 1, GridSet.from_points(1, y.support()), sa)
    out = evaluate(euler, y, sa)
    for e, _ in out.terms:
        assert gs_member(bound, e) == "yes"

    sb = specs["B"]
    F = P(3, 1, 2, {(0, 1): const(3, 1)})
    y = mono(3, ex(0, 0, 1))
    bound = evaluation_support_bound(
        F, 3, GridSet.from_points(3, y.support()), sb)
    out = evaluate(F, y, sb)  # D2 t3 = t3^2
    assert out.terms[0][0] == ex(0, 0, 2)
    for e, _ in out.terms:
        assert gs_member(bound, e) == "yes"

    # constant-in-y equation: bound still contains the coefficient support
    G = P(3, 1, 0, {(0, 0): mono(3, ex(0, 1, 0), 3)})
    bound = evaluation_support_bound(G, 2, GridSet.empty(3), sb)
    assert gs_member(bound, ex(0, 1, 0)) == "yes"


def test_evaluation_support_bound_random(specs):
    rng = random.Random(36)
    names = list(specs)
    trials = 0
    for trial in range(300):
        sp = specs[names[trial % 3]]
        rank = sp.rank
        k = rng.randint(1, rank)
        deriv = rng.choice([0, min(k, rank)])
        if deriv >= 1 and deriv > k:
            continue
        F = rand_poly(rng, rank, rng.randint(0, 2), deriv, coeff_hi=2)
        # y of leading class k, positive, classes >= k
        terms = []
        for _ in range(rng.randint(1, 2)):
            lead = rng.randint(k, rank)
            coords = [Fraction(0)] * rank
            coords[lead - 1] = Fraction(rng.randint(1, 3))
            for pos in range(lead, rank):
                coords[pos] = Fraction(rng.randint(-2, 2))
            terms.append((ex(*coords), Fraction(rng.randint(1, 2))))
        y = GeneralizedSeries.from_terms(rank, terms)
        if not y.terms or y.terms[0][0].leading_class() != k:
            continue
        if deriv == 0 and k < sp.constants.k0:
            theta = sp.constants.theta(k)
            if any((e + theta).leading_class() != e.leading_class()
                   for e, _ in y.terms):
                continue
        trials += 1
        bound = evaluation_support_bound(
            F, k, GridSet.from_points(rank, y.support()), sp)
        out = evaluate(F, y, sp)
        for e, _ in out.terms:
            assert gs_member(bound, e, 400000) == "yes", (trial, e)
    assert trials > 100

import random
from fractions import Fraction

import pytest

from hahnseries import (DifferentialPolynomial, GeneralizedSeries, ex,
                        spec_a, spec_b, spec_c)


@pytest.fixture(scope="session")
def specs():
    return {"A": spec_a(), "B": spec_b(), "C": spec_c()}


def rand_exponent(rng: random.Random, rank: int, lo=-4, hi=6, halves=True):
    denom = rng.choice([1, 2]) if halves else 1
    return ex(*[Fraction(rng.randint(lo, hi), denom) for _ in range(rank)])


def rand_positive_exponent(rng: random.Random, rank: int, hi=5):
    # leading class chosen uniformly, positive leading coordinate
    lead = rng.randint(1, rank)
    coords = [Fraction(0)] * rank
    coords[lead - 1] = Fraction(rng.randint(1, hi), rng.choice([1, 2]))
    for pos in range(lead, rank):
        coords[pos] = Fraction(rng.randint(-hi, hi), rng.choice([1, 2]))
    return ex(*coords)


def rand_series(rng: random.Random, rank: int, max_terms=3, lo=-3, hi=5,
                allow_zero=True):
    n = rng.randint(0 if allow_zero else 1, max_terms)
    terms = [(rand_exponent(rng, rank, lo, hi),
              Fraction(rng.randint(-3, 3), rng.choice([1, 2])))
             for _ in range(n)]
    out = GeneralizedSeries.from_terms(rank, terms)
    if not allow_zero and not out.terms:
        return GeneralizedSeries.constant(rank, 1)
    return out


def rand_positive_series(rng: random.Random, rank: int, max_terms=3, hi=4):
    terms = [(rand_positive_exponent(rng, rank, hi),
              Fraction(rng.randint(1, 3), rng.choice([1, 2]))
              * rng.choice([1, -1]))
             for _ in range(rng.randint(1, max_terms))]
    out = GeneralizedSeries.from_terms(rank, terms)
    if not out.terms:
        return GeneralizedSeries.monomial(rank, rand_positive_exponent(
            rng, rank, hi))
    return out


def rand_poly(rng: random.Random, rank: int, order: int, derivation: int,
              max_degree=2, max_terms=2, coeff_hi=3):
    entries = {}
    for _ in range(rng.randint(1, 3)):
        index = [0] * (order + 1)
        for _ in range(rng.randint(0, max_degree)):
            index[rng.randint(0, order)] += 1
        series = rand_series(rng, rank, max_terms, lo=-2, hi=coeff_hi,
                             allow_zero=False)
        if series.terms:
            entries[tuple(index)] = series
    if not entries:
        entries[(0,) * (order + 1)] = GeneralizedSeries.constant(rank, 1)
    return DifferentialPolynomial.from_coefficients(
        rank, order, derivation, entries)

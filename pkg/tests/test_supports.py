import random
from fractions import Fraction

import pytest

from hahnseries import (Coset, GridSet, NonAccessibleError, ex,
                        gs_add_generator, gs_enumerate_below, gs_member,
                        gs_semigroup, gs_sum, gs_translate_neg)


def lattice1(*gens, offset=0):
    return GridSet.lattice(1, [ex(g) for g in gens], ex(offset))


def enum1(grid, bound, cap=100000):
    return [int(p.coords[0]) for p in gs_enumerate_below(grid, ex(bound), cap)]


def brute_lattice(gens, bound, offset=0):
    out = {offset}
    frontier = [offset]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x + g
            if y <= bound and y not in out:
                out.add(y)
                frontier.append(y)
    return sorted(out)


def test_gs_sum_examples():
    a = lattice1(3)
    b = lattice1(5)
    assert gs_sum(a, b) == GridSet.lattice(1, [ex(3), ex(5)])
    shifted = lattice1(3, offset=2)
    point = GridSet.point(ex(0))
    assert gs_sum(shifted, point) == shifted
    odd = lattice1(2, offset=1)
    total = gs_sum(odd, odd)
    # {1,3,5,...} + {1,3,5,...} = {2,4,6,...}
    assert total == GridSet.lattice(1, [ex(2)], ex(2))
    assert enum1(total, 11) == [2, 4, 6, 8, 10]


def test_gs_semigroup_examples():
    pure = GridSet.lattice(1, [ex(3), ex(5)])
    assert gs_semigroup(pure) == pure
    shifted = lattice1(3, offset=2)
    sg = gs_semigroup(shifted)
    assert not sg.exact
    assert sg == GridSet(1, frozenset({Coset(ex(0),
                                             frozenset({ex(2), ex(3)}))}),
                         False)
    # true semigroup of {2,5,8,...} is contained in the returned superset
    truth = set()
    for reps in range(1, 12):
        def sums(depth, acc):
            if depth == 0:
                truth.add(acc)
                return
            for x in (2, 5, 8, 11, 14, 17, 20, 23, 26, 29):
                if acc + x <= 30:
                    sums(depth - 1, acc + x)
        sums(reps, 0)
    denoted = set(enum1(sg, 31))
    assert {x for x in truth if x <= 30} <= denoted
    rank2 = GridSet.lattice(2, [ex(0, 1)])
    assert gs_semigroup(rank2) == rank2
    with pytest.raises(ValueError):
        gs_semigroup(GridSet.point(ex(-1)))


def test_gs_semigroup_of_points_is_exact():
    pts = GridSet.from_points(1, [ex(2), ex(5)])
    sg = gs_semigroup(pts)
    assert sg.exact
    assert sg == GridSet.lattice(1, [ex(2), ex(5)])


def test_gs_add_generator_examples():
    point = GridSet.point(ex(0, 0))
    out = gs_add_generator(point, ex(0, 1))
    assert out == GridSet.lattice(2, [ex(0, 1)])
    assert gs_add_generator(lattice1(3), ex(5)) == gs_sum(lattice1(3),
                                                          lattice1(5))
    shifted = gs_add_generator(lattice1(4, offset=2), ex(1))
    assert enum1(shifted, 21) == list(range(2, 21))
    with pytest.raises(ValueError):
        gs_add_generator(point, ex(0, -1))


def test_translate_examples():
    lat = GridSet.lattice(1, [ex(3), ex(5)])
    tr = gs_translate_neg(lat, ex(7))
    # Lambda_{>=7} - 7 is exactly N_{>=1}
    assert enum1(tr, 201) == list(range(1, 201))
    assert gs_translate_neg(lattice1(4), ex(0)) == lattice1(4)
    empty = gs_translate_neg(GridSet.lattice(2, [ex(0, 1)]), ex(1, 0))
    assert empty.is_empty()


def test_translate_below_zero_is_plain_shift():
    lat = lattice1(3, offset=1)
    tr = gs_translate_neg(lat, ex(-2))
    assert tr == lattice1(3, offset=3)


def test_translate_random_oracle():
    rng = random.Random(11)
    for _ in range(200):
        gens = [rng.randint(1, 10) for _ in range(rng.randint(1, 3))]
        beta = rng.randint(0, 30)
        lat = GridSet.lattice(1, [ex(g) for g in gens])
        tr = gs_translate_neg(lat, ex(beta))
        truth = [x - beta for x in brute_lattice(gens, 200) if x >= beta]
        denoted = enum1(tr, 201 - beta, cap=300000)
        cutoff = 200 - beta
        assert [x for x in truth if x <= cutoff] == \
            [x for x in denoted if x <= cutoff]
        # the result stays within Gamma_{>=0}
        assert all(x >= 0 for x in denoted)


def test_translate_rank2_soundness():
    rng = random.Random(12)
    for _ in range(60):
        gens = []
        for _ in range(rng.randint(1, 2)):
            lead = rng.randint(1, 2)
            if lead == 1:
                gens.append(ex(rng.randint(1, 3), rng.randint(-3, 3)))
            else:
                gens.append(ex(0, rng.randint(1, 3)))
        beta = ex(rng.randint(0, 2), rng.randint(-2, 4))
        lat = GridSet.lattice(2, gens)
        tr = gs_translate_neg(lat, beta)
        # brute-force points of the lattice with small multiplicities
        pts = set()

        def walk(i, acc):
            if i == len(gens):
                pts.add(acc)
                return
            for k in range(7):
                walk(i + 1, acc + gens[i] * k)
        walk(0, ex(0, 0))
        zero = ex(0, 0)
        for p in pts:
            if not p < beta:
                q = p - beta
                assert not q < zero
                assert gs_member(tr, q, 200000) == "yes"


def test_member_examples():
    lat = GridSet.lattice(1, [ex(3), ex(5)])
    assert gs_member(lat, ex(7)) == "no"
    assert gs_member(lat, ex(8)) == "yes"
    assert gs_member(GridSet.point(ex(0)), ex(0)) == "yes"
    assert gs_member(lat, ex(Fraction(1, 2))) == "no"
    # negative deeper coordinates are handled exactly
    g = GridSet.lattice(2, [ex(1, -5), ex(0, 1)])
    assert gs_member(g, ex(2, -7)) == "yes"
    assert gs_member(g, ex(1, -6)) == "no"


def test_member_cap_gives_unknown():
    lat = GridSet.lattice(1, [ex(1), ex(2), ex(3)])
    assert gs_member(lat, ex(40), cap=5) == "unknown"


def test_enumerate_examples():
    assert enum1(lattice1(2), 7) == [0, 2, 4, 6]
    assert enum1(GridSet.lattice(1, [ex(3), ex(5)]), 12) == \
        [0, 3, 5, 6, 8, 9, 10, 11]
    with pytest.raises(NonAccessibleError):
        gs_enumerate_below(GridSet.lattice(2, [ex(0, 1)]), ex(1, 0), cap=10)


def test_enumerate_matches_brute_force_when_exact():
    rng = random.Random(13)
    for _ in range(100):
        gens = [rng.randint(1, 9) for _ in range(rng.randint(1, 3))]
        offset = rng.randint(0, 5)
        grid = lattice1(*gens, offset=offset)
        assert grid.exact
        bound = rng.randint(1, 60)
        assert enum1(grid, bound) == \
            [x for x in brute_lattice(gens, bound, offset) if x < bound]


def test_four_transformations_soundness_random():
    # brute-force containment for all four transformations, rank 1
    rng = random.Random(14)
    for _ in range(200):
        gens_a = [rng.randint(1, 6) for _ in range(rng.randint(1, 2))]
        gens_b = [rng.randint(1, 6) for _ in range(rng.randint(1, 2))]
        off_a = rng.randint(0, 4)
        off_b = rng.randint(0, 4)
        a = lattice1(*gens_a, offset=off_a)
        b = lattice1(*gens_b, offset=off_b)
        truth_a = set(brute_lattice(gens_a, 60, off_a))
        truth_b = set(brute_lattice(gens_b, 60, off_b))
        total = set(enum1(gs_sum(a, b), 51))
        assert {x + y for x in truth_a for y in truth_b
                if x + y <= 50} <= total
        sg = set(enum1(gs_semigroup(a), 31))
        assert {x for x in truth_a if x <= 30} <= sg
        alpha = rng.randint(1, 5)
        added = set(enum1(gs_add_generator(a, ex(alpha)), 51))
        assert {x + k * alpha for x in truth_a for k in range(4)
                if x + k * alpha <= 50} <= added
        beta = rng.randint(0, 20)
        tr = set(enum1(gs_translate_neg(a, ex(beta)), 51))
        assert {x - beta for x in truth_a
                if beta <= x <= 50} <= tr

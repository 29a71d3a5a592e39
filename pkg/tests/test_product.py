import random
from fractions import Fraction

import pytest

from tautring.graphs import DomainError, make_graph
from tautring.integrate import evaluate, pair_classes
from tautring.product import (
    kappa1_times,
    multiply,
    multiply_mixed,
    multiply_strata,
    power,
    psi_times,
)
from tautring.strata import (
    MixedClass,
    TautClass,
    fundamental_stratum,
    generators,
    make_stratum,
    single,
    unit,
)


def smooth_psi(g, n, i):
    sm = make_graph([g], [tuple(range(1, n + 1))], [])
    return single(g, n, make_stratum(sm, {i: 1}, {}, {}))


def smooth_kappa1(g, n):
    sm = make_graph([g], [tuple(range(1, n + 1))], [])
    return single(g, n, make_stratum(sm, {}, {}, {0: (1,)}))


def random_class(rng, g, n, d, density=0.6):
    x = TautClass(g, n, d)
    for s in generators(g, n, d):
        if rng.random() < density:
            x.iadd_term(s, Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
    return x


def test_unit_is_neutral():
    for g, n in [(1, 2), (0, 4), (2, 1)]:
        one = single(g, n, fundamental_stratum(g, n))
        for s in generators(g, n, 1):
            x = single(g, n, s)
            assert multiply(one, x) == x
            assert multiply(x, one) == x


def test_type_mismatch_rejected():
    x = single(1, 1, fundamental_stratum(1, 1))
    y = single(1, 2, fundamental_stratum(1, 2))
    with pytest.raises(DomainError):
        multiply(x, y)


def test_commutativity_random():
    rng = random.Random(4242)
    for g, n in [(1, 2), (0, 5), (1, 3)]:
        for _ in range(4):
            x = random_class(rng, g, n, 1)
            y = random_class(rng, g, n, 1)
            assert multiply(x, y) == multiply(y, x)


def test_associativity_random():
    rng = random.Random(515)
    for g, n in [(1, 2), (0, 5)]:
        for _ in range(3):
            x = random_class(rng, g, n, 1)
            y = random_class(rng, g, n, 1)
            z = random_class(rng, g, n, 1)
            assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))


def test_fast_paths_match_general_product():
    rng = random.Random(88)
    for g, n in [(1, 2), (0, 4)]:
        for s in generators(g, n, 1):
            x = single(g, n, s)
            for i in range(1, n + 1):
                assert psi_times(i, x) == multiply(smooth_psi(g, n, i), x)
            assert kappa1_times(x) == multiply(smooth_kappa1(g, n), x)
        x = random_class(rng, g, n, 1)
        assert psi_times(1, x) == multiply(smooth_psi(g, n, 1), x)
        assert kappa1_times(x) == multiply(smooth_kappa1(g, n), x)


def test_excess_intersection_loop_square():
    # self-intersection of the nonseparating boundary on (1,2)
    loop = make_stratum(make_graph([0], [(1, 2)], [(0, 0)]), {}, {}, {})
    irr = single(1, 2, loop)
    sq = multiply(irr, irr)
    terms = {s.label(): c for s, c in sq.terms.items()}
    assert terms == {
        "[(0|1,2)#((0,0),(0,1)) | psi(h0)]": Fraction(-2),
        "[(0|1);(0|2)#((0,0),(1,0));((0,1),(1,1)) | 1]": Fraction(2),
    }


def test_excess_intersection_separating_square():
    d12 = make_stratum(make_graph([0, 0], [(1, 2), (3, 4, 5)], [(0, 1)]),
                       {}, {}, {})
    x = single(0, 5, d12)
    assert evaluate(power(x, 2)) == -1


def test_kappa_square_against_direct_integral():
    # evaluate(kappa_1^2) on (0,5) via the product route vs the pushforward
    # recursion route
    x = smooth_kappa1(0, 5)
    assert evaluate(multiply(x, x)) == 5
    assert pair_classes(x, x) == 5


def test_dimension_overflow_is_zero():
    x = smooth_psi(1, 1, 1)
    assert multiply(x, x).is_zero()
    assert power(x, 3).is_zero()


def test_power_small_cases():
    x = smooth_psi(1, 2, 1)
    assert power(x, 0) == single(1, 2, fundamental_stratum(1, 2))
    assert power(x, 1) == x
    assert power(x, 2) == multiply(x, x)
    with pytest.raises(DomainError):
        power(x, -1)


def test_multiply_strata_matches_multiply():
    gens = generators(1, 2, 1)
    for s in gens:
        for t in gens:
            assert multiply_strata(s, t) == multiply(single(1, 2, s),
                                                     single(1, 2, t))


def test_multiply_mixed_grading():
    rng = random.Random(660)
    g, n = 1, 2
    a = MixedClass(g, n)
    a.set_part(single(g, n, fundamental_stratum(g, n)).scale(Fraction(3)))
    a.set_part(random_class(rng, g, n, 1))
    b = MixedClass(g, n)
    b.set_part(random_class(rng, g, n, 1))
    ab = multiply_mixed(a, b)
    assert ab.part(1) == b.part(1).scale(Fraction(3))
    expect2 = multiply(a.part(1), b.part(1)).add(b.part(2).scale(Fraction(3)))
    assert ab.part(2) == expect2
    one = unit(g, n)
    assert multiply_mixed(one, a) == a

import random
from fractions import Fraction

import pytest

from tautring.graphs import DomainError, enumerate_stable_graphs, make_graph
from tautring.integrate import class_pairing_vector, evaluate
from tautring.pixton import (
    RamificationData,
    ThresholdError,
    closed_weighting_value,
    count_admissible,
    delta_factor,
    direct_weighting_value,
    exp_class,
    hain_divisor,
    interpolate_constant_term,
    pixton_class,
    pixton_mixed,
    q_form,
    weighting_sum,
)
from tautring.strata import MixedClass, generators, restrict, single, unit


def test_ramification_data_validation():
    with pytest.raises(DomainError):
        RamificationData(1, 2, 0, (1, 0))  # sum != 0
    with pytest.raises(DomainError):
        RamificationData(1, 1, 0, (0, 0))  # wrong length
    with pytest.raises(DomainError):
        RamificationData(0, 2, 0, (0, 0))  # unstable type
    d = RamificationData.from_a(2, 1, 1, (2,))
    assert d.A == (3,) and d.a == (2,)
    assert RamificationData(1, 3, 0, (2, 4, -6)).residue_bound() == 12


def test_weighting_sum_loop_frozen():
    loop = make_graph([0], [(1,)], [(0, 0)])
    data = RamificationData(1, 1, 0, (0,))
    # sum of w(r-w) over residues w, divided by r
    expected = {5: 4, 7: 8, 11: 20}
    for r, val in expected.items():
        table = weighting_sum(loop, 0, data, r)
        assert table == {((0, 0),): Fraction(val)}


def test_admissible_count_is_r_to_h1():
    rng = random.Random(2026)
    pool = []
    for g, n, c in [(1, 1, 1), (1, 2, 2), (2, 1, 2), (0, 4, 1)]:
        pool.extend(enumerate_stable_graphs(g, n, c))
    for _ in range(15):
        G = rng.choice(pool)
        g, n = G.genus(), G.num_legs
        k = rng.randint(0, 2)
        total = k * (2 * g - 2 + n)
        A = [rng.randint(-3, 3) for _ in range(n - 1)]
        A.append(total - sum(A))
        data = RamificationData(g, n, k, tuple(A))
        r = data.residue_bound() + rng.randint(1, 5)
        assert count_admissible(G, data, r) == r ** G.h1


def test_closed_matches_direct_weighting():
    rng = random.Random(5150)
    pool = []
    for g, n, c in [(1, 1, 1), (1, 2, 2), (2, 1, 2)]:
        pool.extend(G for G in enumerate_stable_graphs(g, n, c)
                    if G.num_edges > 0)
    for _ in range(10):
        G = rng.choice(pool)
        g, n = G.genus(), G.num_legs
        k = rng.randint(0, 1)
        total = k * (2 * g - 2 + n)
        A = [rng.randint(-2, 2) for _ in range(n - 1)]
        A.append(total - sum(A))
        data = RamificationData(g, n, k, tuple(A))
        mvec = tuple(rng.randint(0, 2) for _ in range(G.num_edges))
        r = data.residue_bound() + rng.randint(1, 4)
        assert closed_weighting_value(G, data, mvec, r) == \
            direct_weighting_value(G, data, mvec, r)


def test_interpolation_recovers_constant_term():
    # f(r) = 3r^2 - 5r + 7/2 sampled beyond the bound
    f = lambda r: Fraction(3) * r * r - 5 * r + Fraction(7, 2)
    samples = [(r, f(r)) for r in range(10, 17)]
    assert interpolate_constant_term(samples, 2) == Fraction(7, 2)


def test_interpolation_rejects_non_polynomial_surplus():
    f = lambda r: Fraction(r * r)
    samples = [(r, f(r)) for r in range(5, 10)]
    samples.append((10, Fraction(1)))  # corrupted surplus point
    with pytest.raises(ThresholdError):
        interpolate_constant_term(samples, 2)


def test_degree_zero_is_fundamental():
    for data in [RamificationData(1, 2, 0, (1, -1)),
                 RamificationData(2, 1, 1, (3,)),
                 RamificationData(1, 3, 0, (2, 4, -6))]:
        cls = pixton_class(data, 0)
        assert cls == single(data.g, data.n,
                             unit(data.g, data.n).part(0).sorted_terms()[0][0])


def test_degree_one_small_type_frozen():
    loop_label = "[(0|1,2)#((0,0),(0,1)) | 1]"
    for a in (1, 2, 3):
        cls = pixton_class(RamificationData(1, 2, 0, (a, -a)), 1)
        terms = {s.label(): c for s, c in cls.terms.items()}
        assert terms == {
            "[(1|1,2)# | psi(m1)]": Fraction(a * a),
            "[(1|1,2)# | psi(m2)]": Fraction(a * a),
            loop_label: Fraction(-1, 6),
        }
    one_pt = pixton_class(RamificationData(1, 1, 0, (0,)), 1)
    terms = {s.label(): c for s, c in one_pt.terms.items()}
    assert terms == {"[(0|1)#((0,0),(0,1)) | 1]": Fraction(-1, 6)}
    assert evaluate(one_pt) == Fraction(-1, 12)


def test_degree_beyond_dimension_is_zero():
    data = RamificationData(1, 1, 0, (0,))
    assert pixton_class(data, 2).is_zero()


def test_hain_divisor_frozen_examples():
    h = hain_divisor(RamificationData(1, 2, 0, (1, -1)))
    terms = {s.label(): c for s, c in h.terms.items()}
    assert terms == {
        "[(1|1,2)# | psi(m1)]": Fraction(1, 2),
        "[(1|1,2)# | psi(m2)]": Fraction(1, 2),
    }
    h = hain_divisor(RamificationData.from_a(2, 1, 1, (2,)))
    terms = {s.label(): c for s, c in h.terms.items()}
    assert terms == {
        "[(2|1)# | kappa_1(v0)]": Fraction(-1, 2),
        "[(2|1)# | psi(m1)]": Fraction(9, 2),
        "[(1|);(1|1)#((0,0),(1,0)) | 1]": Fraction(-1, 2),
    }
    assert q_form(RamificationData(1, 2, 0, (1, -1))) == \
        hain_divisor(RamificationData(1, 2, 0, (1, -1))).scale(Fraction(2))


def test_compact_type_pin_small():
    for data in [RamificationData(1, 2, 0, (2, -2)),
                 RamificationData.from_a(2, 1, 1, (2,)),
                 RamificationData(1, 3, 1, (1, 1, 1))]:
        p1 = pixton_class(data, 1)
        assert restrict(p1, "ct").sorted_terms() == \
            q_form(data).sorted_terms()


def test_delta_factor_frozen():
    df = delta_factor(1, 2, 2)
    assert df.degrees() == [0, 1, 2]
    t0 = {s.label(): c for s, c in df.part(0).terms.items()}
    t1 = {s.label(): c for s, c in df.part(1).terms.items()}
    t2 = {s.label(): c for s, c in df.part(2).terms.items()}
    assert t0 == {"[(1|1,2)# | 1]": Fraction(1)}
    assert t1 == {"[(0|1,2)#((0,0),(0,1)) | 1]": Fraction(-1, 6)}
    assert t2 == {"[(0|1,2)#((0,0),(0,1)) | psi(h0)]": Fraction(1, 30)}


def test_sample_window_independence():
    data = RamificationData(1, 2, 0, (1, -1))
    a = pixton_class(data, 1, sample_offset=0)
    b = pixton_class(data, 1, sample_offset=1)
    assert a == b


def test_pixton_mixed_collects_all_degrees():
    data = RamificationData(1, 2, 0, (1, -1))
    mix = pixton_mixed(data)
    for d in range(0, data.dim + 1):
        assert mix.part(d) == pixton_class(data, d)


def test_exp_class_rejects_nonunit_degree_zero():
    g, n = 1, 2
    bad = unit(g, n).scale(Fraction(2))
    with pytest.raises(DomainError):
        exp_class(bad)


def test_exp_class_matches_series_by_hand():
    g, n = 1, 2
    x = pixton_class(RamificationData(1, 2, 0, (1, -1)), 1)
    m = MixedClass(g, n, {1: x})
    e = exp_class(m)
    assert e.part(0) == unit(g, n).part(0)
    assert e.part(1) == x
    from tautring.product import multiply
    assert e.part(2) == multiply(x, x).scale(Fraction(1, 2))


def test_gplus1_canary_pairs_to_zero():
    cls = pixton_class(RamificationData(1, 2, 0, (2, -2)), 2)
    cogens = generators(1, 2, 0)
    assert class_pairing_vector(cls, cogens) == (Fraction(0),)

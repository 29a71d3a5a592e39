import json
from fractions import Fraction

import pytest

from tautring.graphs import DomainError, make_graph
from tautring.integrate import pair_strata
from tautring.pixton import RamificationData
from tautring.strata import TautClass, generators, make_stratum, single
from tautring.verify import (
    CheckReport,
    check_exp_identities,
    check_gplus1,
    check_multiplicativity,
    check_section7,
    in_span_mod_pairing,
    is_zero_mod_pairing,
)


def smooth(g, n):
    return make_graph([g], [tuple(range(1, n + 1))], [])


def test_zero_class_passes():
    rep = is_zero_mod_pairing(TautClass(1, 2, 1))
    assert rep.verdict == "pass-mod-pairing-kernel"
    assert rep.witness["generators_checked"] == 5


def test_nonzero_class_fails_with_witness():
    psi = single(1, 1, make_stratum(smooth(1, 1), {1: 1}, {}, {}))
    rep = is_zero_mod_pairing(psi)
    assert rep.verdict == "fail"
    assert rep.witness["pairing"] == Fraction(1, 24)


def test_degree_beyond_dimension_is_vacuous():
    rep = is_zero_mod_pairing(TautClass(1, 1, 5))
    assert rep.passed


def test_span_membership_with_verified_certificate():
    g, n = 1, 2
    sm = smooth(g, n)
    kap = single(g, n, make_stratum(sm, {}, {}, {0: (1,)}))
    span = [make_stratum(sm, {1: 1}, {}, {}),
            make_stratum(sm, {2: 1}, {}, {}),
            make_stratum(make_graph([1, 0], [(), (1, 2)], [(0, 1)]),
                         {}, {}, {})]
    rep = in_span_mod_pairing(kap, span)
    assert rep.verdict == "pass-mod-pairing-kernel"
    coeffs = rep.witness["coefficients"]
    # the certificate must reproduce every pairing of the target class
    for c in generators(g, n, 1):
        got = sum((coeffs[s.label()] * pair_strata(s, c) for s in span),
                  Fraction(0))
        want = sum((w * pair_strata(s, c) for s, w in kap.terms.items()),
                   Fraction(0))
        assert got == want


def test_span_failure_carries_residual():
    g, n = 1, 2
    psi = single(g, n, make_stratum(smooth(g, n), {1: 1}, {}, {}))
    irr = make_stratum(make_graph([0], [(1, 2)], [(0, 0)]), {}, {}, {})
    rep = in_span_mod_pairing(psi, [irr])
    assert rep.verdict == "fail"
    row = rep.witness["residual_row"]
    assert row[-1] != 0 and all(v == 0 for v in row[:-1])


def test_span_rejects_degree_mismatch():
    g, n = 1, 2
    psi = single(g, n, make_stratum(smooth(g, n), {1: 1}, {}, {}))
    banana = make_stratum(
        make_graph([0, 0], [(1,), (2,)], [(0, 1), (0, 1)]), {}, {}, {})
    with pytest.raises(DomainError):
        in_span_mod_pairing(psi, [banana])


def test_check_report_serialization():
    rep = CheckReport("demo", {"x": Fraction(1, 3)}, "pass",
                      {"v": [Fraction(2), "s"]}, runtime_ms=17)
    full = json.loads(rep.to_json())
    assert full["params"]["x"] == "1/3"
    assert full["witness"]["v"] == ["2", "s"]
    assert full["runtime_ms"] == 17
    bare = json.loads(rep.to_json(with_runtime=False))
    assert "runtime_ms" not in bare
    assert rep.passed


def test_multiplicativity_input_validation():
    with pytest.raises(DomainError):
        check_multiplicativity(RamificationData(1, 2, 0, (1, -1)),
                               RamificationData(1, 3, 0, (1, 0, -1)))
    with pytest.raises(DomainError):
        # degree 2g exceeds the dimension of the one-pointed genus-1 space
        check_multiplicativity(RamificationData(1, 1, 0, (0,)),
                               RamificationData(1, 1, 0, (0,)))


def test_multiplicativity_passes_on_treelike_locus():
    rep = check_multiplicativity(RamificationData(1, 2, 0, (1, -1)),
                                 RamificationData(1, 2, 0, (3, -3)), "tl")
    assert rep.verdict == "pass-mod-pairing-kernel"


def test_exp_identities_smallest_case():
    rep = check_exp_identities(RamificationData(1, 1, 0, (0,)))
    assert rep.passed
    assert rep.witness["degrees_checked"] == 2


def test_gplus1_small_case():
    rep = check_gplus1(RamificationData(1, 2, 1, (1, 1)))
    assert rep.passed
    assert rep.params["degree"] == 2


def test_section7_bundle_verdicts():
    reports = check_section7()
    by_name = {r.name: r for r in reports}
    assert len(reports) == 5
    assert by_name["section7-products-differ"].verdict == "pass"
    assert by_name["section7-banana-span"].verdict == "pass-mod-pairing-kernel"
    assert by_name["section7-treelike-nontrivial"].verdict == "pass"
    assert by_name["section7-irr-square-zero"].verdict == \
        "pass-mod-pairing-kernel"
    assert by_name["section7-rank-three"].verdict == "pass"
    assert by_name["section7-rank-three"].witness["rank"] == 3

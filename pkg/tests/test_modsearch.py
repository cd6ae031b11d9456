"""Tests for the bounded-modulus pair search and its brute-force oracle."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emgraph import modsearch as ms
from emgraph import tuples as tp
from emgraph.arith import NotSquarefree, Factorization, factor, squarefree_stream
from emgraph.graph import verify_path

from table_data import COPRIME_ROWS


def residues_of(records):
    return {rc.a for r in records for rc in r.residues}


# search_modulus -----------------------------------------------------------

def test_search_modulus_30():
    recs = ms.search_modulus(30, factor(30))
    assert len(recs) == 2
    assert [(r.p.primes, r.q.primes) for r in recs] == \
        [((2, 3, 5), (5, 3, 2)), ((3, 2, 5), (5, 2, 3))]
    assert residues_of(recs) == {19, 29}


def test_search_modulus_small_omega_empty():
    assert ms.search_modulus(6, factor(6)) == []
    assert ms.search_modulus(105, factor(105)) == []


def test_search_modulus_210():
    recs = ms.search_modulus(210, factor(210), irreducible_only=True)
    assert residues_of(recs) == {107, 149}
    assert all(r.kind == "quadruple-case-II" for r in recs)
    # reducible pairs appear once the irreducibility filter is dropped
    all_pairs = ms.search_modulus(210, factor(210), irreducible_only=False)
    assert len(all_pairs) > len(recs)
    assert all(not tp.is_irreducible_pair(r.p.primes, r.q.primes)
               for r in all_pairs if r.residues[0].a not in {107, 149})


def test_search_modulus_858():
    recs = ms.search_modulus(858, factor(858), irreducible_only=True)
    assert residues_of(recs) == {467, 779, 571, 857}
    kinds = sorted(r.kind for r in recs)
    assert kinds == ["quadruple-case-I", "quadruple-case-I",
                     "quadruple-case-IV", "quadruple-case-IV"]


def test_search_modulus_validation():
    with pytest.raises(NotSquarefree):
        ms.search_modulus(12, factor(12))
    partial = Factorization(2813785 * 4294967311,
                            ((5, 1),), 2813785 * 4294967311 // 5)
    with pytest.raises(ms.IncompleteFactorization):
        ms.search_modulus(partial.n, partial)


def test_search_records_verify():
    for m in (30, 210, 546, 858, 1722, 4930, 5590, 6882):
        for rec in ms.search_modulus(m, factor(m)):
            assert tp.equivalent(rec.p.primes, rec.q.primes)
            assert rec.irreducible
            a = rec.residues[0].a
            assert verify_path(a, rec.p.primes)
            assert verify_path(a, rec.q.primes)


# brute force oracle ---------------------------------------------------------

def test_brute_force_examples():
    assert ms.brute_force_pairs(105, factor(105)) == []
    recs = ms.brute_force_pairs(30, factor(30))
    assert recs == ms.search_modulus(30, factor(30), irreducible_only=False)


def test_brute_force_guard():
    m = 2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23
    with pytest.raises(ms.TooManyFactors):
        ms.brute_force_pairs(m, factor(m))


@pytest.mark.parametrize("row", COPRIME_ROWS[:6])
def test_brute_force_coprime_rows(row, request):
    prime_set, m, residues, inv_density = row
    fz = factor(m)
    assert fz.primes == tuple(sorted(prime_set))
    recs = ms.brute_force_pairs(m, fz, irreducible_only=True)
    assert residues_of(recs) == set(residues)
    rep = ms.density_report(recs)
    assert rep.inverse_density == inv_density


def test_oracle_equivalence_sampled():
    for m, fz in squarefree_stream(2, 6000, 3):
        for irr in (False, True):
            assert ms.search_modulus(m, fz, irr) == \
                ms.brute_force_pairs(m, fz, irr), (m, irr)


@given(st.integers(min_value=6000, max_value=99999))
@settings(max_examples=60, deadline=None)
def test_oracle_equivalence_random(m):
    entries = list(squarefree_stream(m, m, 3))
    if not entries:
        return
    m, fz = entries[0]
    for irr in (False, True):
        assert ms.search_modulus(m, fz, irr) == \
            ms.brute_force_pairs(m, fz, irr)


@pytest.mark.parametrize("m", [510510, 570570, 9699690])
def test_oracle_equivalence_deep_chains(m):
    # nothing below 1e5 has 7+ prime factors, so exercise those chain
    # depths explicitly against the permutation oracle
    fz = factor(m)
    assert fz.omega >= 7
    for irr in (False, True):
        assert ms.search_modulus(m, fz, irr) == \
            ms.brute_force_pairs(m, fz, irr)


# density -------------------------------------------------------------------

def test_density_examples():
    recs = ms.search_modulus(30, factor(30))
    rep = ms.density_report(recs)
    assert rep == ms.DensityReport(30, 2, 4)


def test_density_full_group_210():
    recs = ms.search_modulus(210, factor(210), irreducible_only=False)
    rep = ms.density_report(recs)
    assert rep.class_count == 6
    assert rep.inverse_density == 8


def test_density_reduced_fraction():
    base = ms.search_modulus(30, factor(30))
    extra = tp.PairRecord(base[0].p, base[0].q,
                          (tp.ResidueClass(1, 30),), "general")
    rep = ms.density_report(base + [extra])
    assert rep.class_count == 3
    assert rep.inverse_density == Fraction(8, 3)


# search_range ---------------------------------------------------------------

def test_search_range_examples():
    cfg = ms.SearchConfig(2, 10_000, irreducible_only=True)
    recs = list(ms.search_range(cfg))
    by_modulus = {}
    for r in recs:
        by_modulus.setdefault(r.modulus, []).append(r)
    # every tabulated modulus below 1e4 shows up; longer-tuple families
    # (2310, 2730, ...) are additional legitimate finds
    assert set(by_modulus) >= {30, 210, 546, 595, 858, 1254, 1722,
                               4930, 5590, 6882}
    assert len(by_modulus[30]) == 2
    assert len(by_modulus[210]) == 2
    assert len(by_modulus[1722]) == 4
    assert min(by_modulus) == 30
    # ordered by modulus
    mods = [r.modulus for r in recs]
    assert mods == sorted(mods)


def test_search_range_empty_below_30():
    assert list(ms.search_range(ms.SearchConfig(2, 29))) == []


def test_search_range_coprime_filter():
    cfg = ms.SearchConfig(2, 10 ** 6, coprime_to=1806,
                          irreducible_only=True)
    assert list(ms.search_range(cfg)) == []


def test_search_range_worker_invariance():
    base = list(ms.search_range(ms.SearchConfig(2, 200_000)))
    dual = list(ms.search_range(ms.SearchConfig(2, 200_000,
                                                worker_count=2)))
    assert base == dual


def test_search_range_checkpoint_resume(tmp_path):
    ck = str(tmp_path / "resume.txt")
    full = list(ms.search_range(ms.SearchConfig(2, 140_000)))
    first = []
    gen = ms.search_range(ms.SearchConfig(2, 140_000), checkpoint=ck)
    for rec in gen:
        first.append(rec)
        if rec.modulus > 70_000:
            gen.close()
            break
    state = ms.read_checkpoint(ck)
    assert state is not None and state[0] < 140_000
    rest = list(ms.search_range(ms.SearchConfig(2, 140_000), checkpoint=ck))
    stitched = first + [r for r in rest if r not in first]
    assert {r.to_json_line() for r in stitched} >= \
        {r.to_json_line() for r in full}


def test_search_config_validation():
    with pytest.raises(ValueError):
        ms.SearchConfig(10, 5)
    with pytest.raises(ValueError):
        ms.SearchConfig(2, 10, min_k=2)

"""Tests for tuple equivalence, multiplicity, and pair records."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emgraph import tuples as tp
from emgraph.arith import sieve_primes
from emgraph.graph import verify_path

from table_data import TRIPLE_ROWS, QUADRUPLE_ROWS, COPRIME_ROWS

PRIMES_100 = sieve_primes(100)
PRIMES_50 = sieve_primes(50)


def definition_equivalent(P, Q):
    """Oracle: the permutation/congruence form of equivalence.

    Scans every permutation relating the orderings and checks the prefix
    product congruence at each position.
    """
    if sorted(P) != sorted(Q):
        return False
    k = len(P)
    pos_q = {p: j for j, p in enumerate(Q)}
    # distinct entries: the permutation is determined by values
    pi = [pos_q[p] for p in P]
    pre_p = [1]
    pre_q = [1]
    for i in range(k):
        pre_p.append(pre_p[-1] * P[i])
        pre_q.append(pre_q[-1] * Q[i])
    return all((pre_p[i] - pre_q[pi[i]]) % P[i] == 0 for i in range(k))


def distinct_prime_tuples(pool, k):
    return st.lists(st.sampled_from(pool), min_size=k, max_size=k,
                    unique=True).map(tuple)


# residue classes --------------------------------------------------------

@pytest.mark.parametrize("primes,m,a", [
    ((2, 3, 5), 30, 19),
    ((7, 5, 17), 595, 237),
    ((7,), 7, 6),
])
def test_residue_class_examples(primes, m, a):
    rc = tp.residue_class(primes)
    assert (rc.a, rc.m) == (a, m)


@pytest.mark.parametrize("row", TRIPLE_ROWS)
def test_residue_class_triple_rows(row):
    primes, m, a = row
    rc = tp.residue_class(primes)
    assert (rc.a, rc.m) == (a, m)


def test_residue_witnesses_satisfy_chain():
    # both the least representative and the next one admit the path
    for primes, m, a in TRIPLE_ROWS:
        assert verify_path(a, primes)
        assert verify_path(a + m, primes)
    for primes, m, residues, _ in QUADRUPLE_ROWS[:8]:
        rc = tp.residue_class(primes)
        assert rc.a in residues
        assert verify_path(rc.a, primes)
        assert verify_path(rc.a + m, primes)


# equivalence ------------------------------------------------------------

def test_equivalent_examples():
    assert tp.equivalent((2, 3, 5), (5, 3, 2))
    assert not tp.equivalent((2, 3, 5), (3, 2, 5))
    assert tp.equivalent((2, 3, 5), (2, 3, 5))


@pytest.mark.parametrize("prime_set", [(2, 3, 5), (2, 5, 7, 3),
                                       (5, 13, 73, 593)])
def test_equivalent_matches_definition_oracle(prime_set):
    for P in itertools.permutations(prime_set):
        for Q in itertools.permutations(prime_set):
            assert tp.equivalent(P, Q) == definition_equivalent(P, Q), (P, Q)


def test_multiplicity_examples():
    assert tp.multiplicity((2, 3)) == 1
    assert tp.multiplicity((2, 3, 5)) == 2
    assert tp.multiplicity((3, 5, 2)) == 1


def test_multiplicity_guard():
    with pytest.raises(tp.TupleTooLong):
        tp.multiplicity(tuple(PRIMES_100[:11]))


def test_equivalence_class_examples():
    cls = tp.equivalence_class((2, 3, 5))
    assert [c.primes for c in cls] == [(2, 3, 5), (5, 3, 2)]
    cls = tp.equivalence_class((2, 5, 7, 3))
    assert sorted(c.primes for c in cls) == [(2, 5, 7, 3), (3, 7, 2, 5)]
    assert [c.primes for c in tp.equivalence_class((7,))] == [(7,)]


def test_no_multiple_pairs_or_singletons():
    # exhaustive over primes < 50: k <= 2 always has multiplicity 1
    for a, b in itertools.combinations(PRIMES_50, 2):
        for t in ((a,), (a, b), (b, a)):
            assert tp.multiplicity(t) == 1, t


def test_small_tuples_multiplicity_at_most_two():
    # exhaustive over primes < 50: k in (3, 4) never exceeds 2
    for combo in itertools.combinations(PRIMES_50, 3):
        groups = {}
        for perm in itertools.permutations(combo):
            groups.setdefault(tp.residue_base(perm), []).append(perm)
        assert max(len(g) for g in groups.values()) <= 2
    for combo in itertools.combinations(PRIMES_50, 4):
        groups = {}
        for perm in itertools.permutations(combo):
            groups.setdefault(tp.residue_base(perm), []).append(perm)
        assert max(len(g) for g in groups.values()) <= 2


# reversal ---------------------------------------------------------------

def test_reverse_examples():
    assert tp.reverse(tp.PrimeTuple((2, 3, 5))).primes == (5, 3, 2)
    assert tp.reverse(tp.PrimeTuple((7,))).primes == (7,)
    assert tp.reverse(tp.PrimeTuple((2, 5, 7, 3))).primes == (3, 7, 5, 2)


@given(distinct_prime_tuples(PRIMES_100, 4),
       st.permutations(range(4)))
@settings(max_examples=150, deadline=None)
def test_reversal_preserves_equivalence(P, images):
    Q = tp.Permutation(tuple(images)).apply(P)
    if tp.equivalent(P, Q):
        assert tp.equivalent(tuple(reversed(P)), tuple(reversed(Q)))
    assert tp.multiplicity(P) == tp.multiplicity(tuple(reversed(P)))


@given(st.integers(min_value=1, max_value=6), st.data())
@settings(max_examples=100, deadline=None)
def test_reversal_multiplicity_property(k, data):
    P = data.draw(distinct_prime_tuples(PRIMES_100, k))
    assert tp.multiplicity(P) == tp.multiplicity(tuple(reversed(P)))


# irreducible pairs -------------------------------------------------------

def test_is_irreducible_pair_examples():
    assert tp.is_irreducible_pair((2, 3, 5), (5, 3, 2))
    assert not tp.is_irreducible_pair((7, 2, 3, 5), (7, 5, 3, 2))
    assert not tp.is_irreducible_pair((2, 3, 5), (2, 3, 5))


def test_is_irreducible_pair_symmetric():
    cases = [((2, 3, 5), (5, 3, 2)), ((7, 2, 3, 5), (7, 5, 3, 2)),
             ((2, 5, 7, 3), (3, 7, 2, 5))]
    for P, Q in cases:
        assert tp.is_irreducible_pair(P, Q) == tp.is_irreducible_pair(Q, P)


# records ----------------------------------------------------------------

def test_pair_record_canonical_and_roundtrip():
    r = tp.make_pair((5, 3, 2), (2, 3, 5), kind="triple")
    assert r.p.primes == (2, 3, 5) and r.q.primes == (5, 3, 2)
    assert r.modulus == 30 and r.residues[0].a == 19
    again = tp.PairRecord.from_json_line(r.to_json_line())
    assert again == r
    assert again.to_json_line() == r.to_json_line()


def test_pair_record_large_values_roundtrip():
    primes, m, residues, _ = QUADRUPLE_ROWS[-1]
    r = tp.make_pair(primes, tuple(reversed(primes)))
    again = tp.PairRecord.from_json_line(r.to_json_line())
    assert again.modulus == m == r.modulus


def test_prime_tuple_validation():
    with pytest.raises(ValueError):
        tp.PrimeTuple((2, 2, 3))
    with pytest.raises(ValueError):
        tp.PrimeTuple((4, 3))


def test_coprime_rows_residues_are_invertible():
    for prime_set, m, residues, _ in COPRIME_ROWS:
        for a in residues:
            tp.ResidueClass(a, m)  # validates reduction and gcd

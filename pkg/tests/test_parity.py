import pytest
from hypothesis import assume, given, settings, strategies as st

from parityscan.errors import DomainError
from parityscan.parity import (base_case_L, beyond_midpoint_probe, chain_check, closed_form_L,
                               gap_bound_check, largest_multiple, lemma1_check, lemma2_check,
                               parity_scan_pair, quotient_parity)
from parityscan.primes import PrimePair, iterate_pairs

from oracles import bsearch_largest_multiple

odd_p = st.integers(1, 2**61).map(lambda n: 2 * n + 1)


@pytest.mark.parametrize("p,x,L", [(23, 784, 782), (5, 25, 25), (23, 676, 667), (3, 3, 3)])
def test_largest_multiple_examples(p, x, L):
    assert largest_multiple(p, x) == L


def test_largest_multiple_domain():
    with pytest.raises(DomainError):
        largest_multiple(23, 22)
    with pytest.raises(DomainError):
        largest_multiple(2, 10)


@settings(max_examples=500)
@given(odd_p, st.integers(0, 2**124))
def test_largest_multiple_contract(p, extra):
    x = p + extra
    L = largest_multiple(p, x)
    assert L <= x < L + p and L % p == 0
    if x < 10**30:
        assert L == bsearch_largest_multiple(p, x)


def test_closed_form_examples():
    assert closed_form_L(23, 24) == 575 == 23 * 25
    assert closed_form_L(23, 26) == 667 == 23 * 29
    with pytest.raises(DomainError):
        closed_form_L(23, 23)


@given(odd_p, st.integers(1, 2**40))
def test_closed_form_is_odd(p, k):
    assert closed_form_L(p, p + k) % 2 == 1


def test_parity_scan_pair_23_29():
    v = parity_scan_pair(PrimePair(23, 29))
    assert v.parity_holds and v.identity_holds and not v.divergent
    assert v.first_even_mi is None and v.first_identity_violation_mi is None


def test_parity_scan_smallest_pair():
    # m_i = 4 only; L(3, 16) = 15 odd and 3 * (8 - 3) = 15
    assert largest_multiple(3, 16) == 15 == closed_form_L(3, 4)
    v = parity_scan_pair(PrimePair(3, 5))
    assert v.parity_holds and v.identity_holds


def test_parity_scan_all_pairs_below_10_4():
    for pair in iterate_pairs(3, 10**4):
        v = parity_scan_pair(pair)
        assert v.parity_holds and v.identity_holds, pair


def test_parity_scan_reports_first_failure_on_synthetic_pair():
    # not consecutive primes, but a structurally valid pair wide enough to fail
    v = parity_scan_pair(PrimePair(7, 19))  # midpoint 13, k up to 6
    # k=3: 9//7 = 1 -> even; identity fails at the same point
    assert v.first_even_mi == 10 and v.first_identity_violation_mi == 10
    assert not v.parity_holds and not v.identity_holds and not v.divergent


def test_parity_and_identity_fail_together():
    # at the first k with k^2 >= p, floor(k^2 / p) == 1 (since (k-1)^2 < p), so
    # L turns even exactly where the closed form stops matching
    for p in range(3, 200, 2):
        for half in range(1, 2 * p):
            v = parity_scan_pair(PrimePair(p, p + 2 * half))
            assert not v.divergent
            assert v.first_even_mi == v.first_identity_violation_mi


def test_beyond_midpoint_probe():
    pair = PrimePair(23, 29)
    assert largest_multiple(23, 28 * 28) == 782 == 23 * 33 + 23
    assert beyond_midpoint_probe(pair, 28) == 0
    assert largest_multiple(23, 27 * 27) == 713 == 23 * 31
    assert beyond_midpoint_probe(pair, 27) == 1
    for bad in (26, 29, 24):
        with pytest.raises(DomainError):
            beyond_midpoint_probe(pair, bad)


def test_lemma1_examples():
    assert lemma1_check(23, 29)  # 2668 < 2704
    assert 4 * 23 * 29 == 2668 and 52**2 == 2704
    assert not lemma1_check(7, 7)
    assert lemma1_check(1, 3)


@given(st.integers(1, 2**62), st.integers(1, 2**62))
def test_lemma1_symmetric_and_false_on_diagonal(a, c):
    assert lemma1_check(a, c) == lemma1_check(c, a)
    assert lemma1_check(a, c) == (a != c)


def test_lemma2_examples():
    v = lemma2_check(PrimePair(23, 29))
    assert v and v.midpoint_bound_holds and v.bertrand_holds
    assert lemma2_check(PrimePair(3, 5))
    # structural pair violating Bertrand's step
    v = lemma2_check(PrimePair(3, 7))
    assert not v.bertrand_holds and not v


def test_base_case():
    assert base_case_L(23) == 575 and 529 < 575 < 576
    assert base_case_L(3) == 15
    assert base_case_L(5) == 35 == largest_multiple(5, 36)


@pytest.mark.parametrize("p,m_i,expected", [(23, 26, True), (23, 28, False), (23, 24, True),
                                            (3, 4, True), (7, 10, False)])
def test_chain_examples(p, m_i, expected):
    assert chain_check(p, m_i) is expected


def test_chain_worked_values():
    # 676 < 690 < 713 < 729
    assert 26**2 == 676 and 23 * (52 - 23) + 23 == 690 and 23 * 31 == 713 and 27**2 == 729


@given(odd_p)
def test_chain_base_case_always_true(p):
    assert chain_check(p, p + 1)


@settings(max_examples=400)
@given(odd_p, st.integers(1, 2**33))
def test_parity_and_identity_shortcuts(p, k):
    m_i = p + k
    L = largest_multiple(p, m_i * m_i)
    odd, ident = quotient_parity(p, m_i)
    # parity(L) = parity(1 + floor(k^2 / p)) for odd p
    assert (L % 2 == 1) == odd == ((1 + k * k // p) % 2 == 1)
    # L equals the closed form exactly when k^2 < p, and the chain agrees
    assert (L == closed_form_L(p, m_i)) == ident == (k * k < p) == chain_check(p, m_i)
    if ident:
        assert odd


@pytest.mark.parametrize("pair,t1,eq14", [((23, 29), 56, 14), ((113, 127), 256, None), ((3, 5), 8, None)])
def test_gap_bound_examples(pair, t1, eq14):
    v = gap_bound_check(PrimePair(*pair))
    assert v.theorem1_holds and v.theorem1_margin == t1
    assert v.eq14_holds
    if eq14 is not None:
        assert v.eq14_margin == eq14


def test_gap_bound_margin_nonzero_and_eq14_sign():
    for pair in iterate_pairs(3, 20000):
        v = gap_bound_check(pair)
        assert v.theorem1_margin != 0
        m = pair.midpoint
        assert v.eq14_holds == (pair.p_lo * pair.p_hi + pair.p_lo > m * m)


def test_huge_values_are_exact():
    p = 2**61 - 1  # prime
    pair = PrimePair(p, 2**61 + 33)  # structural: checks need no primality
    v = gap_bound_check(pair)
    assert v.theorem1_margin == 4 * p - 34**2
    m_i = p + 3
    assert largest_multiple(p, m_i * m_i) == closed_form_L(p, m_i)
    assert not chain_check(p, p + 2**31)

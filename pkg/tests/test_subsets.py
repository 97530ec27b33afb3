"""Signed subset vectors: dense oracle cross-checks and cap behavior."""

from itertools import chain, combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypschur import (
    SubsetCapError,
    XiFactor,
    binomial_suite,
    delta_empty,
    xi_inner,
    xi_vector,
)

# -- dense oracle -----------------------------------------------------------
# Everything below re-derives the vectors coordinate by coordinate over the
# power set, with no shortcuts, so the closed-form inner products in the
# package are checked against explicit summation.


def powerset(members):
    members = sorted(members)
    return chain.from_iterable(combinations(members, k)
                               for k in range(len(members) + 1))


def dense_xi(S, sign, tilde):
    """Coefficient dictionary of the (un)tilded vector over subsets of S."""
    coeffs = {}
    for omega in powerset(S):
        if sign == "+":
            c = 1
        else:
            c = (-1) ** len(omega)
        coeffs[frozenset(omega)] = c
    if not tilde:
        s = 1 if sign == "+" else -1
        coeffs = {k: s * v for k, v in coeffs.items()}
        coeffs[frozenset()] = coeffs.get(frozenset(), 0) - s
    return coeffs


def dense_inner(c1, c2):
    keys = set(c1) | set(c2)
    return sum(c1.get(k, 0) * c2.get(k, 0) for k in keys)


SIGNS = ("+", "-")


@pytest.mark.parametrize("s1", SIGNS)
@pytest.mark.parametrize("t1", (False, True))
@pytest.mark.parametrize("s2", SIGNS)
@pytest.mark.parametrize("t2", (False, True))
def test_inner_matches_dense_oracle(s1, t1, s2, t2):
    cases = [(frozenset(), frozenset()),
             (frozenset({1}), frozenset({1})),
             (frozenset({1, 2}), frozenset({2, 3})),
             (frozenset({1, 2, 3}), frozenset({4, 5})),
             (frozenset(range(6)), frozenset(range(3, 9)))]
    for S, T in cases:
        a = XiFactor(s1, t1, S)
        b = XiFactor(s2, t2, T)
        expected = dense_inner(dense_xi(S, s1, t1), dense_xi(T, s2, t2))
        assert a.inner(b) == expected


@settings(max_examples=200, deadline=None)
@given(st.frozensets(st.integers(0, 9), max_size=8),
       st.frozensets(st.integers(0, 9), max_size=8),
       st.sampled_from(SIGNS), st.booleans(),
       st.sampled_from(SIGNS), st.booleans())
def test_inner_matches_dense_oracle_random(S, T, s1, t1, s2, t2):
    a = XiFactor(s1, t1, S)
    b = XiFactor(s2, t2, T)
    assert a.inner(b) == dense_inner(dense_xi(S, s1, t1), dense_xi(T, s2, t2))


@settings(max_examples=100, deadline=None)
@given(st.frozensets(st.integers(0, 9), max_size=8),
       st.frozensets(st.integers(0, 9), max_size=8),
       st.sampled_from(SIGNS), st.booleans(),
       st.sampled_from(SIGNS), st.booleans())
def test_inner_is_symmetric(S, T, s1, t1, s2, t2):
    a = XiFactor(s1, t1, S)
    b = XiFactor(s2, t2, T)
    assert a.inner(b) == b.inner(a)


def test_norm_closed_forms():
    for size in range(7):
        S = frozenset(range(size))
        assert XiFactor("+", True, S).norm_sq() == 2 ** size
        assert XiFactor("-", True, S).norm_sq() == 2 ** size
        assert XiFactor("+", False, S).norm_sq() == 2 ** size - 1
        assert XiFactor("-", False, S).norm_sq() == 2 ** size - 1


def test_untilded_kills_empty_set():
    # xi(+/-) subtracts the empty-set coefficient, so it is zero on empty S
    for sign in SIGNS:
        assert XiFactor(sign, False, frozenset()).is_zero()
        assert not XiFactor(sign, True, frozenset()).is_zero()


def test_opposite_tilded_signs_orthogonal_unless_disjoint():
    for S, T in [(frozenset({1, 2}), frozenset({2, 3})),
                 (frozenset({1}), frozenset({1})),
                 (frozenset(range(4)), frozenset(range(2, 6)))]:
        a = XiFactor("+", True, S)
        b = XiFactor("-", True, T)
        if S & T:
            assert a.inner(b) == 0
        else:
            assert a.inner(b) != 0


def test_materialize_agrees_with_symbolic():
    S = frozenset(range(5))
    T = frozenset(range(3, 8))
    for s1, t1 in [("+", True), ("-", False)]:
        for s2, t2 in [("-", True), ("+", False)]:
            a, b = XiFactor(s1, t1, S), XiFactor(s2, t2, T)
            va, vb = a.materialize(10), b.materialize(10)
            assert va.inner(vb) == a.inner(b)


def test_xi_vector_matches_factor():
    S = frozenset({2, 5, 7})
    dense = xi_vector(S, "+", tilde=True)
    fac = XiFactor("+", True, S).materialize(10)
    assert dense.inner(fac) == fac.norm_sq()


def test_xi_inner_detects_intersection():
    # <xi-_T, xi+_S> is the indicator of S and T meeting
    assert xi_inner({1, 2}, {2, 3}) == 1
    assert xi_inner({1, 2}, {3, 4}) == 0
    assert xi_inner(set(), {1}) == 0
    S = frozenset({2, 5, 7})
    sym = XiFactor("-", False, S).inner(XiFactor("+", False, S))
    assert xi_inner(S, S) == sym == 1


def test_delta_empty_unit():
    d = delta_empty()
    assert d.inner(d) == 1


def test_materialize_cap_guards_blowup():
    with pytest.raises(SubsetCapError):
        XiFactor("+", True, frozenset(range(25))).materialize(20)
    # symbolic inner products stay exact far past the cap
    big = XiFactor("+", True, frozenset(range(40)))
    assert big.inner(big) == 2 ** 40


def test_binomial_suite_exhaustive_counts():
    rep = binomial_suite(8)
    assert rep.passed
    assert rep.universe == 8
    assert rep.pairs_checked == (2 ** 8) ** 2
    assert rep.norm_checks == 4 * 2 ** 8
    assert rep.failures == ()


def test_binomial_suite_refuses_large_universe():
    with pytest.raises(SubsetCapError):
        binomial_suite(13)

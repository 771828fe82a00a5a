import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphaprod.errors import (
    DegreeMismatch,
    MalformedCycles,
    MalformedPermutation,
    NotConjugate,
    NotConjugateInA,
    OddPermutation,
)
from alphaprod.perm import (
    Parity,
    Permutation,
    all_permutations,
    alternating_group,
    commutator,
    compose,
    conjugate,
    conjugator_in_A,
    conjugator_in_S,
    cyc,
    decompose,
    format_cycles,
    format_image,
    identity,
    inverse,
    is_even,
    moved_points,
    num_moved,
    parity,
    parity_by_inversions,
    parse,
    product,
    random_even,
    recompose,
)

from conftest import even_perms, perms


def P(text, t):
    return parse(text, t)


# -- construction ----------------------------------------------------------------

def test_rejects_non_bijection():
    with pytest.raises(MalformedPermutation):
        Permutation([0, 0, 1])
    with pytest.raises(MalformedPermutation):
        Permutation([0, 3])


def test_from_cycles_rejects_overlap_and_range():
    with pytest.raises(MalformedCycles):
        cyc((1, 2), (2, 3), t=4)
    with pytest.raises((MalformedCycles, ValueError)):
        cyc((1, 5), t=4)


def test_parse_forms():
    assert P("(1 2)(3 4)", 4) == P("[2,1,4,3]", 4) == Permutation.from_image([2, 1, 4, 3])
    assert P("()", 3) == P("id", 3) == identity(3)
    with pytest.raises(MalformedCycles):
        P("(1 2", 3)
    with pytest.raises(DegreeMismatch):
        P("[2,1]", 3)


def test_format_round_trip():
    a = P("(1 3 4 2 5)", 6)
    assert format_cycles(a) == "(1 3 4 2 5)"
    assert P(format_image(a), 6) == a
    assert format_cycles(identity(4)) == "()"


# -- worked examples----------------------------------------------------------------

def test_compose_left_to_right():
    # (a*b)(i) = b(a(i)): 1->2->3, 2->1->1, 3->3->2
    assert compose(P("(1 2)", 3), P("(2 3)", 3)) == P("(1 3 2)", 3)
    s = P("(1 2 3)", 3)
    assert compose(identity(3), s) == s
    assert compose(s, inverse(s)).is_identity()


def test_inverse_examples():
    assert inverse(P("(1 2 3)", 3)) == P("(1 3 2)", 3)
    assert inverse(identity(4)).is_identity()
    assert inverse(P("(1 2)(3 4)", 4)) == P("(1 2)(3 4)", 4)


def test_decompose_examples():
    assert decompose(Permutation.from_image([2, 1, 4, 3])).cycles == ((1, 2), (3, 4))
    assert decompose(identity(5)).cycles == ()
    assert recompose(decompose(P("(1 3 4 2 5)", 5))).image == (3, 5, 4, 2, 1)


def test_decompose_canonical_form():
    d = decompose(P("(4 2)(5 3 1)", 6))
    assert d.cycles == ((1, 5, 3), (2, 4))
    assert d.cycle_type == (2, 3)
    assert d.full_cycle_type == (1, 2, 3)


def test_parity_examples():
    assert parity(P("(1 2)", 2)) is Parity.ODD
    assert parity(P("(1 2 3 4)", 4)) is Parity.ODD
    assert parity(P("(1 2)(3 4)", 4)) is Parity.EVEN


def test_commutator_examples():
    assert commutator(P("(1 2)(3 4)", 4), P("(1 2 3)", 4)) == P("(1 4)(2 3)", 4)
    s = P("(1 2 3 4 5)", 5)
    assert commutator(s, identity(5)).is_identity()
    assert commutator(P("(1 2)(3 4)", 8), P("(1 5)(2 6)(3 7)(4 8)", 8)) == P("(1 2)(3 4)(5 6)(7 8)", 8)


def test_conjugate_examples():
    assert conjugate(P("(1 2 3)", 4), P("(1 4)", 4)) == P("(4 2 3)", 4)
    s = P("(1 2 3)", 4)
    assert conjugate(s, identity(4)) == s
    assert conjugate(P("(1 2)(3 4)", 4), P("(1 3)(2 4)", 4)) == P("(1 2)(3 4)", 4)


def test_moved_points_examples():
    assert num_moved(P("(1 2 3)", 5)) == 3
    assert num_moved(identity(5)) == 0
    assert num_moved(P("(1 2 3 4 5 6 7)", 7)) == 7
    assert moved_points(P("(2 4)", 5)) == frozenset({2, 4})


def test_conjugator_in_S_examples():
    a, b = P("(1 2 3)", 4), P("(2 3 4)", 4)
    assert conjugate(a, conjugator_in_S(a, b)) == b
    assert conjugator_in_S(P("(1 2)", 3), P("(1 2)", 3)).is_identity()
    with pytest.raises(NotConjugate):
        conjugator_in_S(P("(1 2)", 3), P("(1 2 3)", 3))


def test_conjugator_in_A_examples():
    with pytest.raises(NotConjugateInA):
        conjugator_in_A(P("(1 2 3 4 5)", 5), P("(1 2 3 5 4)", 5))
    assert conjugator_in_A(P("(1 2 3)", 3), P("(1 2 3)", 3)).is_identity()
    a, b = P("(1 2)(3 4)", 4), P("(1 3)(2 4)", 4)
    g = conjugator_in_A(a, b)
    assert is_even(g) and conjugate(a, g) == b
    with pytest.raises(OddPermutation):
        conjugator_in_A(P("(1 2)", 4), P("(3 4)", 4))


def test_random_even_examples(rng):
    draws = [random_even(3, rng) for _ in range(30_000)]
    assert all(is_even(d) for d in draws)
    counts = np.array([sum(d == g for d in draws) for g in alternating_group(3)])
    from scipy import stats

    assert stats.chisquare(counts).pvalue > 0.01
    a = random_even(9, np.random.default_rng(7))
    assert a == random_even(9, np.random.default_rng(7))


# -- invariants ---------------------------------------------------------------------

def test_parity_algorithms_agree_on_S5():
    for p in all_permutations(5):
        assert parity(p) is parity_by_inversions(p)


def test_group_sizes():
    assert len(list(all_permutations(4))) == 24
    assert len(alternating_group(5)) == 60


def test_relabel_law_t10(rng):
    t = 10
    for _ in range(1000):
        a = Permutation(rng.permutation(t).tolist())
        g = Permutation(rng.permutation(t).tolist())
        want = Permutation.from_cycles([[g(p) for p in c] for c in decompose(a).cycles], t)
        assert conjugate(a, g) == want


def test_moved_points_bound_exhaustive_A5():
    group = alternating_group(5)
    for a in group:
        for g in group:
            assert num_moved(commutator(a, g)) <= 2 * num_moved(a)


def test_moved_points_bound_random_t12(rng):
    for _ in range(1000):
        a, g = random_even(12, rng), random_even(12, rng)
        assert num_moved(commutator(a, g)) <= 2 * num_moved(a)


def test_class_split_at_5():
    a, b = P("(1 2 3 4 5)", 5), P("(1 2 3 5 4)", 5)
    witnesses = [g for g in all_permutations(5) if conjugate(a, g) == b]
    assert witnesses and not any(is_even(g) for g in witnesses)


def test_conjugator_in_A_matches_exhaustive_search_A4():
    group = alternating_group(4)
    for a in group:
        for b in group:
            exists = any(conjugate(a, g) == b for g in group)
            try:
                g = conjugator_in_A(a, b)
            except NotConjugate:
                assert not exists
            else:
                assert exists and is_even(g) and conjugate(a, g) == b


@given(perms(7), perms(7), perms(7))
def test_associativity(a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(perms(7))
def test_inverse_law(a):
    assert compose(a, inverse(a)).is_identity() and compose(inverse(a), a).is_identity()


@given(perms(8))
def test_decompose_round_trip(a):
    assert recompose(decompose(a)) == a
    assert P(format_cycles(a), 8) == a


@given(perms(7), perms(7))
def test_parity_is_homomorphism(a, b):
    assert parity(compose(a, b)) is parity(a) * parity(b)


@given(perms(8), perms(8))
def test_commutator_definition(a, g):
    assert commutator(a, g) == product([a, g, inverse(a), inverse(g)])
    assert commutator(identity(8), g).is_identity()


@given(even_perms(8), even_perms(8))
@settings(max_examples=200)
def test_conjugator_witnesses(a, g):
    b = conjugate(a, g)
    assert conjugate(a, conjugator_in_S(a, b)) == b
    w = conjugator_in_A(a, b)
    assert is_even(w) and conjugate(a, w) == b


@given(perms(6), st.integers(-5, 5))
def test_powers(a, k):
    want = identity(6)
    base = a if k >= 0 else inverse(a)
    for _ in range(abs(k)):
        want = compose(want, base)
    assert a ** k == want


def test_extend_and_degree_checks():
    a = P("(1 2 3)", 3).extend(5)
    assert a.degree == 5 and a(4) == 4
    with pytest.raises(DegreeMismatch):
        compose(P("(1 2)", 2), P("(1 2)", 3))


def test_call_is_one_based():
    a = P("(1 3 2)", 3)
    assert [a(i) for i in (1, 2, 3)] == [3, 1, 2]


def test_exhaustive_pairs_small():
    # compose against pointwise definition on S_3
    for a, b in itertools.product(all_permutations(3), repeat=2):
        c = compose(a, b)
        assert all(c(i) == b(a(i)) for i in range(1, 4))

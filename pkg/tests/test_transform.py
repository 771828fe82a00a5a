import math

import numpy as np
import pytest
from hypothesis import given, settings

from alphaprod.errors import (
    BadSourceShape,
    BadTargetShape,
    DegreeMismatch,
    DegreeNotTwoModFour,
    IdentityInput,
    NotTranspositionProduct,
    OddGamma,
    OddPermutation,
    TargetTooLarge,
    UnsupportedTarget,
)
from alphaprod.perm import (
    alternating_group,
    commutator,
    compose,
    cycle_type,
    decompose,
    identity,
    is_even,
    parse,
)
from alphaprod.transform import (
    C_SCRIPT,
    COMM,
    CONJ,
    TransformScript,
    TransformStep,
    apply_script,
    build_even_cycle_pair,
    build_odd_cycle,
    comm_budget,
    comm_count,
    convert,
    embed_degree,
    grow_transpositions,
    target_kind,
    to_double_transposition,
)
from alphaprod.verify import identity_suite, random_convert_target, random_nonidentity_even

from conftest import nonid_even_perms


def P(text, t):
    return parse(text, t)


def steps_of(script):
    return [(s.kind, s.gamma) for s in script.steps]


# -- steps and scripts ---------------------------------------------------------------

def test_step_rejects_odd_gamma():
    with pytest.raises(OddGamma):
        TransformStep(COMM, P("(1 2)", 4))
    with pytest.raises(ValueError):
        TransformStep("swap", P("(1 2 3)", 4))


def test_apply_script_examples():
    a = P("(1 2)(3 4)", 6)
    assert apply_script(a, [TransformStep(COMM, P("(1 2 3)", 6))]) == P("(1 4)(2 3)", 6)
    assert apply_script(a, []) == a
    steps = [TransformStep(COMM, P("(1 2 3)", 6)), TransformStep(CONJ, P("(1 5)(2 6)", 6))]
    assert apply_script(identity(6), steps).is_identity()


def test_apply_script_degree_check():
    with pytest.raises(DegreeMismatch):
        apply_script(P("(1 2 3)", 6), [TransformStep(COMM, P("(1 2 3)", 5))])


def test_script_text_round_trip(rng):
    a = random_nonidentity_even(10, rng)
    s = convert(a, P("(1 2 3 4 5 6 7)", 10))
    back = TransformScript.loads(s.dumps())
    assert back == s
    assert apply_script(a, back) == s.target


# -- identities --------------------------------------------------------------------

def test_identity_suite_clean():
    assert identity_suite() == []


def test_even_pair_2_4_product():
    # alpha * pi for alpha=(1 2)(3 4), pi=(3 5)(4 6)
    assert compose(P("(1 2)(3 4)", 6), P("(3 5)(4 6)", 6)) == P("(1 2)(3 6 4 5)", 6)


# -- to_double_transposition --------------------------------------------------------

@pytest.mark.parametrize(
    "a, first, mid",
    [
        ("(1 2 3)", "(1 2)(3 4)", "(1 4)(2 3)"),
        ("(1 2 3 4)(5 6)", "(1 2)(3 4)", "(1 3)(2 4)"),
        ("(1 2 3 4 5)", "(2 3 4)", "(1 4 3)"),
    ],
)
def test_first_step_examples(a, first, mid):
    s = to_double_transposition(P(a, 6))
    assert s.steps[0].kind == COMM and s.steps[0].gamma == P(first, 6)
    assert s.steps[0](P(a, 6)) == P(mid, 6)
    assert cycle_type(s.target) == (2, 2)


def test_five_cycle_then_three_cycle_case():
    s = to_double_transposition(P("(1 2 3 4 5)", 6))
    assert s.steps[1].tag == "3-cycle"


def test_to_double_exhaustive_A6():
    n = 0
    for a in alternating_group(6):
        if a.is_identity():
            continue
        s = to_double_transposition(a)
        assert cycle_type(s.target) == (2, 2)
        assert s.comm_count == 2 and len(s) == 2
        n += 1
    assert n == 359


def test_to_double_rejects():
    with pytest.raises(IdentityInput):
        to_double_transposition(identity(6))
    with pytest.raises(OddPermutation):
        to_double_transposition(P("(1 2)", 6))


# -- grow_transpositions --------------------------------------------------------------

def test_grow_doubling_example():
    s = grow_transpositions(P("(1 2)(3 4)", 8), 4)
    assert steps_of(s) == [(COMM, P("(1 5)(2 6)(3 7)(4 8)", 8))]
    assert s.target == P("(1 2)(3 4)(5 6)(7 8)", 8)


def test_grow_noop():
    assert len(grow_transpositions(P("(1 2)(3 4)", 8), 2)) == 0


def test_grow_non_power_of_two():
    s = grow_transpositions(P("(1 2)(3 4)", 14), 6)
    assert len(s) == 2
    assert cycle_type(s.target) == (2,) * 6


def test_grow_fresh_points_are_smallest():
    s = grow_transpositions(P("(3 4)(7 8)", 10), 4)
    assert s.target == P("(1 2)(3 4)(5 6)(7 8)", 10)


@pytest.mark.parametrize("t", [10, 14, 18, 22])
def test_grow_counts(t, rng):
    for k in range(2, t // 2 + 1, 2):
        s = grow_transpositions(P("(1 2)(3 4)", t), k)
        assert cycle_type(s.target) == (2,) * k
        assert s.comm_count == math.ceil(math.log2(k / 2))


def test_grow_rejects():
    with pytest.raises(NotTranspositionProduct):
        grow_transpositions(P("(1 2 3)", 10), 4)
    with pytest.raises(BadTargetShape):
        grow_transpositions(P("(1 2)(3 4)", 10), 3)
    with pytest.raises(TargetTooLarge):
        grow_transpositions(P("(1 2)(3 4)", 10), 6)


# -- build_odd_cycle ----------------------------------------------------------------

def test_odd_cycle_five_example():
    s = build_odd_cycle(P("(1 2)(3 4)", 6), P("(1 3 4 2 5)", 6))
    assert steps_of(s) == [(CONJ, identity(6)), (COMM, P("(1 2 3 4 5)", 6))]
    assert s.target == P("(1 3 4 2 5)", 6)


def test_odd_cycle_all_five_cycles_t6():
    group = alternating_group(6)
    dts = [g for g in group if cycle_type(g) == (2, 2)]
    fives = [g for g in group if cycle_type(g) == (5,)]
    for a in dts:
        for b in fives:
            assert apply_script(a, build_odd_cycle(a, b)) == b


def test_odd_cycle_seven_at_t10(rng):
    a = P("(1 2)(3 4)", 10)
    for _ in range(50):
        pts = [int(p) + 1 for p in rng.permutation(10)[:7]]
        beta = P("(" + " ".join(map(str, pts)) + ")", 10)
        s = build_odd_cycle(a, beta)
        assert len(s) == 3 and s.target == beta


def test_odd_cycle_both_count_branches():
    # k=9: (k-1)/2 = 4 even; k=7: (k-3)/2 = 2 even
    a4 = P("(1 2)(3 4)(5 6)(7 8)", 10)
    assert len(build_odd_cycle(a4, P("(2 4 6 8 10 1 3 5 7)", 10))) == 2
    a2 = P("(1 2)(3 4)", 10)
    assert len(build_odd_cycle(a2, P("(2 4 6 8 10 1 3)", 10))) == 3


def test_odd_cycle_rejects():
    with pytest.raises(BadTargetShape):
        build_odd_cycle(P("(1 2)(3 4)", 6), P("(1 2 3)", 6))
    with pytest.raises(BadSourceShape):
        build_odd_cycle(P("(1 2)(3 4)(5 6)(7 8)", 10), P("(1 2 3 4 5)", 10))


# -- build_even_cycle_pair ------------------------------------------------------------

def test_even_pair_two_two():
    s = build_even_cycle_pair(P("(1 2)(3 4)", 6), P("(1 2)(3 4)", 6))
    assert steps_of(s) == [(CONJ, identity(6))]


def test_even_pair_two_four():
    beta = P("(1 2)(3 6 4 5)", 6)
    s = build_even_cycle_pair(P("(1 2)(3 4)", 6), beta)
    assert s.steps[0](P("(1 2)(3 4)", 6)) == beta
    assert s.target == beta


def test_even_pair_four_four_t10(rng):
    beta = P("(1 2 3 4)(5 6 7 8)", 10)
    for _ in range(30):
        pts = [int(p) + 1 for p in rng.permutation(10)[:8]]
        a = P("".join(f"({pts[i]} {pts[i + 1]})" for i in range(0, 8, 2)), 10)
        s = build_even_cycle_pair(a, beta)
        assert len(s) == 2 and apply_script(a, s) == beta


@pytest.mark.parametrize("t", [10, 14, 18])
def test_even_pair_all_shapes(t):
    for k1 in range(2, t, 2):
        for k2 in range(k1, t - k1 + 1, 2):
            beta = P(
                "(" + " ".join(map(str, range(1, k1 + 1))) + ")(" + " ".join(map(str, range(k1 + 1, k1 + k2 + 1))) + ")",
                t,
            )
            a = P("(1 2)(3 4)", t)
            s = convert(a, beta)
            assert s.target == beta


# -- convert ------------------------------------------------------------------------

def test_convert_three_to_five():
    s = convert(P("(1 2 3)", 6), P("(1 2 3 4 5)", 6))
    assert apply_script(P("(1 2 3)", 6), s) == P("(1 2 3 4 5)", 6)


def test_convert_to_three_cycle_goes_through_five_cycle():
    s = convert(P("(1 2)(3 4)", 6), P("(1 2 3)", 6))
    tags = s.step_tags
    assert "shrink to 3-cycle" in tags
    shrink = [st for st in s.steps if st.tag == "shrink to 3-cycle"][0]
    assert shrink.gamma == P("(2 3 4)", 6)
    assert s.steps[-1].kind == CONJ and s.target == P("(1 2 3)", 6)


def test_convert_rejects():
    with pytest.raises(IdentityInput):
        convert(identity(6), P("(1 2 3)", 6))
    with pytest.raises(DegreeNotTwoModFour):
        convert(P("(1 2 3)", 8), P("(1 2 3 4 5)", 8))
    with pytest.raises(UnsupportedTarget):
        convert(P("(1 2 3)", 10), P("(1 2 3)(4 5 6)", 10))
    with pytest.raises(OddPermutation):
        convert(P("(1 2)", 6), P("(1 2 3)", 6))


def test_target_kind():
    assert target_kind(P("(1 2 3)", 6)) == "3-cycle"
    assert target_kind(P("(1 2 3 4 5)", 6)) == "odd"
    assert target_kind(P("(1 2)(3 4 5 6)", 6)) == "even-pair"
    assert target_kind(P("(1 2)(3 4)(5 6)", 6)) == "unsupported"


@pytest.mark.parametrize("t", [6, 10])
def test_convert_contract_random(t, rng):
    for _ in range(500):
        a = random_nonidentity_even(t, rng)
        beta = random_convert_target(t, rng)
        s = convert(a, beta)
        assert apply_script(a, s) == beta
        assert comm_count(s.steps) <= comm_budget(t)
        assert all(is_even(st.gamma) for st in s.steps)
        assert apply_script(identity(t), s).is_identity()


@given(nonid_even_perms(14))
@settings(max_examples=100, deadline=None)
def test_convert_property_t14(a):
    rng = np.random.default_rng(hash(a) & 0xFFFF)
    beta = random_convert_target(14, rng)
    assert apply_script(a, convert(a, beta)) == beta


def test_budget_constant():
    assert C_SCRIPT == 1
    assert comm_budget(6) == 4 and comm_budget(10) == 5


def test_embed_degree():
    assert [embed_degree(t) for t in (5, 6, 7, 8, 9)] == [6, 6, 10, 10, 10]


def test_disjoint_support_factoring(rng):
    t = 14
    a1, g1 = P("(1 2)(3 4)", t), P("(1 5)(2 6)(3 7)", t)  # confined to 1..7
    a2, g2 = P("(8 9 10)", t), P("(8 9)(10 11)", t)  # confined to 8..14
    lhs = commutator(compose(a1, a2), compose(g1, g2))
    assert lhs == compose(commutator(a1, g1), commutator(a2, g2))
    assert decompose(lhs).cycles

import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from alphaprod import leakage as lk
from alphaprod.errors import BudgetExceeded, LengthMismatch, OddPermutation, OutputTooWide
from alphaprod.perm import (
    alternating_group,
    compose,
    identity,
    inverse,
    is_even,
    parity_by_inversions,
    parse,
    product,
)
from alphaprod.vectors import ProductVector

from conftest import perms, vectors


def P(text, t):
    return parse(text, t)


ALPHA4 = P("(1 2)(3 4)", 4)


# -- batch ops agree with scalar ones -----------------------------------------------

@given(st.lists(perms(6), min_size=2, max_size=2))
def test_batch_ops_match_scalar(ps):
    a, b = ps
    A, B = np.array([a.array]), np.array([b.array])
    assert tuple(lk.compose_batch(A, B)[0]) == compose(a, b).array
    assert tuple(lk.inverse_batch(A)[0]) == inverse(a).array
    assert lk.parity_batch(A)[0] == parity_by_inversions(a).value


@given(vectors(5, 4))
def test_fold_batch_matches(v):
    assert tuple(lk.fold_batch(lk.vector_to_array(v)[None])[0]) == v.fold().array


def test_lehmer_rank_is_bijection():
    from alphaprod.perm import all_permutations

    arr = np.array([p.array for p in all_permutations(5)])
    assert sorted(lk.lehmer_rank_batch(arr).tolist()) == list(range(120))


def test_random_even_batch_uniform(rng):
    z = lk.random_even_batch(rng, (60_000,), 4)
    assert not lk.parity_batch(z).any()
    index = {g.array: i for i, g in enumerate(alternating_group(4))}
    counts = np.bincount([index[tuple(r)] for r in z.tolist()], minlength=12)
    assert stats.chisquare(counts).pvalue > 0.01


# -- rerandomize / sample_class ----------------------------------------------------

def test_rerandomize_identity_randomizers(rng):
    x = lk.sample_class(P("(1 2 3)", 5), rng=rng)
    assert lk.rerandomize(x, rs=[identity(5)] * 4) == x


@given(vectors(5, 5), st.integers(0, 2**32 - 1))
def test_rerandomize_keeps_fold(x, seed):
    assert lk.rerandomize(x, np.random.default_rng(seed)).fold() == x.fold()


def class_vectors(alpha):
    group = alternating_group(alpha.degree)
    for prefix in itertools.product(group, repeat=alpha.degree - 1):
        yield tuple(prefix) + (compose(inverse(product(prefix)), alpha),)


@pytest.mark.parametrize("alpha", [identity(3), P("(1 2 3)", 3)])
def test_rerandomize_bijection_t3(alpha):
    group = alternating_group(3)
    cls = set(class_vectors(alpha))
    assert len(cls) == 9
    for x in cls:
        outs = [lk.rerandomize(ProductVector.of(x), rs=rs).elements for rs in itertools.product(group, repeat=2)]
        assert Counter(outs) == Counter(cls)


def test_rerandomize_bijection_t3_over_A4():
    # vectors of length 3 over A_4: 144 randomizer pairs
    group = alternating_group(4)
    x = ProductVector.of([ALPHA4, identity(4), identity(4)])
    outs = {lk.rerandomize(x, rs=rs).elements for rs in itertools.product(group, repeat=2)}
    assert len(outs) == 144


def test_rerandomize_rejects():
    with pytest.raises(LengthMismatch):
        lk.rerandomize(ProductVector.of([ALPHA4]))
    with pytest.raises(LengthMismatch):
        lk.rerandomize(ProductVector.of([ALPHA4] * 3), rs=[identity(4)])


def test_sample_class_fold_and_parity(rng):
    alpha = P("(1 2 3 4 5)", 7)
    for _ in range(200):
        v = lk.sample_class(alpha, rng=rng)
        assert v.fold() == alpha and v.is_even() and len(v) == 7
    with pytest.raises(OddPermutation):
        lk.sample_class(P("(1 2)", 4))


def test_sample_class_uniform_t3(rng):
    alpha = identity(3)
    index = {v: i for i, v in enumerate(class_vectors(alpha))}
    counts = np.zeros(9, dtype=int)
    for _ in range(20_000):
        counts[index[lk.sample_class(alpha, rng=rng).elements]] += 1
    assert stats.chisquare(counts).pvalue > 0.01


def test_sample_class_batch_uniform_t3():
    z = lk.sample_class_batch(identity(3), 100_000, np.random.default_rng(3))
    group = {g.array: i for i, g in enumerate(alternating_group(3))}
    keys = [group[tuple(r[0])] * 3 + group[tuple(r[1])] for r in z.tolist()]
    assert stats.chisquare(np.bincount(keys, minlength=9)).pvalue > 0.01


def test_marginals_uniform_t4(rng):
    n = 60_000
    for alpha in (identity(4), ALPHA4):
        z = lk.sample_class_batch(alpha, n, rng)
        for i in range(4):
            counts = np.bincount(lk.lehmer_rank_batch(z[:, i, :]), minlength=24)
            even = counts[counts > 0]
            assert len(even) == 12
            sigma = np.sqrt(n * (1 / 12) * (11 / 12))
            assert np.all(np.abs(even - n / 12) < 4 * sigma)


# -- leakage functions and exact distance ---------------------------------------

def test_exact_examples_t4():
    assert lk.tvd_exact(lk.coordinate_leakage(1, 4), ALPHA4) == 0
    assert lk.tvd_exact(lk.fold_indicator(ALPHA4), ALPHA4) == 1
    assert lk.tvd_exact(lk.point_image_leakage(1, 4), ALPHA4) == 1
    assert isinstance(lk.tvd_exact(lk.constant_leakage(), ALPHA4), Fraction)


def test_exact_identity_class_is_zero():
    for desc in ("coord:2", "fold", "image:3", "firstbits:4", "const:1"):
        leak = lk.make_leakage(desc, 4, identity(4))
        assert lk.tvd_exact(leak, identity(4)) == 0


def test_exact_marginals_all_coordinates_t4():
    for alpha in alternating_group(4):
        for i in range(1, 5):
            assert lk.tvd_exact(lk.coordinate_leakage(i, 4), alpha) == 0


def test_exact_budget():
    with pytest.raises(BudgetExceeded):
        lk.tvd_exact(lk.constant_leakage(), P("(1 2 3)", 6))


def test_batch_codes_match_evaluator(rng):
    z = lk.sample_class_batch(ALPHA4, 50, rng)
    for desc in ("coord:1", "fold", "image:2", "firstbits:4", "const:1"):
        leak = lk.make_leakage(desc, 4, ALPHA4)
        got = leak.batch_codes(z)
        want = [int(leak(lk.array_to_vector(r)), 2) for r in z]
        assert got.tolist() == want


def test_custom_evaluator_without_batch():
    leak = lk.LeakageFunction("x1-even", 1, lambda v: str(int(is_even(v[0]))))
    assert lk.tvd_exact(leak, ALPHA4) == 0


def test_make_leakage_unknown():
    with pytest.raises(ValueError):
        lk.make_leakage("nope", 4)


# -- Monte Carlo ------------------------------------------------------------------

def test_mc_examples_t6():
    alpha = P("(1 2)(3 4)", 6)
    est = lk.tvd_monte_carlo(lk.coordinate_leakage(1, 6), alpha, n=100_000, rng=1)
    assert est.estimate <= est.radius
    est = lk.tvd_monte_carlo(lk.fold_indicator(alpha), alpha, n=100_000, rng=2)
    assert est.estimate >= 1 - est.radius


def test_mc_deterministic_per_seed_and_workers():
    leak = lk.first_bits_leakage(4)
    a = lk.tvd_monte_carlo(leak, ALPHA4, n=5000, rng=9, workers=3)
    b = lk.tvd_monte_carlo(leak, ALPHA4, n=5000, rng=9, workers=3)
    assert a.estimate == b.estimate


def test_mc_radius_slope():
    ns = np.array([1e3, 1e4, 1e5])
    radii = [lk.tvd_radius(4, int(n), 0.01) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(radii), 1)[0]
    assert abs(slope + 0.5) <= 0.1


def test_mc_error_shrinks():
    leak = lk.first_bits_leakage(4)
    exact = float(lk.tvd_exact(leak, ALPHA4))
    errs = [abs(lk.tvd_monte_carlo(leak, ALPHA4, n=n, rng=5).estimate - exact) for n in (1000, 100_000)]
    assert errs[1] < errs[0] or errs[1] < 0.01


def test_first_bits_needs_length():
    with pytest.raises(LengthMismatch):
        lk.tvd_monte_carlo(lk.first_bits_leakage(5), ALPHA4, n=10)


def test_mc_too_wide():
    with pytest.raises(OutputTooWide):
        lk.tvd_monte_carlo(lk.first_bits_leakage(30), ALPHA4, n=10)


def test_report(tmp_path):
    path = tmp_path / "r.csv"
    lk.write_report([{"leakage": "fold", "seed": 4}], path)
    text = path.read_text()
    assert text.splitlines()[0].split(",") == lk.REPORT_FIELDS
    assert ",4," in text


# -- amplifier --------------------------------------------------------------------

def test_amplifier_params():
    p = lk.AmplifierParams(k=1, m=100, eps_alpha=0.5, t=6)
    assert p.slack == pytest.approx(1 / 12)
    assert p.low < 50 < p.high
    with pytest.raises(ValueError):
        lk.AmplifierParams(k=1, m=100, eps_alpha=0, t=6)
    assert lk.theoretical_sample_count(6, 1, 0.5) == 2 * 6 ** 6


def test_amplifier_gap_one():
    alpha = P("(1 2)(3 4)", 6)
    c = lk.fold_indicator(alpha)
    p = lk.AmplifierParams(k=1, m=100, eps_alpha=1.0, t=6)
    assert lk.amplifier_error_rate(alpha, c, p, 100, rng=0) == 0


def test_amplifier_constant_zero():
    alpha = P("(1 2)(3 4)", 6)
    p = lk.AmplifierParams(k=1, m=50, eps_alpha=0.4, t=6)
    x = lk.sample_class(alpha, rng=0)
    assert lk.amplifier_count(x, lk.constant_leakage(0), 50, 0) == 0
    assert lk.amplifier_decide(x, lk.constant_leakage(0), p, 0) == "id"


def test_planted_probabilities_exact_t6():
    alpha = P("(1 2)(3 4)", 6)
    c = lk.planted_distinguisher(alpha, 0.6, 0.3)
    # the coin is a function of one uniform coordinate, so exact rates follow from A_6
    z = lk.sample_class_batch(alpha, 200_000, np.random.default_rng(0))
    assert c.batch_codes(z).mean() == pytest.approx(0.6, abs=0.01)
    z = lk.sample_class_batch(identity(6), 200_000, np.random.default_rng(1))
    assert c.batch_codes(z).mean() == pytest.approx(0.3, abs=0.01)


def test_amplifier_monotone():
    alpha = P("(1 2)(3 4)", 6)
    c = lk.planted_distinguisher(alpha, 0.6, 0.3)
    rates = [
        lk.amplifier_error_rate(alpha, c, lk.AmplifierParams(1, m, 0.6, 6), 300, rng=m)
        for m in (10, 100, 1000)
    ]
    assert rates[0] > rates[1] > rates[2]

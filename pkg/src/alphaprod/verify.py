"""Cross-module invariant suite.

Every check returns a :class:`CheckResult`; ``run_all`` is what the ``verify``
CLI command and the acceptance tests call.  Sizes and tolerances are fixed
here, not tuned per run.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from . import bp as bpmod
from . import leakage as lk
from . import reductions as red
from .perm import (
    Permutation,
    all_permutations,
    alternating_group,
    commutator,
    compose,
    cyc,
    cycle_type,
    identity,
    inverse,
    is_even,
    num_moved,
    product,
    random_even,
)
from .transform import (
    C_SCRIPT,
    apply_script,
    comm_budget,
    convert,
    to_double_transposition,
)
from .vectors import C_LEN, ProductVector, build_alpha_to_beta


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float

    @property
    def within_time(self) -> bool:
        return self.seconds < self.limit

    def line(self) -> str:
        status = "PASS" if self.passed and self.within_time else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f}s < {self.limit:g}s)"


def random_vector_with_fold(g: Permutation, length: int, rng: np.random.Generator) -> ProductVector:
    t = g.degree
    xs = [random_even(t, rng) for _ in range(length - 1)]
    xs.append(compose(inverse(product(xs, t)), g))
    return ProductVector.of(xs)


def random_convert_target(t: int, rng: np.random.Generator) -> Permutation:
    """A uniformly chosen shape (odd cycle / even pair / 3-cycle) on random points."""
    pts = [int(p) + 1 for p in rng.permutation(t)]
    kind = int(rng.integers(3))
    if kind == 0:
        k = int(rng.choice(range(5, t, 2)))
        return Permutation.from_cycles([pts[:k]], t)
    if kind == 1:
        k1 = int(rng.choice(range(2, t - 1, 2)))
        k2 = int(rng.choice(range(2, t - k1 + 1, 2)))
        return Permutation.from_cycles([pts[:k1], pts[k1:k1 + k2]], t)
    return Permutation.from_cycles([pts[:3]], t)


def random_nonidentity_even(t: int, rng: np.random.Generator) -> Permutation:
    while True:
        a = random_even(t, rng)
        if not a.is_identity():
            return a


# -- 1 -----------------------------------------------------------------------------

def identity_suite(t: int = 12, relabelings: int = 25, seed: int = 0) -> list[str]:
    """Failures among the explicit commutator identities, for random point labels."""
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(relabelings + 1):
        pts = list(range(1, t + 1)) if trial == 0 else [int(p) + 1 for p in rng.permutation(t)]
        a, b, c, d, e, f, g, h = pts[:8]

        def C(*cycles):
            return Permutation.from_cycles(cycles, t)

        checks = {
            "pad [(a b)(c d),(a b c)]": (commutator(C((a, b), (c, d)), C((a, b, c))), C((a, d), (b, c))),
            "case 2 [(a b c),(a b)(c d)]": (commutator(C((a, b, c)), C((a, b), (c, d))), C((a, d), (b, c))),
            "case 3 [(a b c)(d e f),(a d)(c f)]": (
                commutator(C((a, b, c), (d, e, f)), C((a, d), (c, f))),
                C((a, d), (b, e)),
            ),
            "case 4 [(a b c d),(a b)(c d)]": (commutator(C((a, b, c, d)), C((a, b), (c, d))), C((a, c), (b, d))),
            "case 5 [(a1..a5),(a2 a3 a4)]": (commutator(C((a, b, c, d, e)), C((b, c, d))), C((a, d, c))),
            "doubling": (
                commutator(C((a, b), (c, d)), C((a, e), (b, f), (c, g), (d, h))),
                C((a, b), (c, d), (e, f), (g, h)),
            ),
            "(a b)(c d)(c e)(d f)": (compose(C((a, b), (c, d)), C((c, e), (d, f))), C((a, b), (c, f, d, e))),
        }
        for kp in (1, 2, 3, 4, 5):
            if 2 * kp + 1 > t:
                continue
            A, B, cc = pts[:kp], pts[kp:2 * kp], pts[2 * kp]
            alpha = C(*zip(A, B))
            gamma = C([p for pair in zip(A, B) for p in pair] + [cc])
            checks[f"odd cycle k'={kp}"] = (commutator(alpha, gamma), C(A + B[::-1] + [cc]))
        for name, (got, want) in checks.items():
            if got != want:
                failures.append(f"{name} (labels {pts[:8]}): got {got}, want {want}")
    return failures


def check_identities() -> tuple[bool, str]:
    fails = identity_suite()
    return not fails, "all identities hold" if not fails else "; ".join(fails[:3])


# -- 2 -----------------------------------------------------------------------------

def check_to_double_exhaustive() -> tuple[bool, str]:
    n = bad = 0
    for a in alternating_group(6):
        if a.is_identity():
            continue
        n += 1
        s = to_double_transposition(a)
        bad += s.target.degree != 6 or not _is_dt(s.target) or s.comm_count != 2
    return bad == 0 and n == 359, f"{n - bad}/{n} elements of A_6\\{{id}} reach a double transposition in 2 commutators"


def _is_dt(p: Permutation) -> bool:
    return cycle_type(p) == (2, 2)


# -- 3 -----------------------------------------------------------------------------

def check_convert(pairs: int = 500, seed: int = 3) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    bad = worst = 0
    for t in (6, 10):
        for _ in range(pairs):
            a = random_nonidentity_even(t, rng)
            beta = random_convert_target(t, rng)
            s = convert(a, beta)
            over = s.comm_count - math.ceil(math.log2(t))
            worst = max(worst, over)
            bad += apply_script(a, s) != beta or s.comm_count > comm_budget(t)
    return bad == 0, f"{2 * pairs - bad}/{2 * pairs} exact; worst comm excess {worst} <= C_SCRIPT={C_SCRIPT}"


# -- 4 -----------------------------------------------------------------------------

def check_localmap(pairs: int = 100, vectors: int = 20, seed: int = 4) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    bad = 0
    worst_ratio = 0.0
    for t in (6, 10):
        m = t
        ident = identity(t)
        for _ in range(pairs):
            alpha = random_nonidentity_even(t, rng)
            beta = random_nonidentity_even(t, rng)
            f = build_alpha_to_beta(alpha, beta, m)
            worst_ratio = max(worst_ratio, f.output_length / (t * m))
            bad += f.output_length > C_LEN * t * m
            for _ in range(vectors):
                for g, want in ((alpha, beta), (ident, ident)):
                    x = random_vector_with_fold(g, m, rng)
                    y = f(x)
                    bad += y.fold() != want or len(y) != f.output_length or not y.is_one_local()
            # flipping one input only touches outputs tagged with that index
            x = random_vector_with_fold(alpha, m, rng)
            j = int(rng.integers(m))
            els = list(x.elements)
            els[j] = random_even(t, rng)
            y0, y1 = f(x), f(ProductVector.of(els))
            bad += any(a != b and p != j for a, b, p in zip(y0.elements, y1.elements, y0.provenance))
    total = 2 * pairs
    return bad == 0, f"{total} maps, {bad} violations; max length ratio {worst_ratio:.2f} <= C_LEN={C_LEN}"


# -- 5 -----------------------------------------------------------------------------

def check_moved_points() -> tuple[bool, str]:
    group = alternating_group(5)
    bad = sum(num_moved(commutator(a, g)) > 2 * num_moved(a) for a in group for g in group)
    return bad == 0, f"{len(group) ** 2} pairs, {bad} violations"


# -- 6 -----------------------------------------------------------------------------

def check_bp_encoding(programs: int = 500, seed: int = 6) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    bad = cases = accepted = 0
    for _ in range(programs):
        size = int(rng.integers(3, 31))
        B = bpmod.random_program(rng, size, 8, reject_sinks=int(rng.integers(1, 4)) if size > 5 else 1)
        for x in itertools.product((0, 1), repeat=8):
            inst = bpmod.encode(B, x)
            want = bpmod.eval_bp(B, x)
            accepted += want
            cases += 1
            bad += inst.accepts() != want or inst.degree > 2 * (size + 2)
    return bad == 0, f"{cases} (B, x) cases ({accepted} accepting), {bad} disagreements"


# -- 7 -----------------------------------------------------------------------------

def check_id_chain(programs: int = 200, seed: int = 7) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    bad = accepted = 0
    for _ in range(programs):
        size = int(rng.integers(3, 31))
        n = int(rng.integers(1, 9))
        B = bpmod.random_program(rng, size, n)
        x = "".join(str(int(b)) for b in rng.integers(0, 2, n))
        vecs = red.bp_to_id_instances(B, x)
        want = bpmod.eval_bp(B, x)
        accepted += want
        bad += red.accepts_via_instances(vecs) != want or not all(v.is_even() for v in vecs)
    gadget_bad = 0
    t = 6
    for _ in range(1000):
        z = ProductVector.of([Permutation(rng.permutation(t).tolist()) for _ in range(t)])
        gadget_bad += (z.fold()(1) == t) != red.maps_1_to_t_gadget(z).fold().is_identity()
    s4 = list(all_permutations(4))
    M = red.embed_even_element
    hom_bad = sum(compose(M(a), M(b)) != M(compose(a, b)) or not is_even(M(a)) for a in s4 for b in s4)
    ok = bad == gadget_bad == hom_bad == 0
    return ok, (
        f"chain {programs - bad}/{programs} ({accepted} accepting); gadget {1000 - gadget_bad}/1000; "
        f"embedding {len(s4) ** 2 - hom_bad}/{len(s4) ** 2}"
    )


# -- 8 -----------------------------------------------------------------------------

def check_single_element(cases: int = 100, seed: int = 8) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    bad = 0
    for t in (8, 10):
        ident = identity(t)
        gens = red.small_generators(t)
        for _ in range(cases):
            x = random_vector_with_fold(random_nonidentity_even(t, rng), t, rng)
            r = red.reduce_id_to_single(x)
            bad += not r.answer or r.witness is None
            if r.witness is not None:
                bad += red.apply_candidate(x, r.witness).fold() != red.target_1234(t)
            x = random_vector_with_fold(ident, t, rng)
            bad += red.reduce_id_to_single(x).answer
        for _ in range(cases):
            cand = red.candidate_at(t, int(rng.integers(len(gens) ** 2)), gens)
            x = random_vector_with_fold(ident, t, rng)
            bad += not red.apply_candidate(x, cand).fold().is_identity()
    return bad == 0, f"t in (8, 10): {cases} non-id, {cases} id, {cases} candidate id-checks each; {bad} failures"


# -- 9 -----------------------------------------------------------------------------

def check_sampler(draws: int = 100_000, seed: int = 9) -> tuple[bool, str]:
    group3 = alternating_group(3)
    bad = 0
    for alpha in group3:
        cls = {tuple(v) for v in _class_vectors(alpha, 3)}
        for x in _class_vectors(alpha, 3):
            xv = ProductVector.of(x)
            outs = [tuple(lk.rerandomize(xv, rs=rs).elements) for rs in itertools.product(group3, repeat=2)]
            bad += len(outs) != 9 or set(outs) != cls
    rng = np.random.default_rng(seed)
    t = 4
    group4 = alternating_group(t)
    index = {g.array: i for i, g in enumerate(group4)}
    alpha = cyc((1, 2), (3, 4), t=t)
    z = lk.sample_class_batch(alpha, draws, rng)
    keys = [index[tuple(row[0])] * 144 + index[tuple(row[1])] * 12 + index[tuple(row[2])] for row in z.tolist()]
    counts = np.bincount(keys, minlength=12 ** 3)
    pvalue = stats.chisquare(counts).pvalue
    return bad == 0 and pvalue > 0.01, f"bijection failures {bad}; chi-square p={pvalue:.3f} > 0.01 over {draws} draws"


def _class_vectors(alpha: Permutation, length: int):
    group = alternating_group(alpha.degree)
    for prefix in itertools.product(group, repeat=length - 1):
        yield list(prefix) + [compose(inverse(product(prefix)), alpha)]


# -- 10 ----------------------------------------------------------------------------

def check_tvd(n: int = 100_000, seed: int = 10) -> tuple[bool, str]:
    from fractions import Fraction

    t = 4
    alpha = cyc((1, 2), (3, 4), t=t)
    coord = lk.coordinate_leakage(1, t)
    fold = lk.fold_indicator(alpha)
    e0, e1 = lk.tvd_exact(coord, alpha), lk.tvd_exact(fold, alpha)
    m0 = lk.tvd_monte_carlo(coord, alpha, n=n, rng=seed)
    m1 = lk.tvd_monte_carlo(fold, alpha, n=n, rng=seed + 1)
    ok = e0 == Fraction(0) and e1 == Fraction(1) and m0.estimate <= m0.radius and m1.estimate >= 1 - m1.radius
    return ok, (
        f"exact {e0}, {e1}; MC coord {m0.estimate:.4f} <= {m0.radius:.4f}, "
        f"fold {m1.estimate:.4f} >= 1 - {m1.radius:.4f}"
    )


# -- 11 ----------------------------------------------------------------------------

def check_amplifier(trials: int = 1000, seed: int = 11) -> tuple[bool, str]:
    t = 6
    alpha = cyc((1, 2), (3, 4), t=t)
    c_prime = lk.planted_distinguisher(alpha, 0.6, 0.3)
    rates = []
    for i, m in enumerate((10, 100, 1000)):
        p = lk.AmplifierParams(k=1, m=m, eps_alpha=0.6, t=t)
        rates.append(lk.amplifier_error_rate(alpha, c_prime, p, trials, rng=seed + i))
    ok = rates[2] < 0.01 and rates[0] > rates[1] > rates[2]
    return ok, "error at m=10,100,1000: " + ", ".join(f"{r:.3f}" for r in rates)


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]], float]] = [
    (1, "commutator identities", check_identities, 1),
    (2, "to_double_transposition exhaustive on A_6", check_to_double_exhaustive, 5),
    (3, "convert contract", check_convert, 60),
    (4, "alpha -> beta vector maps", check_localmap, 120),
    (5, "moved-points bound on A_5", check_moved_points, 1),
    (6, "branching program encoding", check_bp_encoding, 60),
    (7, "id-product reduction chain", check_id_chain, 60),
    (8, "single-element reduction", check_single_element, 120),
    (9, "class sampler", check_sampler, 30),
    (10, "statistical distance", check_tvd, 60),
    (11, "threshold amplifier", check_amplifier, 120),
]


def run_check(number: int) -> CheckResult:
    for num, name, fn, limit in CRITERIA:
        if num == number:
            start = time.perf_counter()
            ok, detail = fn()
            return CheckResult(num, name, ok, detail, time.perf_counter() - start, limit)
    raise KeyError(number)


def run_all(numbers=None) -> list[CheckResult]:
    nums = [c[0] for c in CRITERIA] if numbers is None else list(numbers)
    return [run_check(n) for n in nums]

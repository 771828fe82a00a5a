"""Sampling product classes and measuring what leakage functions learn from them.

``D_alpha`` is the uniform distribution on length-n vectors over A_t whose
fold is ``alpha``.  Samples come from rerandomization::

    (x1, ..., xn) -> (x1 r1, r1^-1 x2 r2, ..., r_{n-1}^-1 xn)

with independent uniform ``r_i`` in A_t, which keeps the fold and is uniform
on its class.

Monte Carlo work is vectorized: a batch of vectors is an int array of shape
``(batch, n, t)`` holding 0-based images.
"""

from __future__ import annotations

import csv
import itertools
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from .errors import BudgetExceeded, LengthMismatch, OddPermutation, OutputTooWide
from .perm import Permutation, alternating_group, compose, inverse, is_even, random_even
from .vectors import ProductVector

RngLike = Union[np.random.Generator, int, None]

MAX_HIST_BITS = 20
EXACT_BUDGET = 100_000


def _as_rng(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


# -- batched permutation arithmetic ------------------------------------------------

def compose_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Left-to-right product along the last axis: ``out[..., i] = b[..., a[..., i]]``."""
    a, b = np.broadcast_arrays(a, b)
    return np.take_along_axis(b, a, axis=-1)


def inverse_batch(a: np.ndarray) -> np.ndarray:
    return np.argsort(a, axis=-1)


def parity_batch(a: np.ndarray) -> np.ndarray:
    """0 for even, 1 for odd, by inversion count."""
    t = a.shape[-1]
    iu = np.triu_indices(t, 1)
    inv = a[..., iu[0]] > a[..., iu[1]]
    return inv.sum(axis=-1) & 1


def random_even_batch(rng: np.random.Generator, shape: tuple[int, ...], t: int) -> np.ndarray:
    """Uniform A_t elements: uniform S_t draws, odd ones fixed by swapping images of points 1 and 2."""
    p = np.argsort(rng.random(shape + (t,)), axis=-1)
    odd = parity_batch(p).astype(bool)
    p[odd, 0], p[odd, 1] = p[odd, 1], p[odd, 0].copy()
    return p


def fold_batch(z: np.ndarray) -> np.ndarray:
    acc = z[..., 0, :]
    for i in range(1, z.shape[-2]):
        acc = compose_batch(acc, z[..., i, :])
    return acc


def lehmer_rank_batch(a: np.ndarray) -> np.ndarray:
    """Lexicographic rank of each permutation in S_t."""
    t = a.shape[-1]
    rank = np.zeros(a.shape[:-1], dtype=np.int64)
    for i in range(t):
        smaller = (a[..., i + 1:] < a[..., i:i + 1]).sum(axis=-1)
        rank += smaller * math.factorial(t - 1 - i)
    return rank


def vector_to_array(v: ProductVector) -> np.ndarray:
    return np.array([e.array for e in v.elements], dtype=np.int64)


def array_to_vector(z: np.ndarray) -> ProductVector:
    return ProductVector.of([Permutation(row.tolist(), check=False) for row in z])


# -- rerandomization and sampling -------------------------------------------------

def rerandomize(
    x: ProductVector,
    rng: RngLike = None,
    rs: Sequence[Permutation] | None = None,
) -> ProductVector:
    """Uniform vector with the same fold as ``x``; ``rs`` pins the n-1 randomizers."""
    n = len(x)
    if n < 2:
        raise LengthMismatch("rerandomization needs length >= 2")
    if rs is None:
        gen = _as_rng(rng)
        rs = [random_even(x.degree, gen) for _ in range(n - 1)]
    elif len(rs) != n - 1:
        raise LengthMismatch(f"need {n - 1} randomizers, got {len(rs)}")
    els = list(x.elements)
    for i, r in enumerate(rs):
        els[i] = compose(els[i], r)
        els[i + 1] = compose(inverse(r), els[i + 1])
    return ProductVector(x.degree, tuple(els), x.provenance)


def rerandomize_batch(x: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """``m`` independent rerandomizations of one vector, shape ``(m, n, t)``."""
    n, t = x.shape
    r = random_even_batch(rng, (m, n - 1), t)
    z = np.broadcast_to(x, (m, n, t)).copy()
    z[:, :-1] = compose_batch(z[:, :-1], r)
    z[:, 1:] = compose_batch(inverse_batch(r), z[:, 1:])
    return z


def class_representative(alpha: Permutation, length: int) -> ProductVector:
    ident = Permutation.identity(alpha.degree)
    return ProductVector.of([alpha] + [ident] * (length - 1))


def sample_class(alpha: Permutation, t: int | None = None, rng: RngLike = None, length: int | None = None) -> ProductVector:
    """One draw from D_alpha (length defaults to the degree)."""
    if not is_even(alpha):
        raise OddPermutation(f"{alpha} is odd")
    t = alpha.degree if t is None else t
    return rerandomize(class_representative(alpha, length or t), rng)


def sample_class_batch(alpha: Permutation, n: int, rng: RngLike = None, length: int | None = None) -> np.ndarray:
    if not is_even(alpha):
        raise OddPermutation(f"{alpha} is odd")
    x = vector_to_array(class_representative(alpha, length or alpha.degree))
    return rerandomize_batch(x, n, _as_rng(rng))


# -- leakage functions -------------------------------------------------------------

@dataclass(frozen=True)
class LeakageFunction:
    """A deterministic map from vectors to ``width``-bit strings.

    ``codes`` is the batched form: it maps an ``(m, n, t)`` array to the
    integer value of each output bit string.
    """

    name: str
    width: int
    evaluator: Callable[[ProductVector], str]
    codes: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __call__(self, v: ProductVector) -> str:
        out = self.evaluator(v)
        if len(out) != self.width:
            raise ValueError(f"{self.name} produced {len(out)} bits, declared {self.width}")
        return out

    def batch_codes(self, z: np.ndarray) -> np.ndarray:
        if self.codes is not None:
            return self.codes(z)
        return np.array([int(self(array_to_vector(row)), 2) for row in z], dtype=np.int64)


def _bits(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


def _bits_for(count: int) -> int:
    return max(1, math.ceil(math.log2(count))) if count > 1 else 1


def coordinate_leakage(index: int, t: int) -> LeakageFunction:
    """Rank of the ``index``-th element (1-based) in S_t."""
    width = _bits_for(math.factorial(t))
    i = index - 1

    def ev(v: ProductVector) -> str:
        return _bits(int(lehmer_rank_batch(np.array(v[i].array))), width)

    return LeakageFunction(f"coord:{index}", width, ev, lambda z: lehmer_rank_batch(z[:, i, :]))


def fold_indicator(alpha: Permutation) -> LeakageFunction:
    target = np.array(alpha.array)

    def ev(v: ProductVector) -> str:
        return "1" if v.fold() == alpha else "0"

    def codes(z: np.ndarray) -> np.ndarray:
        return np.all(fold_batch(z) == target, axis=-1).astype(np.int64)

    return LeakageFunction("fold", 1, ev, codes)


def point_image_leakage(point: int, t: int) -> LeakageFunction:
    """Where the fold sends ``point`` (0-based value, ceil(log2 t) bits)."""
    width = _bits_for(t)

    def ev(v: ProductVector) -> str:
        return _bits(v.fold()(point) - 1, width)

    return LeakageFunction(f"image:{point}", width, ev, lambda z: fold_batch(z)[:, point - 1].astype(np.int64))


def first_bits_leakage(width: int) -> LeakageFunction:
    """Low bit of each element's image of point 1, first ``width`` elements."""

    def ev(v: ProductVector) -> str:
        if len(v) < width:
            raise LengthMismatch(f"need at least {width} elements")
        return "".join(str(v[j](1) & 1) for j in range(width))

    def codes(z: np.ndarray) -> np.ndarray:
        if z.shape[1] < width:
            raise LengthMismatch(f"need at least {width} elements")
        bits = (z[:, :width, 0] + 1) & 1
        weights = 1 << np.arange(width - 1, -1, -1)
        return (bits * weights).sum(axis=-1).astype(np.int64)

    return LeakageFunction(f"firstbits:{width}", width, ev, codes)


def planted_distinguisher(alpha: Permutation, p_alpha: float, p_id: float) -> LeakageFunction:
    """One bit that is 1 with probability ``p_alpha`` on D_alpha and ``p_id`` on D_id.

    The coin is the position of the first element in sorted A_t, which is
    uniform and independent of the fold; the threshold depends on whether
    the fold equals ``alpha``.  Exact when ``p * |A_t|`` is an integer.
    """
    t = alpha.degree
    if t > 9:
        raise BudgetExceeded("planted distinguisher tabulates A_t; t <= 9")
    group = alternating_group(t)
    size = len(group)
    table = np.full(math.factorial(t), -1, dtype=np.int64)
    ranks = lehmer_rank_batch(np.array([g.array for g in group]))
    table[ranks] = np.arange(size)
    cut_alpha, cut_id = round(p_alpha * size), round(p_id * size)
    target = np.array(alpha.array)

    def codes(z: np.ndarray) -> np.ndarray:
        pos = table[lehmer_rank_batch(z[:, 0, :])]
        hit = np.all(fold_batch(z) == target, axis=-1)
        return np.where(hit, pos < cut_alpha, pos < cut_id).astype(np.int64)

    def ev(v: ProductVector) -> str:
        return str(int(codes(vector_to_array(v)[None])[0]))

    return LeakageFunction(f"planted:{p_alpha:g}/{p_id:g}", 1, ev, codes)


def constant_leakage(bit: int = 0) -> LeakageFunction:
    return LeakageFunction(f"const:{bit}", 1, lambda v: str(bit), lambda z: np.full(len(z), bit, dtype=np.int64))


def make_leakage(desc: str, t: int, alpha: Permutation | None = None) -> LeakageFunction:
    """Registry lookup: ``coord:i``, ``fold``, ``image:p``, ``firstbits:L``, ``const:b``, ``planted:gap``."""
    kind, _, arg = desc.partition(":")
    if kind == "coord":
        return coordinate_leakage(int(arg or 1), t)
    if kind == "image":
        return point_image_leakage(int(arg or 1), t)
    if kind == "firstbits":
        return first_bits_leakage(int(arg or t))
    if kind == "const":
        return constant_leakage(int(arg or 0))
    if kind in ("fold", "planted"):
        if alpha is None:
            raise ValueError(f"leakage {desc!r} needs alpha")
        if kind == "fold":
            return fold_indicator(alpha)
        gap = float(arg or 0.3)
        return planted_distinguisher(alpha, 0.3 + gap, 0.3)
    raise ValueError(f"unknown leakage {desc!r}")


# -- statistical distance ------------------------------------------------------------

def _class_enumeration(alpha: Permutation, length: int, budget: int) -> np.ndarray:
    t = alpha.degree
    group = np.array([g.array for g in alternating_group(t)], dtype=np.int64)
    total = len(group) ** (length - 1)
    if total > budget:
        raise BudgetExceeded(f"{total} vectors exceed the enumeration budget {budget}")
    idx = np.array(list(itertools.product(range(len(group)), repeat=length - 1)), dtype=np.int64)
    if length == 1:
        return np.array(alpha.array, dtype=np.int64)[None, None, :]
    prefix = group[idx]  # (N, length-1, t)
    last = compose_batch(inverse_batch(fold_batch(prefix)), np.array(alpha.array))
    return np.concatenate([prefix, last[:, None, :]], axis=1)


def tvd_exact(
    leak: LeakageFunction,
    alpha: Permutation,
    t: int | None = None,
    length: int | None = None,
    budget: int = EXACT_BUDGET,
) -> Fraction:
    """Exact statistical distance between ``leak(D_alpha)`` and ``leak(D_id)``."""
    t = alpha.degree if t is None else t
    length = length or t
    ident = Permutation.identity(t)
    hists = []
    for g in (alpha, ident):
        z = _class_enumeration(g, length, budget)
        hists.append(Counter(leak.batch_codes(z).tolist()))
    total = sum(hists[0].values())
    diff = sum(abs(hists[0][k] - hists[1][k]) for k in set(hists[0]) | set(hists[1]))
    return Fraction(diff, 2 * total)


@dataclass(frozen=True)
class TVDEstimate:
    estimate: float
    radius: float
    n: int
    delta: float
    seed: object
    workers: int
    seconds: float = 0.0


def tvd_radius(width: int, n: int, delta: float) -> float:
    """``sqrt(2^width / n) + sqrt(ln(1/delta) / n)``.

    The first term bounds the expected plug-in error of both histograms;
    the second is a bounded-differences deviation (each sample moves the
    estimate by at most 1/n) holding with probability 1 - delta.
    """
    return math.sqrt(2 ** width / n) + math.sqrt(math.log(1 / delta) / n)


def _split(n: int, workers: int) -> list[int]:
    q, r = divmod(n, workers)
    return [q + (1 if i < r else 0) for i in range(workers)]


def _spawn(rng: RngLike, workers: int) -> list[np.random.Generator]:
    if isinstance(rng, np.random.Generator):
        return rng.spawn(workers)
    return [np.random.default_rng(s) for s in np.random.SeedSequence(rng).spawn(workers)]


def class_histogram(
    leak: LeakageFunction,
    g: Permutation,
    n: int,
    rng: RngLike = None,
    length: int | None = None,
    workers: int = 1,
    chunk: int = 20_000,
) -> Counter:
    """Histogram of leakage codes over ``n`` draws of D_g.

    Worker ``i`` draws its share from the ``i``-th spawned stream, so the
    result depends only on (seed, workers).
    """
    gens = _spawn(rng, workers)
    shares = _split(n, workers)

    def run(i: int) -> Counter:
        hist: Counter = Counter()
        left = shares[i]
        while left:
            b = min(chunk, left)
            z = sample_class_batch(g, b, gens[i], length)
            hist.update(leak.batch_codes(z).tolist())
            left -= b
        return hist

    if workers == 1:
        parts = [run(0)]
    else:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, range(workers)))
    total: Counter = Counter()
    for p in parts:
        total.update(p)
    return total


def tvd_monte_carlo(
    leak: LeakageFunction,
    alpha: Permutation,
    t: int | None = None,
    n: int = 10_000,
    rng: RngLike = None,
    *,
    length: int | None = None,
    workers: int = 1,
    delta: float = 0.01,
) -> TVDEstimate:
    if leak.width > MAX_HIST_BITS:
        raise OutputTooWide(f"{leak.name} has {leak.width} output bits; at most {MAX_HIST_BITS}")
    if n < 1:
        raise ValueError("n must be positive")
    seed = rng if not isinstance(rng, np.random.Generator) else "generator"
    gens = _spawn(rng, 2)
    start = time.perf_counter()
    ident = Permutation.identity(alpha.degree)
    ha = class_histogram(leak, alpha, n, gens[0], length, workers)
    hi = class_histogram(leak, ident, n, gens[1], length, workers)
    est = sum(abs(ha[k] - hi[k]) for k in set(ha) | set(hi)) / (2 * n)
    return TVDEstimate(est, tvd_radius(leak.width, n, delta), n, delta, seed, workers, time.perf_counter() - start)


REPORT_FIELDS = ["leakage", "alpha", "t", "n", "estimate", "radius", "delta", "seconds", "seed", "workers", "version"]


def write_report(rows: Sequence[dict], path) -> None:
    """Comma-separated experiment table, one row per (leakage, alpha, t, n)."""
    from . import __version__

    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow({"version": __version__, **row})


# -- the threshold amplifier ------------------------------------------------------------

@dataclass(frozen=True)
class AmplifierParams:
    k: int
    m: int
    eps_alpha: float
    t: int

    def __post_init__(self):
        if not 0 < self.eps_alpha <= 1:
            raise ValueError("eps_alpha must lie in (0, 1]")
        if self.m < 1 or self.k < 1:
            raise ValueError("m and k must be positive")

    @property
    def slack(self) -> float:
        return 1 / (2 * self.t ** self.k)

    @property
    def low(self) -> float:
        return (1 - self.slack) * self.m * self.eps_alpha

    @property
    def high(self) -> float:
        return (1 + self.slack) * self.m * self.eps_alpha


def theoretical_sample_count(t: int, k: int, eps_alpha: float) -> int:
    """``t^(3k+3) / eps_alpha``: the sample count that gives error below 2^(-t^3)."""
    return math.ceil(t ** (3 * k + 3) / eps_alpha)


def amplifier_count(x: ProductVector, c_prime: LeakageFunction, m: int, rng: RngLike = None) -> int:
    if c_prime.width != 1:
        raise ValueError("the amplifier needs a one-bit distinguisher")
    z = rerandomize_batch(vector_to_array(x), m, _as_rng(rng))
    return int(c_prime.batch_codes(z).sum())


def amplifier_decide(x: ProductVector, c_prime: LeakageFunction, p: AmplifierParams, rng: RngLike = None) -> str:
    """``"alpha"`` if the count of ones over m rerandomizations lands in [low, high], else ``"id"``."""
    count = amplifier_count(x, c_prime, p.m, rng)
    return "alpha" if p.low <= count <= p.high else "id"


def calibrate_eps(c_prime: LeakageFunction, alpha: Permutation, n: int, rng: RngLike = None) -> float:
    """Estimate ``Pr[c_prime(D_alpha) = 1]`` from ``n`` samples."""
    z = sample_class_batch(alpha, n, _as_rng(rng))
    return float(c_prime.batch_codes(z).mean())


def amplifier_error_rate(
    alpha: Permutation,
    c_prime: LeakageFunction,
    p: AmplifierParams,
    trials: int,
    rng: RngLike = None,
) -> float:
    """Fraction of wrong decisions; trials alternate between the two promise branches."""
    gen = _as_rng(rng)
    ident = Permutation.identity(alpha.degree)
    wrong = 0
    for i in range(trials):
        truth = alpha if i % 2 == 0 else ident
        x = sample_class(truth, rng=gen)
        want = "alpha" if truth == alpha else "id"
        wrong += amplifier_decide(x, c_prime, p, gen) != want
    return wrong / trials

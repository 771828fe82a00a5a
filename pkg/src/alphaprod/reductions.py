"""Reductions between product problems.

Two chains live here:

* ``bp_to_id_instances``: (branching program, input) -> vectors over
  A_{t'+3} such that the program accepts iff some vector folds to id.
* ``reduce_id_to_single``: "does x fold to id?" answered with queries to a
  decider for the (1 2)(3 4)-product problem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Callable, Iterator, Sequence

from .bp import BranchingProgram, encode
from .errors import BadShape, DegreeTooSmall, LengthMismatch
from .perm import (
    Permutation,
    decompose,
    is_even,
    num_moved,
)
from .transform import to_double_transposition
from .vectors import ProductVector, comm_step_vector, compress, conj_step_vector


def power_vectors(sigma: Permutation, t: int | None = None) -> list[ProductVector]:
    """For k = 1..t: k copies of sigma then t-k copies of id (fold sigma^k)."""
    t = sigma.degree if t is None else t
    ident = Permutation.identity(sigma.degree)
    out = []
    for k in range(1, t + 1):
        els = (sigma,) * k + (ident,) * (t - k)
        out.append(ProductVector(sigma.degree, els, (None,) * t))
    return out


def maps_1_to_t_gadget(z: ProductVector) -> ProductVector:
    """``(z, (t t+1), z^-1, (1 t+1))`` over S_{t+1}: folds to id iff fold(z) sends 1 to t."""
    t = z.degree
    up = z.extend(t + 1)
    swap_t = Permutation.from_cycles([(t, t + 1)], t + 1)
    swap_1 = Permutation.from_cycles([(1, t + 1)], t + 1)
    left = ProductVector(t + 1, (swap_t,), (None,))
    right = ProductVector(t + 1, (swap_1,), (None,))
    return up + left + up.reversed_inverse() + right


def embed_even_element(a: Permutation) -> Permutation:
    """``M(a) = a`` if even, else ``a * (t+1 t+2)``; a homomorphism S_t -> A_{t+2}."""
    t = a.degree
    up = a.extend(t + 2)
    if is_even(a):
        return up
    return up * Permutation.from_cycles([(t + 1, t + 2)], t + 2)


def embed_even(v: ProductVector) -> ProductVector:
    return ProductVector(v.degree + 2, tuple(embed_even_element(e) for e in v.elements), v.provenance)


def bp_to_id_instances(B: BranchingProgram, x) -> list[ProductVector]:
    """Vectors over A_{t'+3}, each of length t'+1; B accepts x iff one folds to id."""
    inst = encode(B, x)
    t = inst.degree
    out = []
    for v in power_vectors(inst.sigma, t):
        g = maps_1_to_t_gadget(v)
        out.append(embed_even(compress(g, t + 1)))
    return out


def accepts_via_instances(vectors: Sequence[ProductVector]) -> bool:
    return any(v.fold().is_identity() for v in vectors)


# -- (1 2)(3 4) hardness ---------------------------------------------------------

def double_transpositions(t: int) -> list[Permutation]:
    """All (a b)(c d), ordered by support then by the three pairings."""
    out = []
    for a, b, c, d in itertools.combinations(range(1, t + 1), 4):
        for pairs in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
            out.append(Permutation.from_cycles(pairs, t))
    return out


def three_cycles(t: int) -> list[Permutation]:
    out = []
    for a, b, c in itertools.combinations(range(1, t + 1), 3):
        out.append(Permutation.from_cycles([(a, b, c)], t))
        out.append(Permutation.from_cycles([(a, c, b)], t))
    return out


def small_generators(t: int) -> list[Permutation]:
    """Double transpositions and 3-cycles, lexicographic by support then pattern."""
    gens = double_transpositions(t) + three_cycles(t)
    return sorted(gens, key=lambda p: (sorted(_support(p)), p.image))


def _support(p: Permutation) -> list[int]:
    return [i for i in range(1, p.degree + 1) if p(i) != i]


@dataclass(frozen=True)
class GammaTuple:
    gamma1: Permutation
    gamma2: Permutation
    gamma3: Permutation | None = None  # None: derive it when applied

    def __post_init__(self):
        for g in (self.gamma1, self.gamma2):
            if decompose(g).cycle_type not in ((2, 2), (3,)):
                raise BadShape(f"{g} is neither a double transposition nor a 3-cycle")
        if self.gamma3 is not None and (not is_even(self.gamma3) or num_moved(self.gamma3) > 8):
            raise BadShape(f"gamma3 {self.gamma3} must be even and move at most 8 points")

    def __str__(self) -> str:
        g3 = "derived" if self.gamma3 is None else str(self.gamma3)
        return f"({self.gamma1}, {self.gamma2}, {g3})"


def candidate_count(t: int) -> int:
    n = 3 * comb(t, 4) + 2 * comb(t, 3)
    return n * n


def candidate_at(t: int, index: int, gens: Sequence[Permutation] | None = None) -> GammaTuple:
    """The ``index``-th candidate pair; computable independently of the others."""
    gens = small_generators(t) if gens is None else gens
    i, j = divmod(index, len(gens))
    return GammaTuple(gens[i], gens[j])


def candidate_tuples(t: int) -> Iterator[GammaTuple]:
    if t < 8:
        raise DegreeTooSmall(f"need t >= 8, got {t}")
    gens = small_generators(t)
    for g1 in gens:
        for g2 in gens:
            yield GammaTuple(g1, g2)


TARGET_1234_CYCLES = ((1, 2), (3, 4))


def target_1234(t: int) -> Permutation:
    return Permutation.from_cycles(TARGET_1234_CYCLES, t)


def small_conjugator_to_1234(alpha: Permutation) -> Permutation:
    """Even ``g`` moving at most 8 points with ``conjugate(alpha, g) == (1 2)(3 4)``."""
    t = alpha.degree
    if t < 8:
        raise DegreeTooSmall(f"need t >= 8, got {t}")
    cycles = decompose(alpha).cycles
    if [len(c) for c in cycles] != [2, 2]:
        raise BadShape(f"{alpha} is not a double transposition")
    (a, b), (c, d) = cycles
    src = [a, b, c, d]
    window = sorted(set(src) | {1, 2, 3, 4})
    rest_src = [p for p in window if p not in src]
    rest_dst = [p for p in window if p not in (1, 2, 3, 4)]
    img = list(range(t))
    for p, q in zip(src + rest_src, [1, 2, 3, 4] + rest_dst):
        img[p - 1] = q - 1
    g = Permutation(img)
    if not is_even(g):
        # (a b) commutes with alpha, so it fixes the conjugation and flips parity
        g = Permutation.from_cycles([(a, b)], t) * g
    return g


def derive_gamma3(alpha_prime: Permutation) -> Permutation:
    if decompose(alpha_prime).cycle_type == (2, 2):
        return small_conjugator_to_1234(alpha_prime)
    return Permutation.identity(alpha_prime.degree)


def _commute_twice(x: ProductVector, g: GammaTuple) -> ProductVector:
    return comm_step_vector(comm_step_vector(x, g.gamma1), g.gamma2)


def resolve_candidate(x: ProductVector, g: GammaTuple) -> GammaTuple:
    """Fill in a derived gamma3 for this particular x."""
    if g.gamma3 is not None:
        return g
    return GammaTuple(g.gamma1, g.gamma2, derive_gamma3(_commute_twice(x, g).fold()))


def apply_candidate(x: ProductVector, g: GammaTuple) -> ProductVector:
    """Commute with gamma1, then gamma2, conjugate by gamma3 and compress back to length len(x)."""
    v = _commute_twice(x, g)
    g3 = derive_gamma3(v.fold()) if g.gamma3 is None else g.gamma3
    return compress(conj_step_vector(v, g3), len(x))


def exact_fold_decider(v: ProductVector) -> bool:
    """Sound decider: True iff the vector folds to (1 2)(3 4)."""
    return v.fold() == target_1234(v.degree)


@dataclass(frozen=True)
class ReductionResult:
    answer: bool
    witness: GammaTuple | None
    queries: int
    path: str  # "constructive", "enumerated" or "none"


Decider = Callable[[ProductVector], bool]


def constructive_tuple(alpha: Permutation) -> GammaTuple:
    """The tuple the case analysis picks for ``alpha != id``."""
    script = to_double_transposition(alpha)
    g1, g2 = (s.gamma for s in script.steps)
    return GammaTuple(g1, g2, small_conjugator_to_1234(script.target))


def reduce_id_to_single(
    x: ProductVector,
    decider: Decider = exact_fold_decider,
    *,
    constructive: bool = True,
    enumerate_candidates: bool = False,
    budget: int | None = None,
) -> ReductionResult:
    """Decide ``fold(x) != id`` by OR-ing ``decider`` over candidate instances.

    By default the only queried instance is the constructive one derived
    from the fold (or a fixed canonical tuple when the fold is id).  With
    ``enumerate_candidates`` the full candidate stream is queried after
    it, in deterministic order, up to ``budget`` queries in total.
    """
    t = x.degree
    if t < 8:
        raise DegreeTooSmall(f"need t >= 8, got {t}")
    if len(x) < 1:
        raise LengthMismatch("empty vector")
    queries = 0
    if constructive:
        alpha = x.fold()
        first = candidate_at(t, 0) if alpha.is_identity() else constructive_tuple(alpha)
        queries += 1
        if decider(apply_candidate(x, first)):
            return ReductionResult(True, first, queries, "constructive")
    if enumerate_candidates:
        for cand in candidate_tuples(t):
            if budget is not None and queries >= budget:
                break
            queries += 1
            if decider(apply_candidate(x, cand)):
                return ReductionResult(True, cand, queries, "enumerated")
    return ReductionResult(False, None, queries, "none")

"""Exact arithmetic on the symmetric group S_t and the alternating group A_t.

Points are 1-based, ``{1, ..., t}``, everywhere in the public API.

Composition is applied left to right::

    (a * b)(i) == b(a(i))

so ``a * b`` means "first a, then b".  Under this convention

* ``conjugate(a, g) = g^-1 * a * g`` relabels every cycle ``(p1 ... pk)`` of
  ``a`` as ``(g(p1) ... g(pk))``;
* ``commutator(a, g) = a * g * a^-1 * g^-1``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeMismatch,
    MalformedCycles,
    MalformedPermutation,
    NotConjugate,
    NotConjugateInA,
    OddPermutation,
)


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1

    def __mul__(self, other: "Parity") -> "Parity":
        return Parity(self.value ^ other.value)

    def __str__(self) -> str:
        return self.name.lower()


class Permutation:
    """A bijection of ``{1, ..., t}`` stored as its 0-based image tuple.

    Instances are immutable and hashable.  Build them with
    :meth:`from_image`, :meth:`from_cycles`, :meth:`identity` or :func:`parse`.
    """

    __slots__ = ("_img",)

    def __init__(self, img0: Sequence[int], *, check: bool = True):
        img = tuple(img0)
        if check:
            if not img:
                raise MalformedPermutation("degree must be at least 1")
            if sorted(img) != list(range(len(img))):
                raise MalformedPermutation(f"not a bijection: {[i + 1 for i in img]}")
        self._img = img

    # -- constructors ------------------------------------------------------
    @classmethod
    def identity(cls, t: int) -> "Permutation":
        if t < 1:
            raise MalformedPermutation("degree must be at least 1")
        return cls(range(t), check=False)

    @classmethod
    def from_image(cls, image: Sequence[int]) -> "Permutation":
        """``image[i-1]`` is the point that ``i`` maps to (1-based)."""
        return cls([int(v) - 1 for v in image])

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], t: int) -> "Permutation":
        img = list(range(t))
        seen: set[int] = set()
        for cyc in cycles:
            cyc = [int(p) for p in cyc]
            for p in cyc:
                if not 1 <= p <= t:
                    raise MalformedCycles(f"point {p} out of range 1..{t}")
                if p in seen:
                    raise MalformedCycles(f"point {p} appears twice")
                seen.add(p)
            for i, p in enumerate(cyc):
                img[p - 1] = cyc[(i + 1) % len(cyc)] - 1
        return cls(img, check=False)

    # -- basic protocol ----------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def image(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in self._img)

    @property
    def array(self) -> tuple[int, ...]:
        """The 0-based image tuple (no copy)."""
        return self._img

    def __call__(self, point: int) -> int:
        return self._img[point - 1] + 1

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def __pow__(self, k: int) -> "Permutation":
        result = Permutation.identity(self.degree)
        base = self if k >= 0 else inverse(self)
        for _ in range(abs(k)):
            result = compose(result, base)
        return result

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self._img == other._img

    def __hash__(self) -> int:
        return hash(self._img)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)}, t={self.degree})"

    def __str__(self) -> str:
        return format_cycles(self)

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self._img))

    def is_even(self) -> bool:
        return parity(self) is Parity.EVEN

    def extend(self, t: int) -> "Permutation":
        """Canonical embedding into S_t for ``t >= degree``."""
        if t < self.degree:
            raise DegreeMismatch(f"cannot embed degree {self.degree} into {t}")
        return Permutation(self._img + tuple(range(self.degree, t)), check=False)


@dataclass(frozen=True)
class CycleDecomposition:
    """Disjoint cycles of length >= 2 in canonical form.

    Each cycle starts at its smallest point; cycles are sorted by first point.
    """

    degree: int
    cycles: tuple[tuple[int, ...], ...]

    @property
    def cycle_type(self) -> tuple[int, ...]:
        """Sorted lengths of the nontrivial cycles."""
        return tuple(sorted(len(c) for c in self.cycles))

    @property
    def full_cycle_type(self) -> tuple[int, ...]:
        """Cycle type including fixed points as 1-cycles."""
        moved = sum(len(c) for c in self.cycles)
        return tuple(sorted([1] * (self.degree - moved) + [len(c) for c in self.cycles]))


def _check_degrees(*perms: Permutation) -> int:
    t = perms[0].degree
    for p in perms[1:]:
        if p.degree != t:
            raise DegreeMismatch(f"degrees {t} and {p.degree} differ")
    return t


def identity(t: int) -> Permutation:
    return Permutation.identity(t)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Left-to-right product: first ``a``, then ``b``."""
    _check_degrees(a, b)
    bi = b._img
    return Permutation([bi[i] for i in a._img], check=False)


def product(perms: Iterable[Permutation], t: int | None = None) -> Permutation:
    """Fold a sequence with :func:`compose`; ``t`` is needed for an empty one."""
    it = iter(perms)
    try:
        acc = list(next(it)._img)
    except StopIteration:
        if t is None:
            raise ValueError("empty product needs an explicit degree") from None
        return Permutation.identity(t)
    n = len(acc)
    for p in it:
        if p.degree != n:
            raise DegreeMismatch(f"degrees {n} and {p.degree} differ")
        pi = p._img
        acc = [pi[i] for i in acc]
    return Permutation(acc, check=False)


def inverse(a: Permutation) -> Permutation:
    inv = [0] * a.degree
    for i, v in enumerate(a._img):
        inv[v] = i
    return Permutation(inv, check=False)


def decompose(a: Permutation) -> CycleDecomposition:
    img = a._img
    seen = [False] * len(img)
    cycles = []
    for start in range(len(img)):
        if seen[start] or img[start] == start:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i + 1)
            i = img[i]
        cycles.append(tuple(cyc))
    # scanning starts in increasing order, so each cycle already begins at its minimum
    return CycleDecomposition(a.degree, tuple(cycles))


def recompose(c: CycleDecomposition) -> Permutation:
    return Permutation.from_cycles(c.cycles, c.degree)


def cycle_type(a: Permutation) -> tuple[int, ...]:
    return decompose(a).cycle_type


def parity(a: Permutation) -> Parity:
    """Parity via ``t - (#cycles including fixed points)``; linear time."""
    img = a._img
    seen = [False] * len(img)
    ncycles = 0
    for start in range(len(img)):
        if seen[start]:
            continue
        ncycles += 1
        i = start
        while not seen[i]:
            seen[i] = True
            i = img[i]
    return Parity((len(img) - ncycles) & 1)


def parity_by_inversions(a: Permutation) -> Parity:
    """Parity of the number of pairs ``i < j`` with ``a(i) > a(j)``."""
    img = a._img
    n = len(img)
    inv = sum(1 for i in range(n) for j in range(i + 1, n) if img[i] > img[j])
    return Parity(inv & 1)


def is_even(a: Permutation) -> bool:
    return parity(a) is Parity.EVEN


def commutator(a: Permutation, g: Permutation) -> Permutation:
    """``[a, g] = a g a^-1 g^-1``."""
    _check_degrees(a, g)
    return product((a, g, inverse(a), inverse(g)))


def conjugate(a: Permutation, g: Permutation) -> Permutation:
    """``g^-1 a g``: sends each cycle ``(p1 ... pk)`` of ``a`` to ``(g(p1) ... g(pk))``."""
    _check_degrees(a, g)
    ai, gi = a._img, g._img
    out = [0] * len(ai)
    for p, q in enumerate(ai):
        out[gi[p]] = gi[q]
    return Permutation(out, check=False)


def moved_points(a: Permutation) -> frozenset[int]:
    return frozenset(i + 1 for i, v in enumerate(a._img) if i != v)


def num_moved(a: Permutation) -> int:
    """``M(a)``: how many points ``a`` does not fix."""
    return sum(1 for i, v in enumerate(a._img) if i != v)


def _cycles_with_fixed(a: Permutation) -> list[tuple[int, ...]]:
    dec = decompose(a)
    moved = {p for c in dec.cycles for p in c}
    fixed = [(p,) for p in range(1, a.degree + 1) if p not in moved]
    # stable sort keeps canonical order within one length
    return sorted(list(dec.cycles) + fixed, key=len)


def conjugator_in_S(a: Permutation, b: Permutation) -> Permutation:
    """Some ``g`` in S_t with ``conjugate(a, g) == b``.

    Cycles of equal length are aligned position by position in canonical
    order, fixed points included.
    """
    t = _check_degrees(a, b)
    ca, cb = _cycles_with_fixed(a), _cycles_with_fixed(b)
    if [len(c) for c in ca] != [len(c) for c in cb]:
        raise NotConjugate(f"{a} and {b} have different cycle types")
    img = [0] * t
    for x, y in zip(ca, cb):
        for p, q in zip(x, y):
            img[p - 1] = q - 1
    return Permutation(img, check=False)


def odd_centralizer_element(a: Permutation) -> Permutation | None:
    """An odd permutation commuting with ``a``, or None if the class splits in A_t."""
    t = a.degree
    cycles = _cycles_with_fixed(a)
    for c in cycles:
        if len(c) % 2 == 0:
            return Permutation.from_cycles([c], t)
    by_len: dict[int, tuple[int, ...]] = {}
    for c in cycles:
        other = by_len.get(len(c))
        if other is not None:
            # block swap of two odd-length cycles: an odd number of transpositions
            swap = Permutation.from_cycles([(p, q) for p, q in zip(other, c)], t)
            if not is_even(swap):
                return swap
        by_len[len(c)] = c
    return None


def conjugator_in_A(a: Permutation, b: Permutation) -> Permutation:
    """Some even ``g`` with ``conjugate(a, g) == b``.

    Raises NotConjugateInA when ``a`` and ``b`` share a cycle type made of
    distinct odd lengths but lie in different A_t classes.
    """
    if not (is_even(a) and is_even(b)):
        raise OddPermutation("conjugator_in_A needs even permutations")
    g = conjugator_in_S(a, b)
    if is_even(g):
        return g
    c = odd_centralizer_element(a)
    if c is None:
        raise NotConjugateInA(f"{a} and {b} are not conjugate in A_{a.degree}")
    return compose(c, g)


def random_permutation(t: int, rng: np.random.Generator) -> Permutation:
    return Permutation(rng.permutation(t).tolist(), check=False)


def random_even(t: int, rng: np.random.Generator) -> Permutation:
    """Uniform element of A_t: Fisher-Yates, then swap the images of points 1 and 2 if odd."""
    img = rng.permutation(t).tolist()
    p = Permutation(img, check=False)
    if t >= 2 and not is_even(p):
        img[0], img[1] = img[1], img[0]
        p = Permutation(img, check=False)
    return p


def all_permutations(t: int) -> Iterable[Permutation]:
    from itertools import permutations

    for img in permutations(range(t)):
        yield Permutation(img, check=False)


def alternating_group(t: int) -> list[Permutation]:
    return [p for p in all_permutations(t) if is_even(p)]


# -- text format -----------------------------------------------------------

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse(text: str, t: int) -> Permutation:
    """Parse ``"(1 2)(3 4)"``, ``"()"``, ``"id"`` or an image list ``"[2,1,4,3]"``."""
    s = text.strip()
    if s in ("", "id", "()"):
        return Permutation.identity(t)
    if s.startswith("["):
        if not s.endswith("]"):
            raise MalformedPermutation(f"unterminated image list: {text!r}")
        body = s[1:-1].replace(",", " ").split()
        p = Permutation.from_image([int(v) for v in body])
        if p.degree != t:
            raise DegreeMismatch(f"image list has length {p.degree}, expected {t}")
        return p
    stripped = _CYCLE_RE.sub("", s).strip()
    if stripped:
        raise MalformedCycles(f"unexpected text {stripped!r} in {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(s):
        pts = body.replace(",", " ").split()
        if pts:
            cycles.append([int(v) for v in pts])
    return Permutation.from_cycles(cycles, t)


def format_cycles(a: Permutation) -> str:
    cycles = decompose(a).cycles
    if not cycles:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)


def format_image(a: Permutation) -> str:
    return "[" + ",".join(map(str, a.image)) + "]"


def cyc(*cycles: Sequence[int], t: int) -> Permutation:
    """Shorthand: ``cyc((1, 2), (3, 4), t=6)``."""
    return Permutation.from_cycles(cycles, t)

"""Product vectors and the 1-local maps that move their products around.

A :class:`ProductVector` carries, next to its elements, a provenance tag per
element:

* ``int i``       -- the element depends on input coordinate ``i`` only
  (conjugation and commutator steps give the form ``L * x_i^(+-1) * R``);
* ``None``        -- a constant that depends on no input;
* ``frozenset``   -- produced by merging, depends on several inputs.

Conjugation and commutator steps keep every tag an ``int``; that is the
1-locality witness of the maps built here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .errors import (
    DegreeMismatch,
    DegreeNotTwoModFour,
    IdentityElement,
    LengthMismatch,
    OddGamma,
    OddPermutation,
)
from .perm import (
    Permutation,
    compose,
    decompose,
    format_cycles,
    format_image,
    inverse,
    is_even,
    parse,
    product,
)
from .transform import COMM, CONJ, TransformStep, comm_count, convert

Provenance = Union[int, None, frozenset]

# Bound on output_length / (t * m).  scripts/calibrate_constants.py measured a
# worst ratio of 16/3 (t=6, two 3-cycles); frozen at the next integer.
C_LEN = 6


@dataclass(frozen=True)
class ProductVector:
    degree: int
    elements: tuple[Permutation, ...]
    provenance: tuple[Provenance, ...] = ()

    def __post_init__(self):
        if not self.provenance:
            object.__setattr__(self, "provenance", tuple(range(len(self.elements))))
        if len(self.provenance) != len(self.elements):
            raise LengthMismatch("one provenance tag per element")
        for e in self.elements:
            if e.degree != self.degree:
                raise DegreeMismatch(f"element {e} has degree {e.degree}, expected {self.degree}")

    @classmethod
    def of(cls, elements: Sequence[Permutation], provenance: Sequence[Provenance] = ()) -> "ProductVector":
        elements = tuple(elements)
        if not elements:
            raise LengthMismatch("cannot infer degree of an empty vector")
        return cls(elements[0].degree, elements, tuple(provenance))

    @classmethod
    def constant(cls, elements: Sequence[Permutation]) -> "ProductVector":
        elements = tuple(elements)
        return cls(elements[0].degree, elements, (None,) * len(elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> Permutation:
        return self.elements[i]

    def fold(self) -> Permutation:
        return product(self.elements, self.degree)

    def is_even(self) -> bool:
        return all(is_even(e) for e in self.elements)

    def is_one_local(self) -> bool:
        return all(isinstance(p, int) for p in self.provenance)

    def __add__(self, other: "ProductVector") -> "ProductVector":
        if other.degree != self.degree:
            raise DegreeMismatch("cannot concatenate vectors of different degree")
        return ProductVector(self.degree, self.elements + other.elements, self.provenance + other.provenance)

    def reversed_inverse(self) -> "ProductVector":
        """``(x_L^-1, ..., x_1^-1)``, whose fold is the inverse fold."""
        return ProductVector(
            self.degree,
            tuple(inverse(e) for e in reversed(self.elements)),
            tuple(reversed(self.provenance)),
        )

    def extend(self, t: int) -> "ProductVector":
        return ProductVector(t, tuple(e.extend(t) for e in self.elements), self.provenance)

    def dumps(self, style: str = "cycles") -> str:
        fmt = format_image if style == "images" else format_cycles
        lines = [f"vector {self.degree} {len(self)}"]
        lines += [fmt(e) for e in self.elements]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ProductVector":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        head = lines[0].split()
        if head[0] != "vector" or len(head) != 3:
            raise ValueError(f"bad vector header: {lines[0]!r}")
        t, n = int(head[1]), int(head[2])
        body = lines[1:1 + n]
        if len(body) != n:
            raise LengthMismatch(f"header promises {n} elements, found {len(body)}")
        return cls(t, tuple(parse(ln, t) for ln in body))


def dump_vectors(vectors: Sequence[ProductVector], manifest: dict | None = None, style: str = "cycles") -> str:
    """Several vectors in one text; an optional ``# manifest k=v ...`` first line."""
    out = ""
    if manifest:
        out = "# manifest " + " ".join(f"{k}={v}" for k, v in manifest.items()) + "\n"
    return out + "".join(v.dumps(style) for v in vectors)


def load_vectors(text: str) -> tuple[dict, list[ProductVector]]:
    manifest: dict = {}
    chunks: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("# manifest"):
            manifest.update(kv.split("=", 1) for kv in line.split()[2:] if "=" in kv)
            continue
        if not line or line.startswith("#"):
            continue
        if line.startswith("vector"):
            chunks.append([])
        if not chunks:
            raise ValueError(f"element line before any vector header: {line!r}")
        chunks[-1].append(line)
    return manifest, [ProductVector.loads("\n".join(c)) for c in chunks]


def identity_vector(t: int, length: int) -> ProductVector:
    return ProductVector.constant([Permutation.identity(t)] * length)


def _check_gamma(v: ProductVector, g: Permutation) -> None:
    if g.degree != v.degree:
        raise DegreeMismatch(f"gamma degree {g.degree} != vector degree {v.degree}")
    if not is_even(g):
        raise OddGamma(f"{g} is odd")
    if not len(v):
        raise LengthMismatch("empty vector")


def conj_step_vector(v: ProductVector, g: Permutation) -> ProductVector:
    """``(x1, ..., xm) -> (g^-1 x1, ..., xm g)``; the fold becomes ``g^-1 (fold) g``."""
    _check_gamma(v, g)
    els = list(v.elements)
    els[0] = compose(inverse(g), els[0])
    els[-1] = compose(els[-1], g)
    return ProductVector(v.degree, tuple(els), v.provenance)


def comm_step_vector(v: ProductVector, g: Permutation) -> ProductVector:
    """``(x1, ..., xm) -> (x1, ..., xm g, xm^-1, ..., x1^-1 g^-1)``; the fold becomes ``[fold, g]``."""
    _check_gamma(v, g)
    front = list(v.elements)
    front[-1] = compose(front[-1], g)
    back = [inverse(e) for e in reversed(v.elements)]
    back[-1] = compose(back[-1], inverse(g))
    prov = v.provenance + tuple(reversed(v.provenance))
    return ProductVector(v.degree, tuple(front + back), prov)


def apply_step_vector(v: ProductVector, step: TransformStep) -> ProductVector:
    if step.kind == CONJ:
        return conj_step_vector(v, step.gamma)
    return comm_step_vector(v, step.gamma)


def lift_steps(v: ProductVector, steps: Iterable[TransformStep]) -> ProductVector:
    for s in steps:
        v = apply_step_vector(v, s)
    return v


def _merge_provenance(tags: Sequence[Provenance]) -> Provenance:
    if len(tags) == 1:
        return tags[0]
    sources: set[int] = set()
    for p in tags:
        if isinstance(p, int):
            sources.add(p)
        elif isinstance(p, frozenset):
            sources |= p
    if not sources:
        return None
    if len(sources) == 1:
        return next(iter(sources))
    return frozenset(sources)


def compress(v: ProductVector, target_len: int) -> ProductVector:
    """Multiply contiguous runs of elements so exactly ``target_len`` remain; pads with id if short."""
    if target_len < 1:
        raise ValueError("target_len must be at least 1")
    n = len(v)
    if n <= target_len:
        pad = target_len - n
        ident = Permutation.identity(v.degree)
        return ProductVector(v.degree, v.elements + (ident,) * pad, v.provenance + (None,) * pad)
    q, r = divmod(n, target_len)
    els, prov = [], []
    i = 0
    for g in range(target_len):
        size = q + (1 if g < r else 0)
        els.append(product(v.elements[i:i + size]))
        prov.append(_merge_provenance(v.provenance[i:i + size]))
        i += size
    return ProductVector(v.degree, tuple(els), tuple(prov))


# -- alpha -> beta maps -------------------------------------------------------

@dataclass(frozen=True)
class Block:
    """One output block: ``steps`` lifted from the input vector, folding to ``component``."""

    component: Permutation
    steps: tuple[TransformStep, ...]

    @property
    def comm_count(self) -> int:
        return comm_count(self.steps)


@dataclass(frozen=True)
class VectorMap:
    degree: int
    input_length: int
    alpha: Permutation
    beta: Permutation
    blocks: tuple[Block, ...] = field(default_factory=tuple)

    @property
    def output_length(self) -> int:
        return sum(self.input_length * 2 ** b.comm_count for b in self.blocks)

    def __call__(self, x: ProductVector) -> ProductVector:
        return apply_vector_map(self, x)

    def dumps(self) -> str:
        lines = [
            f"map {self.degree} {self.input_length} {len(self.blocks)}",
            f"alpha {format_cycles(self.alpha)}",
            f"beta {format_cycles(self.beta)}",
        ]
        for i, b in enumerate(self.blocks, 1):
            lines.append(f"block {i} {format_cycles(b.component)}")
            lines += [f"{s}" + (f"  # {s.tag}" if s.tag else "") for s in b.steps]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "VectorMap":
        lines = []
        for raw in text.splitlines():
            body, _, comment = raw.partition("#")
            if body.strip():
                lines.append((body.strip(), comment.strip()))
        head = lines[0][0].split()
        if head[0] != "map":
            raise ValueError(f"bad map header: {lines[0][0]!r}")
        t, m = int(head[1]), int(head[2])
        alpha = beta = None
        blocks: list[tuple[Permutation, list[TransformStep]]] = []
        for ln, tag in lines[1:]:
            kw, _, rest = ln.partition(" ")
            if kw == "alpha":
                alpha = parse(rest, t)
            elif kw == "beta":
                beta = parse(rest, t)
            elif kw == "block":
                blocks.append((parse(rest.partition(" ")[2], t), []))
            elif kw in (CONJ, COMM):
                blocks[-1][1].append(TransformStep(kw, parse(rest, t), tag))
            else:
                raise ValueError(f"bad map line: {ln!r}")
        if alpha is None or beta is None:
            raise ValueError("map text needs alpha and beta lines")
        return cls(t, m, alpha, beta, tuple(Block(c, tuple(s)) for c, s in blocks))


def beta_components(beta: Permutation) -> list[Permutation]:
    """Odd cycles of ``beta`` on their own, even-length cycles in adjacent pairs."""
    t = beta.degree
    comps: list[Permutation] = []
    pending: tuple[int, ...] | None = None
    for c in decompose(beta).cycles:
        if len(c) % 2:
            comps.append(Permutation.from_cycles([c], t))
        elif pending is None:
            pending = c
        else:
            comps.append(Permutation.from_cycles([pending, c], t))
            pending = None
    if pending is not None:
        raise OddPermutation(f"{beta} has an odd number of even-length cycles")
    return comps


def build_alpha_to_beta(alpha: Permutation, beta: Permutation, m: int) -> VectorMap:
    """A 1-local map on length-``m`` vectors sending alpha-products to beta-products and id to id."""
    t = alpha.degree
    if beta.degree != t:
        raise DegreeMismatch(f"degrees {t} and {beta.degree} differ")
    if t % 4 != 2:
        raise DegreeNotTwoModFour(f"degree {t} is not 2 mod 4")
    if alpha.is_identity() or beta.is_identity():
        raise IdentityElement("alpha and beta must differ from the identity")
    if not (is_even(alpha) and is_even(beta)):
        raise OddPermutation("alpha and beta must be even")
    if m < 1:
        raise LengthMismatch("input length must be at least 1")
    if alpha == beta:
        return VectorMap(t, m, alpha, beta, (Block(beta, ()),))
    blocks = tuple(Block(comp, convert(alpha, comp).steps) for comp in beta_components(beta))
    return VectorMap(t, m, alpha, beta, blocks)


def apply_vector_map(f: VectorMap, x: ProductVector) -> ProductVector:
    if len(x) != f.input_length:
        raise LengthMismatch(f"map expects length {f.input_length}, got {len(x)}")
    if x.degree != f.degree:
        raise DegreeMismatch(f"map has degree {f.degree}, vector has {x.degree}")
    out: ProductVector | None = None
    for b in f.blocks:
        part = lift_steps(x, b.steps)
        out = part if out is None else out + part
    assert out is not None
    return out

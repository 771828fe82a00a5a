"""Rewriting one even permutation into another with conjugations and commutators.

A script is an ordered list of steps, each ``Conj(g): a -> g^-1 a g`` or
``Comm(g): a -> [a, g]`` with ``g`` even.  Both step kinds fix the
identity, which is what lets scripts be lifted to vector maps later.

The pipeline used by :func:`convert`:

1. :func:`to_double_transposition` -- two commutators reach some ``(a b)(c d)``;
2. :func:`grow_transpositions` -- grow to the needed number of transpositions;
3. :func:`build_odd_cycle` / :func:`build_even_cycle_pair` -- merge them into
   the requested cycle shape, landing on the exact target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    BadSourceShape,
    BadTargetShape,
    DegreeMismatch,
    DegreeNotTwoModFour,
    DegreeTooSmall,
    IdentityInput,
    NoFreshPoints,
    NotTranspositionProduct,
    OddGamma,
    OddPermutation,
    TargetTooLarge,
    UnsupportedTarget,
)
from .perm import (
    Permutation,
    commutator,
    compose,
    conjugate,
    conjugator_in_A,
    conjugator_in_S,
    decompose,
    format_cycles,
    inverse,
    is_even,
    moved_points,
    parse,
)

CONJ = "conj"
COMM = "comm"

# Worst case of comm_count(convert(a, b)) - ceil(log2 t), measured by
# scripts/calibrate_constants.py over exhaustive t=6 and random t=10, 14 runs.
C_SCRIPT = 1


@dataclass(frozen=True)
class TransformStep:
    kind: str
    gamma: Permutation
    tag: str = ""

    def __post_init__(self):
        if self.kind not in (CONJ, COMM):
            raise ValueError(f"unknown step kind {self.kind!r}")
        if not is_even(self.gamma):
            raise OddGamma(f"step gamma {self.gamma} is odd")

    def __call__(self, a: Permutation) -> Permutation:
        if self.kind == CONJ:
            return conjugate(a, self.gamma)
        return commutator(a, self.gamma)

    def __str__(self) -> str:
        return f"{self.kind} {format_cycles(self.gamma)}"


@dataclass(frozen=True)
class TransformScript:
    degree: int
    source: Permutation
    target: Permutation
    steps: tuple[TransformStep, ...] = field(default_factory=tuple)

    @property
    def step_tags(self) -> tuple[str, ...]:
        return tuple(s.tag for s in self.steps)

    @property
    def comm_count(self) -> int:
        return comm_count(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def dumps(self) -> str:
        lines = [
            f"# degree {self.degree}",
            f"source {format_cycles(self.source)}",
            f"target {format_cycles(self.target)}",
        ]
        for s in self.steps:
            lines.append(f"{s}" + (f"  # {s.tag}" if s.tag else ""))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "TransformScript":
        degree = None
        source = target = None
        steps = []
        for raw in text.splitlines():
            line, _, comment = raw.partition("#")
            line = line.strip()
            if not line:
                head = comment.strip().split()
                if len(head) == 2 and head[0] == "degree":
                    degree = int(head[1])
                continue
            if degree is None:
                raise ValueError("script text is missing its '# degree t' header")
            kw, _, rest = line.partition(" ")
            if kw == "source":
                source = parse(rest, degree)
            elif kw == "target":
                target = parse(rest, degree)
            elif kw in (CONJ, COMM):
                steps.append(TransformStep(kw, parse(rest, degree), comment.strip()))
            else:
                raise ValueError(f"bad script line: {raw!r}")
        if source is None or target is None:
            raise ValueError("script text needs source and target lines")
        return cls(degree, source, target, tuple(steps))


def comm_count(steps: Iterable[TransformStep]) -> int:
    return sum(1 for s in steps if s.kind == COMM)


def apply_script(a: Permutation, script: TransformScript | Sequence[TransformStep]) -> Permutation:
    """Fold the steps over ``a``, first step first."""
    steps = script.steps if isinstance(script, TransformScript) else script
    if isinstance(script, TransformScript) and script.degree != a.degree:
        raise DegreeMismatch(f"script degree {script.degree} != {a.degree}")
    for s in steps:
        if s.gamma.degree != a.degree:
            raise DegreeMismatch(f"step degree {s.gamma.degree} != {a.degree}")
        a = s(a)
    return a


def _script(source: Permutation, steps: list[TransformStep]) -> TransformScript:
    target = apply_script(source, steps)
    return TransformScript(source.degree, source, target, tuple(steps))


def _fresh(used: set[int], t: int, n: int) -> list[int]:
    """The ``n`` smallest points of [t] outside ``used``; marks them used."""
    out = []
    for p in range(1, t + 1):
        if len(out) == n:
            break
        if p not in used:
            out.append(p)
    if len(out) < n:
        raise NoFreshPoints(f"need {n} fresh points in [{t}], only {len(out)} left")
    used.update(out)
    return out


def _cyc(t: int, *cycles: Sequence[int]) -> Permutation:
    return Permutation.from_cycles(cycles, t)


def _transpositions(a: Permutation) -> list[tuple[int, int]] | None:
    cycles = decompose(a).cycles
    if any(len(c) != 2 for c in cycles):
        return None
    return [(c[0], c[1]) for c in cycles]


def _is_double_transposition(a: Permutation) -> bool:
    return decompose(a).cycle_type == (2, 2)


# -- stage 1 ----------------------------------------------------------------

def _double_transposition_step(a: Permutation) -> TransformStep:
    """One commutator taking ``a`` to a double transposition (or a 3-cycle in the long-cycle case)."""
    t = a.degree
    cycles = decompose(a).cycles
    by_len: dict[int, list[tuple[int, ...]]] = {}
    for c in cycles:
        by_len.setdefault(len(c), []).append(c)
    twos = by_len.get(2, [])
    threes = by_len.get(3, [])
    if len(twos) >= 2:
        (p, q), (r, _) = twos[0], twos[1]
        return TransformStep(COMM, _cyc(t, (p, q, r)), "double-transposition")
    if len(cycles) == 1 and len(threes) == 1:
        p, q, r = threes[0]
        (d,) = _fresh({p, q, r}, t, 1)
        return TransformStep(COMM, _cyc(t, (p, q), (r, d)), "3-cycle")
    if len(threes) >= 2:
        (p, _, r), (d, _, f) = threes[0], threes[1]
        return TransformStep(COMM, _cyc(t, (p, d), (r, f)), "two 3-cycles")
    if 4 in by_len:
        p, q, r, s = by_len[4][0]
        return TransformStep(COMM, _cyc(t, (p, q), (r, s)), "4-cycle")
    longs = [c for c in cycles if len(c) >= 5]
    if longs:
        c = longs[0]
        return TransformStep(COMM, _cyc(t, (c[1], c[2], c[3])), "long cycle")
    raise AssertionError(f"no case applies to {a}")  # unreachable for even a != id


def to_double_transposition(a: Permutation) -> TransformScript:
    """Exactly two commutators taking ``a != id`` in A_t to a double transposition."""
    if a.degree < 4:
        raise DegreeTooSmall(f"need t >= 4, got {a.degree}")
    if a.is_identity():
        raise IdentityInput("the identity cannot be rewritten")
    if not is_even(a):
        raise OddPermutation(f"{a} is odd")
    first = _double_transposition_step(a)
    mid = first(a)
    if _is_double_transposition(mid):
        # pad with the rewrite [(p q)(r s), (p q r)] = (p s)(q r)
        (p, q), (r, _) = decompose(mid).cycles
        second = TransformStep(COMM, _cyc(a.degree, (p, q, r)), "pad")
    else:
        second = _double_transposition_step(mid)
    return _script(a, [first, second])


# -- stage 2 ----------------------------------------------------------------

def grow_transpositions(a: Permutation, k: int) -> TransformScript:
    """Commutators taking a product of ``j >= 2`` disjoint transpositions to one of ``k``.

    Transpositions are handled in consecutive pairs.  Each step doubles
    ``min(j, k - j) / 2`` pairs with ``(a e)(b f)(c g)(d h)`` on fresh points
    and keeps the remaining pairs alive with ``(a b c)``.
    """
    t = a.degree
    trans = _transpositions(a)
    if trans is None or len(trans) < 2:
        raise NotTranspositionProduct(f"{a} is not a product of >= 2 disjoint transpositions")
    j = len(trans)
    if k % 2 or k < j:
        raise BadTargetShape(f"target count {k} must be even and >= {j}")
    if 2 * k > t:
        raise TargetTooLarge(f"{k} transpositions do not fit in degree {t}")
    steps = []
    cur = a
    while j < k:
        trans = _transpositions(cur)
        used = set(moved_points(cur))
        ndouble = min(j, k - j) // 2
        cycles = []
        for n in range(0, j, 2):
            (p, q), (r, s) = trans[n], trans[n + 1]
            if n // 2 < ndouble:
                e, f, g, h = _fresh(used, t, 4)
                cycles += [(p, e), (q, f), (r, g), (s, h)]
            else:
                cycles.append((p, q, r))
        step = TransformStep(COMM, _cyc(t, *cycles), f"grow {j}->{j + 2 * ndouble}")
        steps.append(step)
        cur = step(cur)
        j += 2 * ndouble
    return _script(a, steps)


# -- stage 3 ----------------------------------------------------------------

def _odd_cycle_count(k: int) -> int:
    """Transposition count feeding a k-cycle: (k-1)/2 or (k-3)/2, whichever is even."""
    return (k - 1) // 2 if (k - 1) // 2 % 2 == 0 else (k - 3) // 2


def _even_pair_count(k: int) -> int:
    return k // 2 if k // 2 % 2 == 0 else k // 2 - 1


def _merge_gamma(t: int, trans: Sequence[tuple[int, int]], c: int) -> Permutation:
    """``(a1 b1 a2 b2 ... c)``: commutating with it merges the transpositions into one cycle."""
    return _cyc(t, [p for pair in trans for p in pair] + [c])


def _commutator_partner(a: Permutation, target: Permutation) -> Permutation:
    """Even ``g`` with ``g a^-1 g^-1 == target``, so that ``[a, g] == a * target``."""
    return inverse(conjugator_in_A(inverse(a), target))


def build_odd_cycle(a: Permutation, beta: Permutation) -> TransformScript:
    """``[Conj g1, Comm g2]`` or ``[Conj g1, Comm g2, Comm g3]`` taking ``a`` to the odd cycle ``beta``.

    The leading conjugation moves ``a`` onto the transposition product the
    commutators expect, which also avoids the split classes of long cycles.
    """
    t = a.degree
    if t % 2:
        raise BadTargetShape(f"degree must be even, got {t}")
    cycles = decompose(beta).cycles
    if len(cycles) != 1 or len(cycles[0]) % 2 == 0 or not 5 <= len(cycles[0]) <= t - 1:
        raise BadTargetShape(f"{beta} is not a single odd cycle of length 5..{t - 1}")
    p = cycles[0]
    k = len(p)
    need = _odd_cycle_count(k)
    trans = _transpositions(a)
    if trans is None or len(trans) != need:
        raise BadSourceShape(f"{a} should be a product of {need} disjoint transpositions")

    if need == (k - 1) // 2:
        # [(a1 b1)...(ak' bk'), (a1 b1 ... ak' bk' c)] = (a1 ... ak' bk' ... b1 c)
        a_pts = p[:need]
        b_pts = p[need:2 * need][::-1]
        std_trans = list(zip(a_pts, b_pts))
        std = _cyc(t, *std_trans)
        comms = [TransformStep(COMM, _merge_gamma(t, std_trans, p[-1]), "odd cycle")]
    else:
        # Build on placeholder points, then relabel so the result is exactly beta.
        m = k - 2
        std0_trans = [(2 * i + 1, 2 * i + 2) for i in range(need)]
        std0 = _cyc(t, *std0_trans)
        g2 = _merge_gamma(t, std0_trans, m)
        mu = commutator(std0, g2)
        (mc,) = decompose(mu).cycles
        c1, c2, c3 = m + 1, m + 2, m + 3
        pi = _cyc(t, (mc[0], c1, c2, c3, *mc[2:m - 3], mc[1]))
        g3 = _commutator_partner(mu, pi)
        rho = commutator(mu, g3)
        assert rho == compose(mu, pi) and decompose(rho).cycle_type == (k,)
        r = conjugator_in_S(rho, beta)
        std = conjugate(std0, r)
        comms = [
            TransformStep(COMM, conjugate(g2, r), "odd cycle (k-2)"),
            TransformStep(COMM, conjugate(g3, r), "odd cycle extend"),
        ]
    g1 = conjugator_in_A(a, std)
    return _script(a, [TransformStep(CONJ, g1, "align source"), *comms])


def build_even_cycle_pair(a: Permutation, beta: Permutation) -> TransformScript:
    """``[Comm g1, Conj g2]`` taking ``a`` to ``beta``, a product of two even-length cycles."""
    t = a.degree
    if t % 4 != 2:
        raise DegreeNotTwoModFour(f"degree {t} is not 2 mod 4")
    cycles = decompose(beta).cycles
    if len(cycles) != 2 or any(len(c) % 2 for c in cycles):
        raise BadTargetShape(f"{beta} is not a product of two even-length cycles")
    k1, k2 = sorted(len(c) for c in cycles)
    k = k1 + k2
    need = _even_pair_count(k)
    trans = _transpositions(a)
    if trans is None or len(trans) != need:
        raise BadSourceShape(f"{a} should be a product of {need} disjoint transpositions")

    if (k1, k2) == (2, 2):
        return _script(a, [TransformStep(CONJ, conjugator_in_A(a, beta), "align pair")])

    used = set(moved_points(a))
    e1, e2 = _fresh(used, t, 2)
    if (k1, k2) == (2, 4):
        # (a b)(c d) * (c e)(d f) = (a b)(c f d e)
        (_, _), (c, d) = trans
        pi = _cyc(t, (c, e1), (d, e2))
    else:
        h1, h2 = k1 // 2, k2 // 2
        A = [x for x, _ in trans[:h1]]
        B = [y for _, y in trans[:h1]]
        C = [x for x, _ in trans[h1:]]
        D = [y for _, y in trans[h1:]]
        pi_cycles = [(A[i + 1], B[i]) for i in range(h1 - 1)]
        if need == k // 2:
            pi_cycles += [(C[i + 1], D[i]) for i in range(h2 - 2)]
            pi_cycles += [(D[h2 - 2], e1), (C[h2 - 1], D[h2 - 1]), (C[0], e2)]
        else:
            pi_cycles += [(C[i + 1], D[i]) for i in range(h2 - 3)]
            pi_cycles += [(C[0], C[h2 - 2]), (D[h2 - 3], e1), (D[h2 - 2], e2)]
        pi = _cyc(t, *pi_cycles)
    g1 = _commutator_partner(a, pi)
    rho = commutator(a, g1)
    assert decompose(rho).cycle_type == (k1, k2)
    g2 = conjugator_in_A(rho, beta)
    return _script(a, [TransformStep(COMM, g1, "even pair"), TransformStep(CONJ, g2, "align pair")])


# -- full conversion --------------------------------------------------------

def target_kind(beta: Permutation) -> str:
    """Classify a conversion target: 'odd', 'even-pair', '3-cycle' or 'unsupported'."""
    ct = decompose(beta).cycle_type
    if len(ct) == 1 and ct[0] == 3:
        return "3-cycle"
    if len(ct) == 1 and ct[0] % 2 == 1:
        return "odd"
    if len(ct) == 2 and ct[0] % 2 == 0 and ct[1] % 2 == 0:
        return "even-pair"
    return "unsupported"


def convert(a: Permutation, beta: Permutation) -> TransformScript:
    """A script taking ``a != id`` to ``beta`` in A_t, ``t = 2 (mod 4)``.

    ``beta`` must be one odd cycle or a product of two even-length cycles.
    """
    t = a.degree
    if beta.degree != t:
        raise DegreeMismatch(f"degrees {t} and {beta.degree} differ")
    if t % 4 != 2:
        raise DegreeNotTwoModFour(f"degree {t} is not 2 mod 4")
    if a.is_identity():
        raise IdentityInput("the identity cannot be rewritten")
    if not is_even(a):
        raise OddPermutation(f"{a} is odd")
    kind = target_kind(beta)
    if kind == "unsupported" or not is_even(beta):
        raise UnsupportedTarget(f"cannot target {beta}: need one odd cycle or two even cycles")

    s1 = to_double_transposition(a)
    dt = s1.target
    if kind == "odd":
        s2 = grow_transpositions(dt, _odd_cycle_count(len(decompose(beta).cycles[0])))
        s3 = build_odd_cycle(s2.target, beta).steps
    elif kind == "even-pair":
        s2 = grow_transpositions(dt, _even_pair_count(sum(decompose(beta).cycle_type)))
        s3 = build_even_cycle_pair(s2.target, beta).steps
    else:
        # 3-cycle: go through (1 2 3 4 5), shrink with (2 3 4) to (1 4 3), then conjugate
        five = _cyc(t, (1, 2, 3, 4, 5))
        s2 = grow_transpositions(dt, 2)
        odd = build_odd_cycle(s2.target, five)
        shrink = TransformStep(COMM, _cyc(t, (2, 3, 4)), "shrink to 3-cycle")
        three = shrink(odd.target)
        s3 = (*odd.steps, shrink, TransformStep(CONJ, conjugator_in_A(three, beta), "align 3-cycle"))
    script = _script(a, [*s1.steps, *s2.steps, *s3])
    if script.target != beta:
        raise AssertionError(f"convert produced {script.target}, expected {beta}")
    return script


def comm_budget(t: int) -> int:
    return math.ceil(math.log2(t)) + C_SCRIPT


def embed_degree(t: int) -> int:
    """Smallest ``t' >= t`` with ``t' = 2 (mod 4)``."""
    return t + (2 - t) % 4

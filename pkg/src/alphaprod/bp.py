"""Branching programs and their encoding as a single permutation.

``encode(B, x)`` returns ``sigma`` such that B accepts x iff the points 1 and
``t'`` lie on one cycle of ``sigma``.

Construction: fixing x, every internal node keeps one outgoing edge.  The
graph is a DAG with out-degree <= 1, so as an undirected graph it is a
forest whose trees each contain exactly one sink.  Pendant edges are hung
off the start and accept nodes.  The points of ``sigma`` are the darts
(directed edge sides) of this forest, and ``sigma`` sends the dart ``u->v``
to ``v->w`` where ``w`` follows ``u`` in the sorted cyclic order of v's
neighbours.  Each cycle of ``sigma`` is then the Euler tour of one tree.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import MalformedProgram, PointOutOfRange
from .perm import Permutation


@dataclass(frozen=True)
class Internal:
    var: int  # 1-based input index
    succ0: int
    succ1: int


@dataclass(frozen=True)
class Sink:
    accept: bool


Node = Union[Internal, Sink]


@dataclass(frozen=True)
class BranchingProgram:
    n: int
    start: int
    accept: int
    nodes: tuple[Node, ...]

    def __post_init__(self):
        s = len(self.nodes)
        if not 0 <= self.start < s or not 0 <= self.accept < s:
            raise MalformedProgram("start/accept node out of range")
        sinks = [i for i, nd in enumerate(self.nodes) if isinstance(nd, Sink) and nd.accept]
        if sinks != [self.accept]:
            raise MalformedProgram(f"need exactly one accept sink at node {self.accept}, found {sinks}")
        for i, nd in enumerate(self.nodes):
            if isinstance(nd, Internal):
                if not 1 <= nd.var <= self.n:
                    raise MalformedProgram(f"node {i} reads variable {nd.var} outside [1, {self.n}]")
                if not (0 <= nd.succ0 < s and 0 <= nd.succ1 < s):
                    raise MalformedProgram(f"node {i} has a successor out of range")
        if self.topological_order() is None:
            raise MalformedProgram("successor graph has a cycle")

    @property
    def size(self) -> int:
        return len(self.nodes)

    def topological_order(self) -> list[int] | None:
        s = len(self.nodes)
        indeg = [0] * s
        for nd in self.nodes:
            if isinstance(nd, Internal):
                for v in {nd.succ0, nd.succ1}:
                    indeg[v] += 1
        order = [i for i in range(s) if indeg[i] == 0]
        for u in order:
            nd = self.nodes[u]
            if isinstance(nd, Internal):
                for v in {nd.succ0, nd.succ1}:
                    indeg[v] -= 1
                    if indeg[v] == 0:
                        order.append(v)
        return order if len(order) == s else None

    def dumps(self) -> str:
        lines = [f"bp {self.size} {self.n} {self.start} {self.accept}"]
        for i, nd in enumerate(self.nodes):
            if isinstance(nd, Internal):
                lines.append(f"{i} {nd.var} {nd.succ0} {nd.succ1}")
            else:
                lines.append(f"{i} sink {'accept' if nd.accept else 'reject'}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "BranchingProgram":
        lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise MalformedProgram("empty program text")
        head = lines[0].split()
        if len(head) != 5 or head[0] != "bp":
            raise MalformedProgram(f"bad header {lines[0]!r}; expected 'bp s n start accept'")
        s, n, start, accept = map(int, head[1:])
        nodes: list[Node | None] = [None] * s
        for ln in lines[1:]:
            parts = ln.split()
            i = int(parts[0])
            if not 0 <= i < s or nodes[i] is not None:
                raise MalformedProgram(f"bad or duplicate node id in {ln!r}")
            if parts[1] == "sink":
                if len(parts) != 3 or parts[2] not in ("accept", "reject"):
                    raise MalformedProgram(f"bad sink line {ln!r}")
                nodes[i] = Sink(parts[2] == "accept")
            else:
                if len(parts) != 4:
                    raise MalformedProgram(f"bad node line {ln!r}")
                nodes[i] = Internal(int(parts[1]), int(parts[2]), int(parts[3]))
        missing = [i for i, nd in enumerate(nodes) if nd is None]
        if missing:
            raise MalformedProgram(f"nodes {missing} not defined")
        return cls(n, start, accept, tuple(nodes))  # type: ignore[arg-type]

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:12]


def _bits(x: Union[str, Sequence[int]], n: int) -> list[int]:
    bits = [int(c) for c in x]
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise MalformedProgram(f"input must be {n} bits, got {x!r}")
    return bits


def successor(B: BranchingProgram, node: int, bits: Sequence[int]) -> int | None:
    nd = B.nodes[node]
    if isinstance(nd, Sink):
        return None
    return nd.succ1 if bits[nd.var - 1] else nd.succ0


def eval_bp(B: BranchingProgram, x: Union[str, Sequence[int]]) -> bool:
    """True iff following x from the start node ends in the accept sink."""
    bits = _bits(x, B.n)
    node = B.start
    for _ in range(B.size):
        nxt = successor(B, node, bits)
        if nxt is None:
            return node == B.accept
        node = nxt
    raise MalformedProgram("evaluation did not terminate")


@dataclass(frozen=True)
class EncodedInstance:
    sigma: Permutation
    start_point: int
    accept_point: int
    darts: tuple[tuple[int, int], ...]  # darts[p - 1] = (tail, head); -1/-2 are the pendant nodes

    @property
    def degree(self) -> int:
        return self.sigma.degree

    def accepts(self) -> bool:
        return same_cycle(self.sigma, self.start_point, self.accept_point)


START_PENDANT = -1
ACCEPT_PENDANT = -2


def encode(B: BranchingProgram, x: Union[str, Sequence[int]]) -> EncodedInstance:
    bits = _bits(x, B.n)
    edges = []
    for u in range(B.size):
        v = successor(B, u, bits)
        if v is not None:
            edges.append((u, v))
    edges.append((START_PENDANT, B.start))
    edges.append((ACCEPT_PENDANT, B.accept))

    _check_forest(B, edges)

    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for nbrs in adj.values():
        nbrs.sort()

    # the two designated darts get points 1 and t'; everything else in between
    first = (START_PENDANT, B.start)
    last = (ACCEPT_PENDANT, B.accept)
    others = sorted(({(u, v) for u, v in edges} | {(v, u) for u, v in edges}) - {first, last})
    darts = [first, *others, last]
    point = {d: i for i, d in enumerate(darts)}
    img = [0] * len(darts)
    for (u, v), i in point.items():
        nbrs = adj[v]
        w = nbrs[(nbrs.index(u) + 1) % len(nbrs)]
        img[i] = point[(v, w)]
    sigma = Permutation(img)
    return EncodedInstance(sigma, 1, len(darts), tuple(darts))


def _check_forest(B: BranchingProgram, edges: list[tuple[int, int]]) -> None:
    parent: dict[int, int] = {}

    def find(a: int) -> int:
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            raise MalformedProgram("projected graph is not a forest")
        parent[ru] = rv
    sinks_per_tree: dict[int, int] = {}
    for i, nd in enumerate(B.nodes):
        if isinstance(nd, Sink):
            r = find(i)
            sinks_per_tree[r] = sinks_per_tree.get(r, 0) + 1
    for i in range(B.size):
        if sinks_per_tree.get(find(i), 0) != 1:
            raise MalformedProgram(f"tree of node {i} does not contain exactly one sink")


def same_cycle(p: Permutation, a: int, b: int) -> bool:
    t = p.degree
    for q in (a, b):
        if not 1 <= q <= t:
            raise PointOutOfRange(f"point {q} outside [1, {t}]")
    cur = a
    while True:
        if cur == b:
            return True
        cur = p(cur)
        if cur == a:
            return False


def random_program(
    rng: np.random.Generator, size: int, n: int, reject_sinks: int = 1
) -> BranchingProgram:
    """A random layered DAG program: node ids increase along every edge.

    Node 0 is the start; the last ``1 + reject_sinks`` nodes are sinks, one of
    them (chosen at random) accepting.
    """
    nsinks = 1 + reject_sinks
    if size < nsinks + 1:
        raise ValueError("program too small for its sinks")
    ninternal = size - nsinks
    accept = ninternal + int(rng.integers(nsinks))
    nodes: list[Node] = []
    for i in range(ninternal):
        var = int(rng.integers(1, n + 1))
        s0, s1 = (int(v) for v in rng.integers(i + 1, size, 2))
        nodes.append(Internal(var, s0, s1))
    for i in range(ninternal, size):
        nodes.append(Sink(i == accept))
    return BranchingProgram(n, 0, accept, tuple(nodes))

"""Directed weighted hypergraphs with multiset tails.

A :class:`Hypergraph` is an immutable value. Nodes are dense integer indices
``0..n-1`` carrying unique display labels (``"1".."n"`` by default). Each
:class:`Hyperedge` has a tail multiset stored as sorted ``(node, multiplicity)``
pairs, a head set stored as a sorted tuple, and an exact rational weight.

All functions here are pure: operations that "modify" a hypergraph return a
new one.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

from .exceptions import (
    DuplicateEdgeId,
    EmptyHead,
    EmptyTail,
    HeadOverlap,
    InvalidPartition,
    NonPositiveMultiplicity,
    TailMismatch,
    UnknownEdge,
    UnknownNode,
    WeightMismatch,
)

NodeRef = Union[int, str]
Tail = tuple[tuple[int, int], ...]

__all__ = [
    "Hyperedge",
    "Hypergraph",
    "IncidenceDigraph",
    "as_fraction",
    "build_hypergraph",
    "backward_star",
    "forward_star",
    "tail_cardinalities",
    "normalize_heads",
    "split_edge_head",
    "combine_edges",
    "constituent",
    "incidence_digraph",
    "is_connected",
]


def as_fraction(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Strings may be integers, decimals or ``p/q``; floats are read through
    their shortest decimal repr so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite weight {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational number")


@dataclass(frozen=True)
class Hyperedge:
    id: str
    tail: Tail
    head: tuple[int, ...]
    weight: Fraction = Fraction(1)

    @property
    def cardinality(self) -> int:
        """Tail cardinality k(e), counting multiplicity."""
        return sum(m for _, m in self.tail)

    def tail_nodes(self) -> list[int]:
        """Tail as a flat list, each node repeated by its multiplicity."""
        return [v for v, m in self.tail for _ in range(m)]

    def multiplicity(self, node: int) -> int:
        for v, m in self.tail:
            if v == node:
                return m
        return 0


@dataclass(frozen=True)
class Hypergraph:
    labels: tuple[str, ...]
    edges: tuple[Hyperedge, ...] = ()
    _label_index: dict = field(init=False, repr=False, compare=False, hash=False)
    _edge_index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_label_index", {lab: i for i, lab in enumerate(self.labels)})
        object.__setattr__(self, "_edge_index", {e.id: j for j, e in enumerate(self.edges)})

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def nodes(self) -> range:
        return range(len(self.labels))

    def node(self, ref: NodeRef) -> int:
        """Resolve a node reference: ``str`` is a label, ``int`` a 0-based index."""
        if isinstance(ref, str):
            try:
                return self._label_index[ref]
            except KeyError:
                raise UnknownNode(f"no node labelled {ref!r}") from None
        if isinstance(ref, bool) or not isinstance(ref, int):
            raise UnknownNode(f"invalid node reference {ref!r}")
        if not 0 <= ref < self.n:
            raise UnknownNode(f"node index {ref} out of range 0..{self.n - 1}")
        return ref

    def edge(self, edge_id: str) -> Hyperedge:
        try:
            return self.edges[self._edge_index[edge_id]]
        except KeyError:
            raise UnknownEdge(f"no hyperedge with id {edge_id!r}") from None

    def edge_position(self, edge_id: str) -> int:
        self.edge(edge_id)
        return self._edge_index[edge_id]

    def __repr__(self):
        return f"Hypergraph(n={self.n}, m={self.m})"


def _normalize_tail(H_labels: dict, n: int, tail) -> Tail:
    counts: dict[int, int] = {}
    if isinstance(tail, Mapping):
        items = list(tail.items())
    else:
        items = []
        for entry in tail:
            if isinstance(entry, (tuple, list)) and len(entry) == 2:
                items.append((entry[0], entry[1]))
            else:
                items.append((entry, 1))
    for ref, mult in items:
        v = _resolve(H_labels, n, ref)
        if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
            raise NonPositiveMultiplicity(f"multiplicity of {ref!r} must be a positive integer, got {mult!r}")
        counts[v] = counts.get(v, 0) + mult
    if not counts:
        raise EmptyTail("hyperedge tail must be nonempty")
    return tuple(sorted(counts.items()))


def _resolve(label_index: dict, n: int, ref) -> int:
    if isinstance(ref, str):
        if ref in label_index:
            return label_index[ref]
        raise UnknownNode(f"no node labelled {ref!r}")
    if isinstance(ref, int) and not isinstance(ref, bool) and 0 <= ref < n:
        return ref
    raise UnknownNode(f"unknown node {ref!r}")


def build_hypergraph(nodes: Union[int, Sequence[str]], edges: Iterable = ()) -> Hypergraph:
    """Validate and build a :class:`Hypergraph`.

    ``nodes`` is either a count (labels become ``"1".."n"``) or a sequence of
    unique labels. Each edge is a :class:`Hyperedge`, a mapping with keys
    ``tail``, ``head`` and optional ``weight``/``id``, or a tuple
    ``(tail, head[, weight[, id]])``. Tails may be a list of node references
    (repeats add multiplicity), a list of ``(node, multiplicity)`` pairs or a
    mapping node -> multiplicity. String references are labels, integers are
    0-based indices. Missing ids become ``e1, e2, ...`` by position.
    """
    if isinstance(nodes, int):
        labels = tuple(str(i + 1) for i in range(nodes))
    else:
        labels = tuple(str(lab) for lab in nodes)
    if len(set(labels)) != len(labels):
        raise ValueError("node labels must be unique")
    label_index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)

    built: list[Hyperedge] = []
    seen: set[str] = set()
    for pos, raw in enumerate(edges):
        if isinstance(raw, Hyperedge):
            tail, head, weight, eid = (
                [(v, m) for v, m in raw.tail],
                list(raw.head),
                raw.weight,
                raw.id,
            )
        elif isinstance(raw, Mapping):
            tail, head = raw.get("tail", ()), raw.get("head", ())
            weight, eid = raw.get("weight", 1), raw.get("id")
        else:
            raw = tuple(raw)
            tail, head = raw[0], raw[1]
            weight = raw[2] if len(raw) > 2 else 1
            eid = raw[3] if len(raw) > 3 else None
        eid = f"e{pos + 1}" if eid is None else str(eid)
        if eid in seen:
            raise DuplicateEdgeId(f"duplicate hyperedge id {eid!r}")
        seen.add(eid)
        tail_t = _normalize_tail(label_index, n, tail)
        head_set = {_resolve(label_index, n, h) for h in head}
        if not head_set:
            raise EmptyHead(f"hyperedge {eid!r} has an empty head")
        built.append(Hyperedge(eid, tail_t, tuple(sorted(head_set)), as_fraction(weight)))
    return Hypergraph(labels, tuple(built))


def backward_star(H: Hypergraph, c: NodeRef, k: int | None = None) -> list[Hyperedge]:
    """Edges whose head contains ``c`` (restricted to tail cardinality ``k``), in edge order."""
    v = H.node(c)
    return [e for e in H.edges if v in e.head and (k is None or e.cardinality == k)]


def forward_star(H: Hypergraph, c: NodeRef) -> list[Hyperedge]:
    v = H.node(c)
    return [e for e in H.edges if e.multiplicity(v) > 0]


def tail_cardinalities(H: Hypergraph, c: NodeRef | None = None) -> frozenset[int]:
    """B(c) for a node, or B(H) over the whole hypergraph when ``c`` is None."""
    if c is None:
        return frozenset(e.cardinality for e in H.edges)
    return frozenset(e.cardinality for e in backward_star(H, c))


def _fresh_id(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    i = 2
    while f"{base}~{i}" in taken:
        i += 1
    return f"{base}~{i}"


def normalize_heads(H: Hypergraph) -> Hypergraph:
    """Replace every edge with an r-element head by r single-head copies of equal weight.

    Single-head edges keep their ids; split edges get ids ``<id>@<label>``.
    Idempotent.
    """
    if all(len(e.head) == 1 for e in H.edges):
        return H
    taken = {e.id for e in H.edges if len(e.head) == 1}
    out = []
    for e in H.edges:
        if len(e.head) == 1:
            out.append(e)
            continue
        for v in e.head:
            new_id = _fresh_id(f"{e.id}@{H.labels[v]}", taken)
            taken.add(new_id)
            out.append(Hyperedge(new_id, e.tail, (v,), e.weight))
    return Hypergraph(H.labels, tuple(out))


def split_edge_head(H: Hypergraph, edge_id: str, parts: Sequence[Iterable[NodeRef]]) -> Hypergraph:
    """Split edge ``edge_id`` along a disjoint cover ``parts`` of its head.

    The new edges take the old edge's position, in the order of ``parts``,
    with ids ``<id>.1, <id>.2, ...``.
    """
    pos = H.edge_position(edge_id)
    e = H.edges[pos]
    resolved = [frozenset(H.node(v) for v in part) for part in parts]
    if not resolved or any(not p for p in resolved):
        raise InvalidPartition("split parts must be nonempty")
    union: set[int] = set()
    for p in resolved:
        if union & p:
            raise InvalidPartition("split parts must be pairwise disjoint")
        union |= p
    if union != set(e.head):
        raise InvalidPartition(f"split parts must cover the head of {edge_id!r} exactly")
    taken = {x.id for x in H.edges if x.id != edge_id}
    pieces = []
    for l, p in enumerate(resolved, start=1):
        new_id = _fresh_id(f"{e.id}.{l}", taken)
        taken.add(new_id)
        pieces.append(Hyperedge(new_id, e.tail, tuple(sorted(p)), e.weight))
    return Hypergraph(H.labels, H.edges[:pos] + tuple(pieces) + H.edges[pos + 1:])


def combine_edges(H: Hypergraph, first: str, second: str, new_id: str | None = None) -> Hypergraph:
    """Merge two edges with equal tails, equal weights and disjoint heads.

    The merged edge replaces ``first``; ``second`` is removed.
    """
    if first == second:
        raise HeadOverlap("cannot combine an edge with itself")
    i, j = H.edge_position(first), H.edge_position(second)
    a, b = H.edges[i], H.edges[j]
    if a.tail != b.tail:
        raise TailMismatch(f"tails of {first!r} and {second!r} differ")
    if set(a.head) & set(b.head):
        raise HeadOverlap(f"heads of {first!r} and {second!r} overlap")
    if a.weight != b.weight:
        raise WeightMismatch(f"weights of {first!r} and {second!r} differ ({a.weight} != {b.weight})")
    taken = {x.id for x in H.edges if x.id not in (first, second)}
    merged_id = new_id if new_id is not None else _fresh_id(f"{first}+{second}", taken)
    if merged_id in taken:
        raise DuplicateEdgeId(f"duplicate hyperedge id {merged_id!r}")
    merged = Hyperedge(merged_id, a.tail, tuple(sorted(set(a.head) | set(b.head))), a.weight)
    edges = [merged if p == i else x for p, x in enumerate(H.edges) if p != j]
    return Hypergraph(H.labels, tuple(edges))


def constituent(H: Hypergraph, k: int) -> Hypergraph:
    """Same nodes, only the edges with tail cardinality ``k``; may be empty or disconnected."""
    return Hypergraph(H.labels, tuple(e for e in H.edges if e.cardinality == k))


@dataclass(frozen=True)
class IncidenceDigraph:
    """Weighted incidence digraph of a hypergraph.

    ``W`` is n x m (node row, edge column: the edge weight when the node is in
    the head), ``T`` is m x n (edge row, node column: tail multiplicity), and
    ``A`` is the (n+m) square block matrix ``[[0, W], [T, 0]]``. Entries are
    :class:`~fractions.Fraction` (``T`` entries are ``int``).
    """

    n: int
    m: int
    W: tuple[tuple[Fraction, ...], ...]
    T: tuple[tuple[int, ...], ...]
    A: tuple[tuple[Fraction, ...], ...]

    def to_numpy(self):
        import numpy as np

        return np.array([[float(x) for x in row] for row in self.A], dtype=float).reshape(
            self.n + self.m, self.n + self.m
        )


def incidence_digraph(H: Hypergraph) -> IncidenceDigraph:
    n, m = H.n, H.m
    zero = Fraction(0)
    W = [[zero] * m for _ in range(n)]
    T = [[0] * n for _ in range(m)]
    for j, e in enumerate(H.edges):
        for v in e.head:
            W[v][j] = e.weight
        for v, mult in e.tail:
            T[j][v] = mult
    A = [[zero] * (n + m) for _ in range(n + m)]
    for i in range(n):
        for j in range(m):
            A[i][n + j] = W[i][j]
    for j in range(m):
        for i in range(n):
            A[n + j][i] = Fraction(T[j][i])
    return IncidenceDigraph(
        n,
        m,
        tuple(map(tuple, W)),
        tuple(map(tuple, T)),
        tuple(map(tuple, A)),
    )


def is_connected(H: Hypergraph) -> bool:
    """Weak connectivity of the undirected node/edge incidence graph, over all nodes."""
    if H.n == 0:
        return True
    adj: list[set[int]] = [set() for _ in range(H.n)]
    for e in H.edges:
        members = {v for v, _ in e.tail} | set(e.head)
        for v in members:
            adj[v] |= members
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == H.n

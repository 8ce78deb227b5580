"""Balanced equivalence relations, quotients and the incidence-digraph correspondence.

Pattern weights are compared as maps in which a pattern with zero total
weight is the same as an absent pattern. Weights may be negative, so edges
can cancel; a cancelled pattern contributes nothing to any admissible
vector field, and this convention keeps balance equivalent both to
invariance under the incidence adjacency matrix and to flow-invariance.
The raw tables (:func:`pattern_weights`) still keep zero entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .exceptions import DimensionMismatch, NotBalanced, TooLarge, UnknownEdge
from .hypergraph import (
    Hyperedge,
    Hypergraph,
    NodeRef,
    as_fraction,
    incidence_digraph,
    normalize_heads,
)
from .partition import Partition

__all__ = [
    "DEFAULT_CAP",
    "BalanceResult",
    "BalanceWitness",
    "input_equivalence",
    "pattern_of",
    "pattern_weights",
    "is_balanced",
    "coarsest_balanced",
    "enumerate_balanced",
    "quotient",
    "lift_partition",
    "project_partition",
    "matrix_synchrony_check",
    "coarsest_equitable",
    "enumerate_equitable",
    "balanced_via_incidence",
    "check_cluster_symmetry",
]

DEFAULT_CAP = 12

Pattern = tuple[int, ...]
PatternKey = tuple[int, Pattern]


def _check_ground(H: Hypergraph, part: Partition) -> None:
    if part.size != H.n:
        raise DimensionMismatch(f"partition has {part.size} elements, hypergraph has {H.n} nodes")


def _nonzero(table: dict) -> dict:
    return {k: w for k, w in table.items() if w != 0}


def input_equivalence(H: Hypergraph) -> Partition:
    """Coarsest relation equating cells with equal per-cardinality input weight sums.

    Cells with empty backward stars are all equivalent. A cardinality whose
    edges into a cell cancel to total weight zero counts as absent.
    """
    sums: list[dict[int, Fraction]] = [{} for _ in range(H.n)]
    for e in H.edges:
        k = e.cardinality
        for v in e.head:
            sums[v][k] = sums[v].get(k, Fraction(0)) + e.weight
    keys = [tuple(sorted(_nonzero(s).items())) for s in sums]
    return Partition.from_labels(keys)


def pattern_of(H: Hypergraph, part: Partition, e: Union[Hyperedge, str]) -> Pattern:
    """Class-multiplicity vector of the tail of ``e`` (class order = canonical order)."""
    _check_ground(H, part)
    if isinstance(e, str):
        e = H.edge(e)
    elif e not in H.edges:
        raise UnknownEdge(f"hyperedge {e.id!r} is not part of this hypergraph")
    counts = [0] * part.n_classes
    for v, m in e.tail:
        counts[part.labels[v]] += m
    return tuple(counts)


def pattern_weights(H: Hypergraph, part: Partition) -> list[dict[PatternKey, Fraction]]:
    """Per node, ``(k, pattern) -> summed weight`` over its backward star.

    Keys appear in order of first occurrence in the edge list; zero totals are kept.
    """
    _check_ground(H, part)
    table: list[dict[PatternKey, Fraction]] = [{} for _ in range(H.n)]
    for e in H.edges:
        key = (e.cardinality, pattern_of(H, part, e))
        for v in e.head:
            table[v][key] = table[v].get(key, Fraction(0)) + e.weight
    return table


@dataclass(frozen=True)
class BalanceWitness:
    """Two equivalent cells whose weight for one (k, pattern) differs."""

    cell: int
    other: int
    k: int
    pattern: Pattern
    weight: Fraction
    other_weight: Fraction
    patterns: tuple[PatternKey, ...] = ()
    other_patterns: tuple[PatternKey, ...] = ()


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    witness: Optional[BalanceWitness] = None

    def __bool__(self):
        return self.balanced


def is_balanced(H: Hypergraph, part: Partition) -> BalanceResult:
    """Decide balance exactly; on failure return the first witness in node order."""
    table = pattern_weights(H, part)
    first: dict[int, int] = {}
    for c in H.nodes:
        cls = part.labels[c]
        if cls not in first:
            first[cls] = c
            continue
        r = first[cls]
        a, b = _nonzero(table[r]), _nonzero(table[c])
        if a != b:
            key = min(set(a) ^ set(b) | {k for k in a.keys() & b.keys() if a[k] != b[k]})
            return BalanceResult(
                False,
                BalanceWitness(
                    r, c, key[0], key[1],
                    a.get(key, Fraction(0)), b.get(key, Fraction(0)),
                    tuple(sorted(a)), tuple(sorted(b)),
                ),
            )
    assert part.refines(input_equivalence(H)), "balanced partition must refine input equivalence"
    return BalanceResult(True)


def coarsest_balanced(H: Hypergraph) -> Partition:
    """Fixed point of signature refinement started from input equivalence."""
    part = input_equivalence(H)
    while True:
        table = pattern_weights(H, part)
        sigs = [
            (part.labels[c], tuple(sorted(_nonzero(table[c]).items())))
            for c in H.nodes
        ]
        refined = Partition.from_labels(sigs)
        if refined.n_classes == part.n_classes:
            break
        part = refined
    if not is_balanced(H, part):
        raise RuntimeError("signature refinement reached a fixed point that is not balanced")
    return part


def _placement_order(deps: Sequence[Sequence[int]]) -> list[int]:
    """Greedy order that lets as many elements as possible be checked early."""
    size = len(deps)
    need = [set(d) | {x} for x, d in enumerate(deps)]
    placed: set[int] = set()
    order = []
    while len(order) < size:
        best = min(
            (x for x in range(size) if x not in placed),
            key=lambda x: (-sum(1 for y in range(size) if need[y] <= placed | {x} and not need[y] <= placed), x),
        )
        placed.add(best)
        order.append(best)
    return order


def _backtrack(
    size: int,
    coarse: Partition,
    deps: Sequence[Sequence[int]],
    signature: Callable[[list[int], int], object],
) -> list[Partition]:
    """Enumerate partitions refining ``coarse`` whose classes have equal signatures.

    ``signature(labels, x)`` may only read ``labels`` of ``x`` and of the
    elements in ``deps[x]``. Elements are placed in a greedy order (each
    partition is produced once, as a restricted-growth string in that
    order); element ``x`` is compared with the first checked member of its
    class as soon as everything it depends on has been placed.
    """
    order = _placement_order(deps)
    pos = {x: i for i, x in enumerate(order)}
    becomes_ready: list[list[int]] = [[] for _ in range(size)]
    for x in range(size):
        becomes_ready[max([pos[x]] + [pos[y] for y in deps[x]])].append(x)
    labels = [0] * size
    class_coarse: list[int] = []
    class_sig: list[object] = []
    out: list[Partition] = []

    def place(i: int) -> None:
        if i == size:
            out.append(Partition.from_labels(labels))
            return
        x_i = order[i]
        n_cls = len(class_coarse)
        for cid in range(n_cls + 1):
            if cid < n_cls and class_coarse[cid] != coarse.labels[x_i]:
                continue
            labels[x_i] = cid
            if cid == n_cls:
                class_coarse.append(coarse.labels[x_i])
                class_sig.append(None)
            saved = []
            ok = True
            for x in becomes_ready[i]:
                sig = signature(labels, x)
                c = labels[x]
                if class_sig[c] is None:
                    saved.append(c)
                    class_sig[c] = sig
                elif class_sig[c] != sig:
                    ok = False
                    break
            if ok:
                place(i + 1)
            for c in saved:
                class_sig[c] = None
            if cid == n_cls:
                class_coarse.pop()
                class_sig.pop()

    place(0)
    return sorted(out)


def enumerate_balanced(H: Hypergraph, cap: int = DEFAULT_CAP) -> list[Partition]:
    """All balanced partitions of the nodes, canonical and sorted."""
    if H.n > cap:
        raise TooLarge(f"{H.n} nodes exceeds enumeration cap {cap}")
    if H.n == 0:
        return [Partition(())]
    bs: list[list[Hyperedge]] = [[] for _ in range(H.n)]
    for e in H.edges:
        for v in e.head:
            bs[v].append(e)
    deps = [sorted({v for e in bs[c] for v, _ in e.tail}) for c in H.nodes]
    scale = math.lcm(*(e.weight.denominator for e in H.edges)) if H.edges else 1
    inputs = [[(e.tail_nodes(), int(e.weight * scale)) for e in bs[c]] for c in H.nodes]

    def signature(labels: list[int], c: int):
        acc: dict = {}
        for tail, w in inputs[c]:
            key = tuple(sorted(labels[v] for v in tail))
            acc[key] = acc.get(key, 0) + w
        return frozenset(kv for kv in acc.items() if kv[1])

    return _backtrack(H.n, input_equivalence(H), deps, signature)


def quotient(H: Hypergraph, part: Partition) -> Hypergraph:
    """Quotient hypernetwork on the classes of a balanced partition.

    Heads are normalized first. Node ``i`` of the result is class ``i`` and
    is labelled by its smallest member's label. For each class, one edge per
    distinct nonzero-weight ``(k, pattern)`` of the representative, in order
    of first occurrence; ids are ``q1, q2, ...``.
    """
    result = is_balanced(H, part)
    if not result:
        raise NotBalanced("partition is not balanced", result.witness)
    Hn = normalize_heads(H)
    table = pattern_weights(Hn, part)
    reps = part.representatives()
    labels = tuple(H.labels[r] for r in reps)
    edges = []
    for cls, r in enumerate(reps):
        for (k, pattern), w in table[r].items():
            if w == 0:
                continue
            tail = tuple((i, m) for i, m in enumerate(pattern) if m)
            edges.append(Hyperedge(f"q{len(edges) + 1}", tail, (cls,), w))
    return Hypergraph(labels, tuple(edges))


def lift_partition(H: Hypergraph, part: Partition) -> Partition:
    """Partition of nodes followed by edges: nodes as in ``part``, edges grouped by pattern."""
    _check_ground(H, part)
    keys = [("node", c) for c in part.labels]
    keys += [("edge", pattern_of(H, part, e)) for e in H.edges]
    return Partition.from_labels(keys)


def project_partition(H: Hypergraph, dpart: Partition) -> Partition:
    """Restriction of a node-and-edge partition to the nodes."""
    if dpart.size != H.n + H.m:
        raise DimensionMismatch(f"expected a partition of {H.n + H.m} elements, got {dpart.size}")
    return dpart.restrict(range(H.n))


def _as_rational_matrix(M) -> list[list[Fraction]]:
    rows = [[as_fraction(x.item() if hasattr(x, "item") else x) for x in row] for row in M]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("matrix is not square")
    return rows


def _class_sums(row: Sequence[Fraction], labels: Sequence[int]) -> dict[int, Fraction]:
    acc: dict[int, Fraction] = {}
    for j, x in enumerate(row):
        if x:
            acc[labels[j]] = acc.get(labels[j], Fraction(0)) + x
    return _nonzero(acc)


def matrix_synchrony_check(M, part: Partition) -> bool:
    """Exact test that the polydiagonal of ``part`` is invariant under ``M``.

    Equivalent rows must have equal sums over every class.
    """
    rows = _as_rational_matrix(M)
    if len(rows) != part.size:
        raise DimensionMismatch(f"matrix is {len(rows)}x{len(rows)}, partition has {part.size} elements")
    first: dict[int, dict] = {}
    for i, row in enumerate(rows):
        sums = _class_sums(row, part.labels)
        ref = first.setdefault(part.labels[i], sums)
        if ref is not sums and ref != sums:
            return False
    return True


def coarsest_equitable(M, initial: Optional[Partition] = None) -> Partition:
    """Coarsest refinement of ``initial`` whose polydiagonal is ``M``-invariant."""
    rows = _as_rational_matrix(M)
    part = initial if initial is not None else Partition.one_class(len(rows))
    if part.size != len(rows):
        raise DimensionMismatch("initial partition does not match matrix size")
    while True:
        sigs = [(part.labels[i], tuple(sorted(_class_sums(r, part.labels).items()))) for i, r in enumerate(rows)]
        refined = Partition.from_labels(sigs)
        if refined.n_classes == part.n_classes:
            return part
        part = refined


def enumerate_equitable(M, initial: Optional[Partition] = None, cap: int = DEFAULT_CAP) -> list[Partition]:
    """All partitions refining ``initial`` whose polydiagonal is ``M``-invariant, sorted."""
    rows = _as_rational_matrix(M)
    size = len(rows)
    if size > cap:
        raise TooLarge(f"{size} elements exceeds enumeration cap {cap}")
    coarse = coarsest_equitable(rows, initial)
    # a common positive scale does not change which class sums agree, and
    # integer arithmetic is much cheaper than Fraction arithmetic here
    scale = math.lcm(*(x.denominator for r in rows for x in r)) if size else 1
    sparse = [[(j, int(x * scale)) for j, x in enumerate(r) if x] for r in rows]
    deps = [[j for j, _ in row] for row in sparse]

    def signature(labels: list[int], i: int):
        acc: dict[int, int] = {}
        for j, x in sparse[i]:
            c = labels[j]
            acc[c] = acc.get(c, 0) + x
        return frozenset(kv for kv in acc.items() if kv[1])

    return _backtrack(size, coarse, deps, signature)


def balanced_via_incidence(H: Hypergraph, cap: int = DEFAULT_CAP) -> list[Partition]:
    """Node partitions obtained by projecting every invariant polydiagonal of the
    incidence adjacency matrix that never merges a node with an edge.

    ``cap`` bounds ``n + m``.
    """
    size = H.n + H.m
    if size > cap:
        raise TooLarge(f"incidence digraph has {size} vertices, exceeds cap {cap}")
    D = incidence_digraph(H)
    kinds = Partition.from_labels([0] * H.n + [1] * H.m)
    found = {project_partition(H, dp) for dp in enumerate_equitable(D.A, kinds, cap=cap)}
    return sorted(found)


def check_cluster_symmetry(H: Hypergraph, A: Iterable[NodeRef]) -> bool:
    """Whether permuting the cells of ``A`` is a symmetry of every admissible field.

    Every head meeting ``A`` must contain all of ``A``; every tail meeting
    ``A`` must contain all of ``A`` with one common multiplicity.
    """
    cells = {H.node(a) for a in A}
    if len(cells) <= 1:
        return True
    for e in H.edges:
        head = set(e.head)
        if head & cells and not cells <= head:
            return False
        mults = {e.multiplicity(a) for a in cells}
        if mults != {0} and (0 in mults or len(mults) > 1):
            return False
    return True

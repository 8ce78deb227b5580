"""Equivalence relations on ``{0..size-1}`` in canonical restricted-growth form."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .exceptions import InvalidPartition

__all__ = ["Partition", "iter_partitions", "iter_refinements", "parse_partition_literal"]


def _canonical(labels: Sequence) -> tuple[int, ...]:
    remap: dict = {}
    out = []
    for lab in labels:
        if lab not in remap:
            remap[lab] = len(remap)
        out.append(remap[lab])
    return tuple(out)


@dataclass(frozen=True, order=True)
class Partition:
    """A partition stored as a restricted-growth string.

    ``labels[i]`` is the class id of element ``i``; class ids appear in order
    of first occurrence, so equal relations have equal ``labels``. Ordering
    of partitions is lexicographic on ``labels``.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        if _canonical(self.labels) != tuple(self.labels):
            raise InvalidPartition("labels are not in canonical restricted-growth form; use Partition.from_labels")

    @classmethod
    def from_labels(cls, labels: Iterable) -> "Partition":
        """Canonicalize any per-element class labelling (hashable labels)."""
        return cls(_canonical(list(labels)))

    @classmethod
    def from_classes(cls, classes: Iterable[Iterable[int]], size: int | None = None) -> "Partition":
        classes = [list(c) for c in classes]
        if size is None:
            size = sum(len(c) for c in classes)
        owner = [None] * size
        for cid, members in enumerate(classes):
            if not members:
                raise InvalidPartition("empty class")
            for x in members:
                if not (isinstance(x, int) and 0 <= x < size):
                    raise InvalidPartition(f"element {x!r} outside ground set of size {size}")
                if owner[x] is not None:
                    raise InvalidPartition(f"element {x} appears in two classes")
                owner[x] = cid
        if any(o is None for o in owner):
            missing = [i for i, o in enumerate(owner) if o is None]
            raise InvalidPartition(f"elements {missing} are not covered")
        return cls.from_labels(owner)

    @classmethod
    def singletons(cls, size: int) -> "Partition":
        return cls(tuple(range(size)))

    @classmethod
    def one_class(cls, size: int) -> "Partition":
        return cls((0,) * size)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def n_classes(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    def classes(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_classes)]
        for i, c in enumerate(self.labels):
            out[c].append(i)
        return tuple(tuple(c) for c in out)

    def representatives(self) -> tuple[int, ...]:
        """Smallest element of each class, in class order."""
        return tuple(c[0] for c in self.classes())

    def same(self, i: int, j: int) -> bool:
        return self.labels[i] == self.labels[j]

    def refines(self, other: "Partition") -> bool:
        """True if every class of ``self`` lies inside a class of ``other``."""
        if self.size != other.size:
            raise InvalidPartition("partitions of different ground sets")
        image: dict[int, int] = {}
        for a, b in zip(self.labels, other.labels):
            if image.setdefault(a, b) != b:
                return False
        return True

    def restrict(self, elements: Sequence[int]) -> "Partition":
        return Partition.from_labels(self.labels[i] for i in elements)

    def is_trivial(self) -> bool:
        return self.n_classes == self.size

    def __len__(self):
        return self.size

    def __repr__(self):
        return "Partition(" + "|".join(",".join(str(i) for i in c) for c in self.classes()) + ")"


def iter_partitions(size: int) -> Iterator[Partition]:
    """All set partitions of ``size`` elements, in lexicographic RGS order."""
    if size == 0:
        yield Partition(())
        return
    a = [0] * size

    def rec(i: int, mx: int):
        if i == size:
            yield Partition(tuple(a))
            return
        for v in range(mx + 2):
            a[i] = v
            yield from rec(i + 1, max(mx, v))

    yield from rec(1, 0)


def iter_refinements(coarse: Partition) -> Iterator[Partition]:
    """All partitions refining ``coarse`` (independent partitions inside each class)."""
    classes = coarse.classes()
    per_class = [list(iter_partitions(len(c))) for c in classes]
    for combo in itertools.product(*per_class):
        labels = [None] * coarse.size
        for cid, (members, sub) in enumerate(zip(classes, combo)):
            for x, s in zip(members, sub.labels):
                labels[x] = (cid, s)
        yield Partition.from_labels(labels)


def parse_partition_literal(text: str, labels: Sequence[str]) -> Partition:
    """Parse ``"1,5,6|2,4|3"`` against node labels; unmentioned nodes become singletons."""
    index = {lab: i for i, lab in enumerate(labels)}
    owner: list = [None] * len(labels)
    groups = [g for g in text.split("|")]
    for cid, group in enumerate(groups):
        members = [tok.strip() for tok in group.split(",") if tok.strip()]
        if not members:
            raise InvalidPartition(f"empty class in partition literal {text!r}")
        for lab in members:
            if lab not in index:
                raise InvalidPartition(f"unknown node label {lab!r} in partition literal")
            i = index[lab]
            if owner[i] is not None:
                raise InvalidPartition(f"node {lab!r} listed twice in partition literal")
            owner[i] = ("c", cid)
    for i, o in enumerate(owner):
        if o is None:
            owner[i] = ("s", i)
    return Partition.from_labels(owner)

"""Input coercion shared by the estimators and the command line."""
from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from .exceptions import DimensionMismatch, InvalidPartition
from .fileformat import HypergraphDocument, load_document
from .hypergraph import Hypergraph
from .partition import Partition, parse_partition_literal

__all__ = ["check_hypergraph", "check_partition", "check_square_matrix"]


def check_hypergraph(obj) -> Hypergraph:
    """Accept a Hypergraph, a parsed document or a path to a document."""
    if isinstance(obj, Hypergraph):
        return obj
    if isinstance(obj, HypergraphDocument):
        return obj.hypergraph()
    if isinstance(obj, (str, os.PathLike)):
        return load_document(obj).hypergraph()
    raise TypeError(f"expected a Hypergraph, document or path, got {type(obj).__name__}")


def check_partition(part, H: Hypergraph) -> Partition:
    """Accept a Partition, a literal like ``"1,5,6|2,4"`` or per-node class labels."""
    if isinstance(part, Partition):
        out = part
    elif isinstance(part, str):
        out = parse_partition_literal(part, H.labels)
    elif isinstance(part, Sequence) or isinstance(part, np.ndarray):
        out = Partition.from_labels(list(part))
    else:
        raise InvalidPartition(f"cannot interpret {part!r} as a partition")
    if out.size != H.n:
        raise DimensionMismatch(f"partition covers {out.size} nodes, hypergraph has {H.n}")
    return out


def check_square_matrix(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A

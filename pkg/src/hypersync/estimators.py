"""scikit-learn style wrappers.

A "sample" here is a whole hypergraph for :class:`BalancedPartition`, and a
batch of cell states (rows of length ``n``) for :class:`QuotientReducer`.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .exceptions import NotBalanced
from .synchrony import coarsest_balanced, input_equivalence, is_balanced, quotient
from .validation import check_hypergraph, check_partition

__all__ = ["BalancedPartition", "QuotientReducer"]


class BalancedPartition(BaseEstimator, ClusterMixin):
    """Cluster the cells of a hypergraph into synchrony classes.

    ``method="coarsest"`` gives the coarsest balanced relation;
    ``method="input"`` gives input equivalence (not necessarily balanced).
    """

    def __init__(self, method="coarsest"):
        self.method = method

    def fit(self, X, y=None):
        H = check_hypergraph(X)
        if self.method == "coarsest":
            part = coarsest_balanced(H)
        elif self.method == "input":
            part = input_equivalence(H)
        else:
            raise ValueError(f"method must be 'coarsest' or 'input', got {self.method!r}")
        self.partition_ = part
        self.labels_ = np.array(part.labels)
        self.n_classes_ = part.n_classes
        self.node_labels_ = H.labels
        return self


class QuotientReducer(BaseEstimator, TransformerMixin):
    """Map states on a synchrony subspace to quotient coordinates and back.

    ``partition`` is a literal, a Partition or per-node labels; ``None`` uses
    the coarsest balanced relation. ``transform`` keeps the representative
    (smallest) cell of each class; ``inverse_transform`` copies class values
    back to every member.
    """

    def __init__(self, partition=None):
        self.partition = partition

    def fit(self, X, y=None):
        H = check_hypergraph(X)
        if self.partition is None:
            part = coarsest_balanced(H)
        else:
            part = check_partition(self.partition, H)
            res = is_balanced(H, part)
            if not res:
                raise NotBalanced(f"{part!r} is not balanced", res.witness)
        self.partition_ = part
        self.quotient_ = quotient(H, part)
        self.representatives_ = np.array(part.representatives())
        self.n_features_in_ = H.n
        return self

    def transform(self, X):
        check_is_fitted(self, ["partition_", "representatives_"])
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return X[:, self.representatives_]

    def inverse_transform(self, X):
        check_is_fitted(self, ["partition_"])
        X = check_array(X)
        if X.shape[1] != self.partition_.n_classes:
            raise ValueError(f"expected {self.partition_.n_classes} columns, got {X.shape[1]}")
        return X[:, list(self.partition_.labels)]

import numpy as np
import pytest
from sklearn.base import clone

from hypersync import BalancedPartition, Partition, QuotientReducer, coarsest_balanced
from hypersync.exceptions import NotBalanced


def test_params_and_clone():
    est = BalancedPartition(method="input")
    assert est.get_params() == {"method": "input"}
    assert clone(est).method == "input"
    q = clone(QuotientReducer(partition="1|2,3"))
    assert q.get_params()["partition"] == "1|2,3"


def test_fit_predict(graphs):
    H = graphs["fig1_left"]
    labels = BalancedPartition().fit_predict(H)
    assert list(labels) == list(coarsest_balanced(H).labels)
    est = BalancedPartition().fit(H)
    assert est.n_classes_ == 3 and est.node_labels_ == H.labels


def test_fit_from_path(docs):
    from importlib import resources

    path = resources.files("hypersync") / "data" / "fig1_left.json"
    est = BalancedPartition().fit(str(path))
    assert est.n_classes_ == 3


def test_input_method(graphs):
    est = BalancedPartition(method="input").fit(graphs["fig6"])
    assert isinstance(est.partition_, Partition)


def test_bad_method(graphs):
    with pytest.raises(ValueError):
        BalancedPartition(method="other").fit(graphs["fig1_left"])


def test_transform_round_trip(graphs):
    H = graphs["fig1_left"]
    red = QuotientReducer().fit(H)
    part = red.partition_
    rng = np.random.default_rng(0)
    Y = rng.normal(size=(5, part.n_classes))
    X = red.inverse_transform(Y)
    assert X.shape == (5, H.n)
    assert np.array_equal(red.transform(X), Y)
    assert red.quotient_.n == part.n_classes
    with pytest.raises(ValueError):
        red.transform(Y)


def test_explicit_partition(graphs):
    H = graphs["fig1_left"]
    red = QuotientReducer(partition="1|2,4|3|5|6").fit(H)
    assert red.partition_.n_classes == 5


def test_not_balanced(graphs):
    with pytest.raises(NotBalanced):
        QuotientReducer(partition="1,2|3,4,5,6").fit(graphs["fig1_left"])

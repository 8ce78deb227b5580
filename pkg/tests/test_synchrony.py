import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from _support import brute_force_balanced, classes_from_labels, node_classes, random_hypergraph
from hypersync import (
    Partition,
    build_hypergraph,
    check_cluster_symmetry,
    coarsest_balanced,
    coarsest_equitable,
    enumerate_balanced,
    enumerate_equitable,
    incidence_digraph,
    input_equivalence,
    is_balanced,
    lift_partition,
    matrix_synchrony_check,
    pattern_of,
    pattern_weights,
    project_partition,
    quotient,
)
from hypersync.exceptions import DimensionMismatch, NotBalanced, TooLarge

FIG1 = [["1", "5", "6"], ["2", "4"], ["3"]]
FIG8 = [["1", "5", "6", "8", "9", "11"], ["2", "3", "7", "10", "12", "13"], ["4", "14"]]


def test_patterns_fig1(graphs):
    H = graphs["fig1_left"]
    P = classes_from_labels(H, FIG1)
    assert pattern_of(H, P, "e1") == (1, 1, 0)
    assert pattern_of(H, P, H.edge("e5")) == (0, 1, 0)
    table = pattern_weights(H, P)
    assert table[2] == {(2, (1, 1, 0)): 1, (1, (0, 1, 0)): 1}
    assert table[1] == table[3] == {(1, (0, 1, 0)): 1}


def test_fig8_balanced_and_coarsest(graphs):
    H = graphs["fig8"]
    assert is_balanced(H, classes_from_labels(H, FIG8))
    coarse = coarsest_balanced(H)
    assert node_classes(H, coarse) == [set(H.labels) - {"4", "14"}, {"4", "14"}]
    # the coarsest relation is input equivalence here, and every balanced relation refines it
    assert coarse == input_equivalence(H)
    assert classes_from_labels(H, FIG8).refines(coarse)


def test_zero_weight_cancellation():
    # weights 1 and -1 from the same pattern cancel; cell 3 then has no inputs
    H = build_hypergraph(3, [(["1"], ["3"], 1), (["2"], ["3"], -1)])
    P = Partition.from_classes([[0, 1], [2]])
    assert pattern_weights(H, P)[2] == {(1, (1, 0)): Fraction(0)}
    assert is_balanced(H, Partition.one_class(3))
    assert input_equivalence(H) == Partition.one_class(3)


def test_not_balanced_quotient_raises(graphs):
    H = graphs["fig9"]
    P = classes_from_labels(H, [["1", "2", "8", "9"], ["3", "5", "6", "7", "10", "11"], ["4", "12"]])
    with pytest.raises(NotBalanced) as info:
        quotient(H, P)
    assert {info.value.witness.cell, info.value.witness.other} == {H.node("4"), H.node("12")}


def test_quotient_by_singletons_keeps_field_structure(graphs):
    H = graphs["fig1_left"]
    Q = quotient(H, Partition.singletons(H.n))
    assert Q.labels == H.labels
    # heads are normalized: one edge per (edge, head cell)
    assert Q.m == sum(len(e.head) for e in H.edges)


def test_fig6_input_relation_not_balanced(graphs):
    H = graphs["fig6"]
    inp = input_equivalence(H)
    coarse = coarsest_balanced(H)
    assert not is_balanced(H, inp)
    assert coarse.refines(inp) and coarse != inp
    assert quotient(H, coarse).n == coarse.n_classes


def test_lift_and_project(graphs):
    H = graphs["fig1_left"]
    P = classes_from_labels(H, FIG1)
    L = lift_partition(H, P)
    assert L.size == 11
    assert project_partition(H, L) == P
    # e2 and e5 have pattern (0,1,0); e1, e3 and e4 have (1,1,0)
    edge_classes = {tuple(sorted(H.edges[i - 6].id for i in c)) for c in L.classes() if c[0] >= 6}
    assert edge_classes == {("e1", "e3", "e4"), ("e2", "e5")}
    assert matrix_synchrony_check(incidence_digraph(H).A, L)
    with pytest.raises(DimensionMismatch):
        project_partition(H, P)


def test_matrix_checks():
    M = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert matrix_synchrony_check(M, Partition.one_class(3))
    assert coarsest_equitable(M) == Partition.one_class(3)
    assert len(enumerate_equitable(M)) == 5
    N = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert coarsest_equitable(N) == Partition.singletons(3)
    with pytest.raises(DimensionMismatch):
        matrix_synchrony_check([[1, 2]], Partition.singletons(1))
    with pytest.raises(TooLarge):
        enumerate_equitable([[0] * 13 for _ in range(13)])


def test_cap(graphs):
    with pytest.raises(TooLarge):
        enumerate_balanced(graphs["fig8"])
    with pytest.raises(TooLarge):
        enumerate_balanced(build_hypergraph(20, []), cap=12)


def test_cluster_symmetry(graphs):
    H = graphs["fig5_left"]
    assert check_cluster_symmetry(H, ["1", "2"])
    assert check_cluster_symmetry(H, ["3", "4"])
    assert not check_cluster_symmetry(H, ["1", "3"])
    assert check_cluster_symmetry(H, ["1"])


def test_cluster_symmetry_gives_balance(graphs):
    H = graphs["fig5_left"]
    assert is_balanced(H, Partition.from_classes([[0, 1], [2, 3]]))


def test_partition_size_checked(graphs):
    with pytest.raises(DimensionMismatch):
        is_balanced(graphs["fig2"], Partition.singletons(3))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_enumeration_matches_brute_force(seed):
    H = random_hypergraph(random.Random(seed), n_max=5, m_max=5)
    expected = brute_force_balanced(H)
    assert enumerate_balanced(H) == expected
    coarse = coarsest_balanced(H)
    assert coarse in expected
    assert all(p.refines(coarse) for p in expected)
    assert all(p.refines(input_equivalence(H)) for p in expected)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_quotient_of_balanced_is_consistent(seed):
    rng = random.Random(seed)
    H = random_hypergraph(rng, n_max=5, m_max=5)
    P = rng.choice(enumerate_balanced(H))
    Q = quotient(H, P)
    assert Q.n == P.n_classes
    assert all(len(e.head) == 1 for e in Q.edges)
    assert all(e.weight != 0 for e in Q.edges)

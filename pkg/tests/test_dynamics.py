import math
import random
import warnings
from fractions import Fraction

import numpy as np
import pytest

from _support import classes_from_labels, random_hypergraph
from hypersync import (
    Partition,
    build_hypergraph,
    custom_coupling,
    eval_field,
    flow_invariance_check,
    integrate,
    jacobian_fd,
    linear_coupling,
    product_coupling,
    restriction_equals_quotient,
    rk4,
    trajectory_invariance,
)
from hypersync.dynamics import product_field_jacobian, random_rational_point
from hypersync.exceptions import DimensionMismatch, MissingCoupling, NonFiniteState, NotBalanced

F = Fraction


def test_product_field_fig1_right(graphs):
    H = graphs["fig1_right"]
    # Q_k multiplies the k tail states
    assert eval_field(H, product_coupling(), [1, 2, 3]) == [2, 2, 4]
    # with the receiving state as an extra factor
    assert eval_field(H, product_coupling(include_self=True), [1, 2, 3]) == [2, 4, 12]


def test_multiplicity_repeats_argument():
    H = build_hypergraph(2, [([("1", 2)], ["2"], 3)])
    assert eval_field(H, product_coupling(), [F(1, 2), 5]) == [0, F(3, 4)]
    assert eval_field(H, linear_coupling(), [F(1, 2), 5]) == [0, 3]


def test_internal_dynamics():
    H = build_hypergraph(2, [])
    assert eval_field(H, product_coupling("decay"), [2, -3]) == [-2, 3]
    assert eval_field(H, product_coupling("cubic"), [2, F(1, 2)]) == [-6, F(3, 8)]
    with pytest.raises(ValueError):
        product_coupling("nope")


def test_weight_scaling(graphs):
    H = graphs["fig1_left"]
    doubled = build_hypergraph(H.labels, [{"tail": e.tail, "head": e.head, "weight": 2 * e.weight} for e in H.edges])
    x = random_rational_point(random.Random(1), H.n)
    c = product_coupling("cubic")
    f = [v - v**3 for v in x]
    assert [a - b for a, b in zip(eval_field(doubled, c, x), f)] == [2 * (a - b) for a, b in zip(eval_field(H, c, x), f)]


def test_zero_coupling_gives_zero_field(graphs):
    with pytest.warns(UserWarning):
        zero = custom_coupling({1: lambda x0, xs: 0.0 * xs[0], 2: lambda x0, xs: 0.0 * xs[0]})
    assert not np.any(eval_field(graphs["fig1_left"], zero, np.arange(6.0)))


def test_custom_symmetry_check():
    with pytest.raises(ValueError):
        custom_coupling({2: lambda x0, xs: xs[0] - xs[1]})
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ok = custom_coupling({2: lambda x0, xs: np.sin(xs[0]) * np.sin(xs[1]) + x0})
    assert ok.orders == {2}


def test_missing_coupling(graphs):
    c = custom_coupling({1: lambda x0, xs: xs[0]})
    with pytest.raises(MissingCoupling):
        eval_field(graphs["fig1_left"], c, np.zeros(6))


def test_dimension_mismatch(graphs):
    with pytest.raises(DimensionMismatch):
        eval_field(graphs["fig1_left"], product_coupling(), [1, 2])
    with pytest.raises(DimensionMismatch):
        eval_field(graphs["fig1_left"], product_coupling(d=2, exact=False), np.zeros((6, 3)))
    with pytest.raises(ValueError):
        product_coupling(d=2, exact=True)


def test_tail_order_irrelevant():
    rng = random.Random(5)
    for _ in range(20):
        H = random_hypergraph(rng)
        shuffled = []
        for e in H.edges:
            tail = e.tail_nodes()
            rng.shuffle(tail)
            shuffled.append({"id": e.id, "tail": tail, "head": list(e.head), "weight": e.weight})
        G = build_hypergraph(H.n, shuffled)
        x = random_rational_point(rng, H.n)
        assert eval_field(G, product_coupling(), x) == eval_field(H, product_coupling(), x)


def test_vector_cells(graphs):
    H = graphs["fig1_left"]
    c = product_coupling("decay", d=2, exact=False)
    x = np.arange(12.0).reshape(6, 2) / 10
    F2 = eval_field(H, c, x)
    F1 = eval_field(H, product_coupling("decay", exact=False), x[:, 0])
    assert F2.shape == (6, 2) and np.allclose(F2[:, 0], F1)
    assert np.allclose(eval_field(H, c, x.ravel()), F2)


def test_rk4_exponential_decay():
    traj = rk4(lambda x: -x, np.array([2.0]), 0.01, 100)
    assert traj.shape == (101, 1)
    assert abs(traj[-1, 0] - 2 * math.exp(-1)) < 1e-9


def test_rk4_zero_field():
    traj = rk4(lambda x: 0 * x, np.array([1.0, 2.0]), 0.1, 5)
    assert np.all(traj == np.array([1.0, 2.0]))


def test_rk4_convergence_order():
    errs = [abs(rk4(lambda x: -x, np.array([1.0]), dt, int(round(1 / dt)))[-1, 0] - math.exp(-1)) for dt in (0.2, 0.1, 0.05)]
    for a, b in zip(errs, errs[1:]):
        assert 12 <= a / b <= 20


def test_rk4_blowup_reports_step():
    with pytest.raises(NonFiniteState) as info:
        rk4(lambda x: x**3, np.array([10.0]), 0.5, 50)
    assert info.value.step is not None and info.value.step <= 50
    with pytest.raises(ValueError):
        rk4(lambda x: x, np.array([1.0]), 0.0, 1)


def test_integrate_stays_synchronized(graphs):
    H = graphs["fig7_left"]
    P = classes_from_labels(H, [["1", "4", "6"], ["2", "3", "5"]])
    assert trajectory_invariance(H, product_coupling("cubic"), P, dt=0.01, steps=500) <= 1e-12
    traj = integrate(H, linear_coupling("decay", exact=False), np.linspace(0.1, 0.6, 6), 0.01, 10)
    assert traj.shape == (11, 6)


def test_flow_invariance_fig1(graphs):
    H = graphs["fig1_left"]
    rep = flow_invariance_check(H, product_coupling(), classes_from_labels(H, [["1", "5", "6"], ["2", "4"], ["3"]]))
    assert rep.passed and rep.mode == "exact"
    assert flow_invariance_check(H, product_coupling(), Partition.singletons(6)).passed


def test_flow_invariance_fig9_witness(graphs):
    H = graphs["fig9"]
    P = classes_from_labels(H, [["1", "2", "8", "9"], ["3", "5", "6", "7", "10", "11"], ["4", "12"]])
    rep = flow_invariance_check(H, product_coupling(), P)
    assert not rep.passed
    assert set(rep.witness["cells"]) == {H.node("4"), H.node("12")}
    fl = flow_invariance_check(H, product_coupling(exact=False), P)
    assert not fl.passed and fl.max_spread > 1e-9


def test_restriction_requires_balance(graphs):
    H = graphs["fig9"]
    with pytest.raises(NotBalanced):
        restriction_equals_quotient(H, Partition.one_class(H.n), product_coupling())


def test_restriction_fig8_float(graphs):
    H = graphs["fig8"]
    P = classes_from_labels(H, [["1", "5", "6", "8", "9", "11"], ["2", "3", "7", "10", "12", "13"], ["4", "14"]])
    rep = restriction_equals_quotient(H, P, product_coupling("cubic", exact=False))
    assert rep.passed and rep.max_error <= 1e-12


def test_jacobian_fd_linear_and_constant():
    M = np.random.default_rng(0).standard_normal((5, 5))
    assert np.allclose(jacobian_fd(lambda x: M @ x, np.ones(5)), M, atol=1e-9)
    assert np.allclose(jacobian_fd(lambda x: np.full(3, 7.0), np.zeros(3)), 0)
    with pytest.raises(ValueError):
        jacobian_fd(lambda x: x, np.zeros(2), h=0)
    with pytest.raises(NonFiniteState):
        jacobian_fd(lambda x: np.log(x), np.zeros(2))


@pytest.mark.parametrize("seed", range(10))
def test_product_jacobian_matches_fd(seed):
    rng = random.Random(seed)
    H = random_hypergraph(rng)
    x = np.array([rng.uniform(-1, 1) for _ in range(H.n)])
    field = lambda y: eval_field(H, product_coupling(exact=False), y)  # noqa: E731
    assert np.max(np.abs(jacobian_fd(field, x) - product_field_jacobian(H, x))) <= 1e-6


def test_random_points_distinct_nonzero():
    pts = random_rational_point(random.Random(0), 50)
    assert len(set(pts)) == 50 and all(p != 0 and 97 % p.denominator == 0 for p in pts)

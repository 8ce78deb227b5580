"""Admissible coupled-cell vector fields on hypergraphs and their numerics.

For cell ``i`` the field is ``f(x_i) + sum_e w_e Q_k(x_i; x_T(e))`` over
the edges ``e`` whose head contains ``i``, with ``k`` the tail cardinality.
A tail node of multiplicity ``m`` is passed to ``Q_k`` ``m`` times.

Two evaluation modes exist. *Exact* mode works over :class:`Fraction`
scalars (``d == 1``) and requires polynomial couplings. *Float* mode uses
numpy and supports ``d >= 1``.
"""
from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .exceptions import DimensionMismatch, MissingCoupling, NonFiniteState, NotBalanced
from .hypergraph import Hypergraph, tail_cardinalities
from .partition import Partition
from .synchrony import is_balanced, quotient

__all__ = [
    "CouplingSystem",
    "product_coupling",
    "linear_coupling",
    "custom_coupling",
    "INTERNAL_DYNAMICS",
    "eval_field",
    "rk4",
    "integrate",
    "random_rational_point",
    "InvarianceReport",
    "flow_invariance_check",
    "trajectory_invariance",
    "RestrictionReport",
    "restriction_equals_quotient",
    "jacobian_fd",
    "product_field_jacobian",
]

INVARIANCE_TOL = 1e-9
FD_STEP = 1e-5
RANDOM_DENOMINATOR = 97

Coupling = Callable[[int, object, Sequence[object]], object]


def _zero(x):
    return x * 0


def _decay(x):
    return -x


def _cubic(x):
    return x - x * x * x


INTERNAL_DYNAMICS: dict[str, Callable] = {"zero": _zero, "decay": _decay, "cubic": _cubic}


@dataclass(frozen=True)
class CouplingSystem:
    """Internal dynamics ``f`` plus the coupling family ``Q_k``.

    ``coupling(k, x0, xs)`` evaluates ``Q_k(x0; xs)``. ``orders`` lists the
    cardinalities the family is defined for (``None`` means every ``k``).
    """

    coupling: Coupling
    internal: Callable = _zero
    d: int = 1
    exact: bool = False
    orders: Optional[frozenset[int]] = None
    family: str = "custom"
    internal_tag: str = "zero"
    meta: dict = field(default_factory=dict, compare=False)

    def require(self, H: Hypergraph) -> None:
        if self.orders is None:
            return
        missing = sorted(tail_cardinalities(H) - self.orders)
        if missing:
            raise MissingCoupling(f"no coupling function for tail cardinalities {missing}")


def _internal(f) -> tuple[Callable, str]:
    if f is None:
        return _zero, "zero"
    if isinstance(f, str):
        try:
            return INTERNAL_DYNAMICS[f], f
        except KeyError:
            raise ValueError(f"unknown internal dynamics {f!r}; choose from {sorted(INTERNAL_DYNAMICS)}") from None
    return f, "custom"


def product_coupling(f=None, d: int = 1, exact: bool = True, include_self: bool = False) -> CouplingSystem:
    """``Q_k(x0; x1..xk) = x1 * ... * xk`` componentwise.

    With ``include_self`` the receiving cell's own state is an extra factor.
    Exact mode needs ``d == 1``.
    """
    fn, tag = _internal(f)
    if exact and d != 1:
        raise ValueError("exact evaluation is only available for d == 1")

    def Q(k, x0, xs):
        out = x0 if include_self else None
        for v in xs:
            out = v if out is None else out * v
        return out

    return CouplingSystem(Q, fn, d, exact, None, "product", tag, {"include_self": include_self})


def linear_coupling(f=None, d: int = 1, exact: bool = True) -> CouplingSystem:
    """``Q_k(x0; x1..xk) = x1 + ... + xk``."""
    fn, tag = _internal(f)
    if exact and d != 1:
        raise ValueError("exact evaluation is only available for d == 1")

    def Q(k, x0, xs):
        out = xs[0]
        for v in xs[1:]:
            out = out + v
        return out

    return CouplingSystem(Q, fn, d, exact, None, "linear", tag)


def custom_coupling(
    couplings: Mapping[int, Callable],
    f=None,
    d: int = 1,
    exact: bool = False,
    symmetry_trials: int = 20,
    seed: int = 0,
    tol: float = 1e-10,
) -> CouplingSystem:
    """Wrap user functions ``couplings[k](x0, xs)``.

    Each ``Q_k`` is checked for symmetry in its trailing arguments at random
    points with shuffled argument order; an asymmetric one raises
    ``ValueError``. A ``Q_k`` that vanishes at every sampled point is
    accepted with a warning.
    """
    fn, tag = _internal(f)
    funcs = dict(couplings)
    rng = np.random.default_rng(seed)
    for k, Qk in funcs.items():
        all_zero = True
        for _ in range(symmetry_trials):
            x0 = rng.uniform(-1, 1, size=d) if d > 1 else rng.uniform(-1, 1)
            xs = [rng.uniform(-1, 1, size=d) if d > 1 else rng.uniform(-1, 1) for _ in range(k)]
            ref = np.asarray(Qk(x0, list(xs)), dtype=float)
            perm = list(rng.permutation(k))
            alt = np.asarray(Qk(x0, [xs[i] for i in perm]), dtype=float)
            if not np.allclose(ref, alt, rtol=tol, atol=tol):
                raise ValueError(f"coupling Q_{k} is not symmetric in its last {k} arguments")
            if np.any(ref != 0):
                all_zero = False
        if all_zero:
            warnings.warn(f"coupling Q_{k} vanished at every sampled point; admissibility expects Q_k != 0", stacklevel=2)

    def Q(k, x0, xs):
        return funcs[k](x0, list(xs))

    return CouplingSystem(Q, fn, d, exact, frozenset(funcs), "custom", tag)


def _coerce_state(H: Hypergraph, coupling: CouplingSystem, x):
    d = coupling.d
    if coupling.exact:
        vals = [v if isinstance(v, Fraction) else Fraction(v) for v in x]
        if len(vals) != H.n:
            raise DimensionMismatch(f"state has {len(vals)} entries, expected {H.n}")
        return vals
    arr = np.asarray(x, dtype=float)
    if d == 1:
        if arr.shape != (H.n,):
            raise DimensionMismatch(f"state has shape {arr.shape}, expected ({H.n},)")
        return arr
    if arr.shape == (H.n * d,):
        arr = arr.reshape(H.n, d)
    if arr.shape != (H.n, d):
        raise DimensionMismatch(f"state has shape {arr.shape}, expected ({H.n}, {d})")
    return arr


def eval_field(H: Hypergraph, coupling: CouplingSystem, x):
    """Evaluate the admissible vector field at ``x``.

    Exact mode returns a list of :class:`Fraction`; float mode returns an
    array shaped like the (reshaped) input.
    """
    coupling.require(H)
    xs = _coerce_state(H, coupling, x)
    f, Q = coupling.internal, coupling.coupling
    out = [f(xs[i]) for i in range(H.n)]
    for e in H.edges:
        args = [xs[v] for v in e.tail_nodes()]
        k = len(args)
        for i in e.head:
            out[i] = out[i] + e.weight * Q(k, xs[i], args) if coupling.exact else out[i] + float(e.weight) * Q(k, xs[i], args)
    if coupling.exact:
        return [Fraction(v) for v in out]
    return np.array(out, dtype=float)


def rk4(field: Callable[[np.ndarray], np.ndarray], x0, dt: float, steps: int) -> np.ndarray:
    """Classic fixed-step fourth-order Runge-Kutta; returns ``steps + 1`` states."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.array(x0, dtype=float)
    traj = np.empty((steps + 1,) + x.shape)
    traj[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for s in range(1, steps + 1):
            k1 = field(x)
            k2 = field(x + 0.5 * dt * k1)
            k3 = field(x + 0.5 * dt * k2)
            k4 = field(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise NonFiniteState(f"state became non-finite at step {s}", step=s)
            traj[s] = x
    return traj


def _float_system(coupling: CouplingSystem) -> CouplingSystem:
    if not coupling.exact:
        return coupling
    return CouplingSystem(
        coupling.coupling, coupling.internal, coupling.d, False,
        coupling.orders, coupling.family, coupling.internal_tag, coupling.meta,
    )


def integrate(H: Hypergraph, coupling: CouplingSystem, x0, dt: float, steps: int) -> np.ndarray:
    """RK4 trajectory of the admissible field (always in floating point)."""
    system = _float_system(coupling)
    system.require(H)
    x0 = _coerce_state(H, system, np.asarray(x0, dtype=float))
    return rk4(lambda x: eval_field(H, system, x), x0, dt, steps)


def random_rational_point(rng: random.Random, size: int, denominator: int = RANDOM_DENOMINATOR) -> list[Fraction]:
    """Distinct nonzero rationals ``k / denominator`` with ``|k| < 8 * denominator``."""
    pool = [k for k in range(-8 * denominator + 1, 8 * denominator) if k != 0]
    return [Fraction(k, denominator) for k in rng.sample(pool, size)]


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    mode: str
    trials: int
    seed: int
    max_spread: float = 0.0
    witness: Optional[dict] = None


def _class_spread(values, part: Partition) -> tuple[float, Optional[tuple[int, int]]]:
    worst, pair = 0.0, None
    first: dict[int, int] = {}
    for i, cls in enumerate(part.labels):
        r = first.setdefault(cls, i)
        if r == i:
            continue
        diff = np.max(np.abs(np.asarray(values[i], dtype=float) - np.asarray(values[r], dtype=float)))
        if diff > worst or pair is None and diff > 0:
            worst, pair = float(diff), (r, i)
    return worst, pair


def flow_invariance_check(
    H: Hypergraph,
    coupling: CouplingSystem,
    part: Partition,
    trials: int = 25,
    seed: int = 0,
    tol: float = INVARIANCE_TOL,
) -> InvarianceReport:
    """Check that the field is tangent to the polydiagonal of ``part`` at random points.

    Points take one value per class (distinct across classes). Exact
    couplings compare ``F_i == F_j`` exactly for equivalent cells; float
    couplings pass when the largest in-class spread is at most ``tol``.
    """
    if part.size != H.n:
        raise DimensionMismatch("partition does not match hypergraph")
    rng = random.Random(seed)
    worst = 0.0
    for t in range(trials):
        y = random_rational_point(rng, part.n_classes)
        if coupling.exact:
            x = [y[c] for c in part.labels]
        else:
            vals = np.array([float(v) for v in y])
            x = vals[list(part.labels)]
            if coupling.d > 1:
                x = np.repeat(x[:, None], coupling.d, axis=1) * np.linspace(1.0, 0.5, coupling.d)
        F = eval_field(H, coupling, x)
        if coupling.exact:
            first: dict[int, int] = {}
            for i, cls in enumerate(part.labels):
                r = first.setdefault(cls, i)
                if F[i] != F[r]:
                    return InvarianceReport(
                        False, "exact", t + 1, seed, float(abs(F[i] - F[r])),
                        {"cells": (r, i), "point": [str(v) for v in x], "values": (str(F[r]), str(F[i]))},
                    )
        else:
            spread, pair = _class_spread(F, part)
            worst = max(worst, spread)
            if spread > tol:
                return InvarianceReport(
                    False, "float", t + 1, seed, spread,
                    {"cells": pair, "point": np.asarray(x).tolist()},
                )
    return InvarianceReport(True, "exact" if coupling.exact else "float", trials, seed, worst)


def trajectory_invariance(
    H: Hypergraph,
    coupling: CouplingSystem,
    part: Partition,
    dt: float = 1e-2,
    steps: int = 1000,
    seed: int = 0,
    y0=None,
) -> float:
    """Integrate from a point of the polydiagonal; return the largest in-class spread seen."""
    if y0 is None:
        rng = np.random.default_rng(seed)
        y0 = rng.uniform(0.1, 0.9, size=part.n_classes)
    y0 = np.asarray(y0, dtype=float)
    x0 = y0[list(part.labels)]
    if coupling.d > 1:
        x0 = np.repeat(x0[:, None], coupling.d, axis=1)
    traj = integrate(H, coupling, x0, dt, steps)
    return max(_class_spread(state, part)[0] for state in traj)


@dataclass(frozen=True)
class RestrictionReport:
    passed: bool
    trials: int
    seed: int
    max_error: float = 0.0
    witness: Optional[dict] = None


def restriction_equals_quotient(
    H: Hypergraph,
    part: Partition,
    coupling: CouplingSystem,
    trials: int = 25,
    seed: int = 0,
    tol: float = INVARIANCE_TOL,
) -> RestrictionReport:
    """Compare the field restricted to the polydiagonal with the quotient field.

    At random class states ``y`` the lift ``x_i = y[class(i)]`` is evaluated
    on ``H`` and read off at class representatives, then compared with the
    quotient hypernetwork's field at ``y``. Exact couplings require equality.
    """
    result = is_balanced(H, part)
    if not result:
        raise NotBalanced("restriction to a non-balanced polydiagonal is not a quotient system", result.witness)
    Q = quotient(H, part)
    reps = part.representatives()
    rng = random.Random(seed)
    worst = 0.0
    for t in range(trials):
        y = random_rational_point(rng, part.n_classes)
        if not coupling.exact:
            y = np.array([float(v) for v in y])
        x = [y[c] for c in part.labels]
        if not coupling.exact:
            x = np.array(x)
        F = eval_field(H, coupling, x)
        G = eval_field(Q, coupling, y)
        for cls, r in enumerate(reps):
            if coupling.exact:
                if F[r] != G[cls]:
                    return RestrictionReport(False, t + 1, seed, float(abs(F[r] - G[cls])),
                                             {"class": cls, "restricted": str(F[r]), "quotient": str(G[cls])})
            else:
                err = float(np.max(np.abs(np.asarray(F[r]) - np.asarray(G[cls]))))
                worst = max(worst, err)
                if err > tol:
                    return RestrictionReport(False, t + 1, seed, err, {"class": cls})
    return RestrictionReport(True, trials, seed, worst)


def jacobian_fd(field: Callable[[np.ndarray], np.ndarray], x, h: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian, one column per coordinate."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float).ravel()
    cols = []
    with np.errstate(all="ignore"):
        for j in range(x.size):
            step = np.zeros_like(x)
            step[j] = h
            hi = np.asarray(field(x + step), dtype=float).ravel()
            lo = np.asarray(field(x - step), dtype=float).ravel()
            col = (hi - lo) / (2 * h)
            if not np.all(np.isfinite(col)):
                raise NonFiniteState(f"non-finite finite difference in column {j}", step=j)
            cols.append(col)
    return np.column_stack(cols) if cols else np.zeros((0, 0))


def product_field_jacobian(H: Hypergraph, x, f_prime: Callable = lambda v: 0.0) -> np.ndarray:
    """Analytic Jacobian of the scalar product-coupling field.

    ``d/dx_j`` of ``w * prod(tail)`` is ``w * m_j * x_j**(m_j - 1) * prod(other tail factors)``.
    """
    x = np.asarray(x, dtype=float)
    J = np.diag([f_prime(v) for v in x]).astype(float)
    for e in H.edges:
        w = float(e.weight)
        for j, mj in e.tail:
            rest = math.prod(x[v] ** m for v, m in e.tail if v != j)
            dj = w * mj * x[j] ** (mj - 1) * rest
            for i in e.head:
                J[i, j] += dj
    return J

"""Replicator-type dynamics with pairwise and triplet interactions.

The system is ``dp_i/dt = ((K p)_i - p^T H p) p_i``. ``K`` carries the
pairwise weights and ``H`` the weights of the triplet hyperedges
``({k, l}, {i})``. No relation between ``K`` and ``H`` is assumed.

Functions accept rational input (ints, strings, :class:`Fraction`) and
then compute exactly; any float in ``p`` switches to floating point.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .dynamics import jacobian_fd, random_rational_point
from .exceptions import DimensionMismatch, NotEquilibrium, ZeroComponent
from .hypergraph import Hypergraph, as_fraction, build_hypergraph
from .linalg import eig_dense
from .partition import Partition
from .synchrony import DEFAULT_CAP, enumerate_equitable

__all__ = [
    "ReplicatorSystem",
    "check_simplex",
    "replicator_field",
    "replicator_jacobian",
    "StabilityReport",
    "classify_eigenvalue",
    "stability_report",
    "replicator_tangent",
    "replicator_synchrony",
    "simplex_drift",
    "replicator_hypergraph",
]

EQUILIBRIUM_TOL = 1e-10
CLASSIFY_TOL = 1e-9
SIMPLEX_TOL = 1e-12


def _rational_square(M, name: str) -> tuple[tuple[Fraction, ...], ...]:
    rows = [list(r) for r in (M.tolist() if isinstance(M, np.ndarray) else M)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch(f"{name} must be square")
    return tuple(tuple(as_fraction(x) for x in r) for r in rows)


@dataclass(frozen=True)
class ReplicatorSystem:
    """Pairwise matrix ``K`` and triplet-weight matrix ``H``, stored exactly."""

    K: tuple
    H: tuple
    Kf: np.ndarray = field(init=False, repr=False, compare=False)
    Hf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        K = _rational_square(self.K, "K")
        H = _rational_square(self.H, "H")
        if len(K) != len(H):
            raise DimensionMismatch(f"K is {len(K)}x{len(K)} but H is {len(H)}x{len(H)}")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "Kf", np.array([[float(x) for x in r] for r in K]).reshape(len(K), len(K)))
        object.__setattr__(self, "Hf", np.array([[float(x) for x in r] for r in H]).reshape(len(H), len(H)))

    @property
    def n(self) -> int:
        return len(self.K)


def _is_exact(p) -> bool:
    if isinstance(p, np.ndarray):
        return p.dtype == object and all(isinstance(v, (int, Fraction)) for v in p.ravel())
    return all(isinstance(v, (int, Fraction, str)) for v in p)


def _state(sys: ReplicatorSystem, p, exact: Optional[bool]):
    if exact is None:
        exact = _is_exact(p)
    if exact:
        vec = [as_fraction(v) for v in p]
    else:
        vec = np.asarray(p, dtype=float).ravel()
    if len(vec) != sys.n:
        raise DimensionMismatch(f"state has {len(vec)} entries, system has {sys.n} cells")
    return vec, exact


def check_simplex(p, tol: float = SIMPLEX_TOL) -> None:
    """Raise ``ValueError`` unless ``p`` is a probability vector."""
    vals = [float(v) for v in p]
    if abs(sum(vals) - 1.0) > tol:
        raise ValueError(f"entries sum to {sum(vals)!r}, not 1")
    bad = [i for i, v in enumerate(vals) if v < -tol or v > 1 + tol]
    if bad:
        raise ValueError(f"entries {bad} lie outside [0, 1]")


def _quad(M, p):
    return sum((p[i] * M[i][j] * p[j] for i in range(len(p)) for j in range(len(p))), Fraction(0))


def replicator_field(sys: ReplicatorSystem, p, exact: Optional[bool] = None, simplex: bool = False):
    """``((K p)_i - p^T H p) p_i`` for each ``i``."""
    vec, exact = _state(sys, p, exact)
    if simplex:
        check_simplex(vec)
    if exact:
        avg = _quad(sys.H, vec)
        return [(sum((k * x for k, x in zip(row, vec)), Fraction(0)) - avg) * vec[i] for i, row in enumerate(sys.K)]
    return (sys.Kf @ vec - vec @ sys.Hf @ vec) * vec


def simplex_drift(sys: ReplicatorSystem, p, exact: Optional[bool] = None):
    """Rate of change of ``sum(p)``: ``p^T K p - (p^T H p) sum(p)``."""
    vec, exact = _state(sys, p, exact)
    if exact:
        return _quad(sys.K, vec) - _quad(sys.H, vec) * sum(vec, Fraction(0))
    return float(vec @ sys.Kf @ vec - (vec @ sys.Hf @ vec) * vec.sum())


def replicator_jacobian(sys: ReplicatorSystem, p, exact: Optional[bool] = None, tol: float = EQUILIBRIUM_TOL):
    """Jacobian at an equilibrium with no zero component.

    Row ``i`` is ``p_i (K_i - p^T (H + H^T))``. Exact input gives a list of
    Fraction rows, float input a numpy array.
    """
    vec, exact = _state(sys, p, exact)
    zeros = [i for i, v in enumerate(vec) if v == 0]
    if zeros:
        raise ZeroComponent(f"components {zeros} vanish; the formula needs every p_i != 0")
    F = replicator_field(sys, vec, exact)
    resid = max(abs(float(v)) for v in F) if len(F) else 0.0
    if resid > tol:
        raise NotEquilibrium(f"field has sup-norm {resid:.3g} at p, above {tol:g}")
    n = sys.n
    if exact:
        s = [sum((vec[k] * (sys.H[k][j] + sys.H[j][k]) for k in range(n)), Fraction(0)) for j in range(n)]
        return [[vec[i] * (sys.K[i][j] - s[j]) for j in range(n)] for i in range(n)]
    s = vec @ (sys.Hf + sys.Hf.T)
    return vec[:, None] * (sys.Kf - s[None, :])


def classify_eigenvalue(lam: complex, tol: float = CLASSIFY_TOL) -> str:
    if abs(lam.real) <= tol:
        return "zero" if abs(lam.imag) <= tol else "imaginary"
    return "negative" if lam.real < 0 else "positive"


@dataclass
class StabilityReport:
    eigenvalues: list[complex]
    kinds: list[str]
    jacobian: list[list[float]]
    ones_eigenvalue: Optional[complex]
    transverse: list[complex]
    verdict: str
    fd_error: float
    discrepancy: Optional[dict] = None

    def as_dict(self) -> dict:
        pair = lambda z: [float(z.real), float(z.imag)]  # noqa: E731
        return {
            "eigenvalues": [pair(z) for z in self.eigenvalues],
            "kinds": list(self.kinds),
            "jacobian": self.jacobian,
            "ones_eigenvalue": None if self.ones_eigenvalue is None else pair(self.ones_eigenvalue),
            "transverse": [pair(z) for z in self.transverse],
            "verdict": self.verdict,
            "fd_error": self.fd_error,
            "discrepancy": self.discrepancy,
        }


def _verdict(values: Sequence[complex], tol: float) -> str:
    if not values:
        return "neutral"
    top = max(z.real for z in values)
    if top > tol:
        return "unstable"
    if top < -tol:
        return "stable"
    return "neutral"


def stability_report(
    sys: ReplicatorSystem,
    p,
    tol: float = CLASSIFY_TOL,
    printed=None,
) -> StabilityReport:
    """Linear stability of an interior equilibrium.

    The eigenvalue along ``(1, ..., 1)`` is reported separately when that
    vector is an eigenvector; the verdict uses the remaining (transverse)
    eigenvalues. The analytic Jacobian is cross-checked against central
    differences (``fd_error``). If ``printed`` is a reference Jacobian that
    differs from the computed one, both spectra are recorded under
    ``discrepancy`` and nothing is asserted about which one is intended.
    """
    J = replicator_jacobian(sys, p)
    Jf = np.array([[float(x) for x in row] for row in J], dtype=float).reshape(sys.n, sys.n)
    pf = np.array([float(v) for v in p])
    fd = jacobian_fd(lambda x: replicator_field(sys, x, exact=False), pf)
    fd_error = float(np.max(np.abs(fd - Jf))) if sys.n else 0.0
    values = eig_dense(Jf)
    kinds = [classify_eigenvalue(z, tol) for z in values]

    ones_value = None
    transverse = list(values)
    if sys.n:
        image = Jf @ np.ones(sys.n)
        lam = image.mean()
        if np.max(np.abs(image - lam)) <= tol:
            ones_value = complex(lam)
            idx = min(range(len(values)), key=lambda i: abs(values[i] - ones_value))
            transverse.pop(idx)

    discrepancy = None
    if printed is not None:
        P = np.array([[float(as_fraction(x)) for x in row] for row in printed], dtype=float)
        diff = float(np.max(np.abs(P - Jf)))
        if diff > tol:
            pv = eig_dense(P)
            discrepancy = {
                "max_abs_difference": diff,
                "printed_eigenvalues": [[z.real, z.imag] for z in pv],
                "printed_kinds": [classify_eigenvalue(z, tol) for z in pv],
            }
    return StabilityReport(values, kinds, Jf.tolist(), ones_value, transverse, _verdict(transverse, tol), fd_error, discrepancy)


def replicator_tangent(sys: ReplicatorSystem, part: Partition, trials: int = 10, seed: int = 0) -> bool:
    """Exact tangency of the field to the polydiagonal of ``part`` at generic points.

    Class values are distinct nonzero rationals.
    """
    if part.size != sys.n:
        raise DimensionMismatch("partition does not match system size")
    rng = random.Random(seed)
    for _ in range(trials):
        y = random_rational_point(rng, part.n_classes)
        F = replicator_field(sys, [y[c] for c in part.labels], exact=True)
        first: dict[int, Fraction] = {}
        for i, c in enumerate(part.labels):
            if first.setdefault(c, F[i]) != F[i]:
                return False
    return True


def replicator_synchrony(sys: ReplicatorSystem, cap: int = DEFAULT_CAP, seed: int = 0) -> list[Partition]:
    """Every partition whose polydiagonal is invariant under ``K``.

    Each one is confirmed by exact tangency of the replicator field; a
    disagreement raises ``RuntimeError``.
    """
    found = enumerate_equitable(sys.K, cap=cap)
    for part in found:
        if not replicator_tangent(sys, part, seed=seed):
            raise RuntimeError(f"{part!r} is K-invariant but the replicator field is not tangent to it")
    return found


def replicator_hypergraph(sys: ReplicatorSystem) -> Hypergraph:
    """The underlying hypernetwork: edges ``({j}, {i})`` weight ``K_ij`` and
    ``({k, l}, {i})`` weight ``-H_kl`` for every cell ``i`` (zero weights dropped)."""
    edges = []
    n = sys.n
    for i in range(n):
        for j in range(n):
            if sys.K[i][j]:
                edges.append({"tail": [j], "head": [i], "weight": sys.K[i][j]})
        for k in range(n):
            for l in range(n):
                if sys.H[k][l]:
                    edges.append({"tail": [k, l], "head": [i], "weight": -sys.H[k][l]})
    return build_hypergraph(n, edges)

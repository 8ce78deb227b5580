"""Small dense eigenvalue solver and exact matrix helpers.

``eig_dense`` reduces to upper Hessenberg form with Householder reflections
and then runs the Francis double-shift QR iteration, deflating one or two
eigenvalues at a time. Meant for matrices up to 64 x 64.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exceptions import DimensionMismatch, NoConvergence

__all__ = ["hessenberg", "eig_dense", "eigvec_residuals", "rational_matrix", "mat_mul", "mat_sub", "mat_scale"]

MAX_SIZE = 64
MAX_ITER_PER_EIGENVALUE = 60


def _as_square(M) -> np.ndarray:
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def hessenberg(M) -> np.ndarray:
    """Upper Hessenberg matrix orthogonally similar to ``M``."""
    A = _as_square(M).copy()
    n = A.shape[0]
    for k in range(n - 2):
        x = A[k + 1:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        alpha = -math.copysign(norm_x, x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        A[k + 1:, k:] -= 2.0 * np.outer(v, v @ A[k + 1:, k:])
        A[:, k + 1:] -= 2.0 * np.outer(A[:, k + 1:] @ v, v)
        A[k + 2:, k] = 0.0
    return A


def _hqr(a: np.ndarray) -> list[complex]:
    n = a.shape[0]
    wr = [0.0] * n
    wi = [0.0] * n
    anorm = sum(abs(a[i, j]) for i in range(n) for j in range(max(i - 1, 0), n))
    nn = n - 1
    t = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) + s == s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn], wi[nn] = x + t, 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1], wi[nn] = -z, z
                nn -= 2
                break
            if its >= MAX_ITER_PER_EIGENVALUE:
                raise NoConvergence(f"QR iteration did not converge after {its} sweeps")
            if its in (10, 20, 40):
                # exceptional shift to break cycles
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p, q, r = p / s, q / s, r / s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p, q, r = p / x, q / x, r / x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x, y, z = p / s, q / s, r / s
                q, r = q / p, r / p
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    if k != nn - 1:
                        p += r * a[k + 2, j]
                        a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
                for i in range(l, min(nn, k + 3) + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    if k != nn - 1:
                        p += z * a[i, k + 2]
                        a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    return [complex(r, i) for r, i in zip(wr, wi)]


def eig_dense(M, vectors: bool = False):
    """Eigenvalues of a real square matrix, with multiplicity, sorted by (Re, Im).

    With ``vectors=True`` also returns unit eigenvectors (columns of a complex
    array) from inverse iteration; check them with :func:`eigvec_residuals`.
    """
    A = _as_square(M)
    n = A.shape[0]
    if n > MAX_SIZE:
        raise DimensionMismatch(f"eig_dense supports at most {MAX_SIZE}x{MAX_SIZE}, got {n}x{n}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if n == 0:
        return ([], np.zeros((0, 0), complex)) if vectors else []
    values = sorted(_hqr(hessenberg(A)), key=lambda z: (z.real, z.imag))
    if not vectors:
        return values
    return values, _inverse_iteration(A, values)


def _inverse_iteration(A: np.ndarray, values: Sequence[complex]) -> np.ndarray:
    n = A.shape[0]
    scale = max(np.linalg.norm(A, 2), 1.0)
    V = np.zeros((n, n), dtype=complex)
    rng = np.random.default_rng(0)
    for col, lam in enumerate(values):
        shift = lam + 1e-10 * scale * (1 + 1j)
        B = A.astype(complex) - shift * np.eye(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        for _ in range(3):
            try:
                v = np.linalg.solve(B, v)
            except np.linalg.LinAlgError:
                B = B + 1e-14 * scale * np.eye(n)
                v = np.linalg.solve(B, v)
            v /= np.linalg.norm(v)
        V[:, col] = v
    return V


def eigvec_residuals(M, values: Sequence[complex], vectors: np.ndarray) -> list[float]:
    """``||M v - lambda v||`` for each returned eigenpair."""
    A = _as_square(M)
    return [float(np.linalg.norm(A @ vectors[:, i] - lam * vectors[:, i])) for i, lam in enumerate(values)]


def rational_matrix(rows) -> list[list[Fraction]]:
    out = []
    for row in rows:
        out.append([x if isinstance(x, Fraction) else Fraction(x) if not isinstance(x, str) else Fraction(x.strip()) for x in row])
    return out


def mat_mul(A, B):
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in zip(*B)] for row in A]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]

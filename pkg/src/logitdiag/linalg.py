"""Cholesky factorisation and solves for small dense SPD systems."""

from __future__ import annotations

import math

import numpy as np

PIVOT_TOL = 1e-12


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    def __init__(self, column: int, pivot: float):
        super().__init__(
            f"matrix is not positive definite: pivot {pivot:.3g} at column {column}"
        )
        self.column = column
        self.pivot = pivot


def cholesky(A, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L^T = A``.

    Raises :class:`NotPositiveDefiniteError` when a squared pivot falls to
    ``pivot_tol`` or below.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=1e-10, atol=0.0):
        raise ValueError("matrix is not symmetric")
    k = A.shape[0]
    L = np.zeros_like(A)
    for j in range(k):
        d = A[j, j] - L[j, :j] @ L[j, :j]
        if not d > pivot_tol:
            raise NotPositiveDefiniteError(j, d)
        L[j, j] = math.sqrt(d)
        L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def cho_solve(L: np.ndarray, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    k = L.shape[0]
    if b.shape[0] != k:
        raise ValueError(f"right-hand side has {b.shape[0]} rows, matrix has {k}")
    # forward then back substitution
    u = np.array(b, dtype=float, copy=True)
    for i in range(k):
        u[i] = (u[i] - L[i, :i] @ u[:i]) / L[i, i]
    for i in reversed(range(k)):
        u[i] = (u[i] - L[i + 1:, i] @ u[i + 1:]) / L[i, i]
    return u


def solve_spd(A, b, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Solve ``A x = b`` for symmetric positive-definite ``A``."""
    return cho_solve(cholesky(A, pivot_tol), b)


def inv_spd(A, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    L = cholesky(A, pivot_tol)
    inv = cho_solve(L, np.eye(L.shape[0]))
    return 0.5 * (inv + inv.T)

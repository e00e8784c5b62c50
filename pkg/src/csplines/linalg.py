"""Rank-revealing dense linear algebra on top of LAPACK's pivoted QR."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import DomainError

__all__ = ["DEFAULT_TOL", "LstsqResult", "least_squares", "numerical_rank", "null_space"]

DEFAULT_TOL = 1e-10


class LstsqResult(NamedTuple):
    b: np.ndarray
    effective_rank: int
    residual_norm: float


def _as_matrix(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    return A


def _check_tol(tol):
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")


def _rank_from_r(R, tol):
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return 0
    return int(np.count_nonzero(diag > tol * diag[0]))


def numerical_rank(A, tol: float = DEFAULT_TOL) -> int:
    """Number of pivoted-QR diagonal entries above ``tol`` times the largest."""
    A = _as_matrix(A)
    _check_tol(tol)
    if A.size == 0:
        return 0
    R, _ = scipy.linalg.qr(A, mode="r", pivoting=True)
    return _rank_from_r(R, tol)


def least_squares(A, z, tol: float = DEFAULT_TOL) -> LstsqResult:
    """Minimum-norm least-squares solution of ``A b ~ z``.

    Column-pivoted QR fixes the effective rank ``r``; the leading ``r`` rows
    of ``R`` are then factored once more (``R1.T = Z T``) so that the
    returned ``b`` lies in the row space of ``A`` and hence has minimum norm
    among all minimisers.

    Parameters
    ----------
    A : array_like, shape (N, m)
    z : array_like, shape (N,)
    tol : float
        Relative threshold on the pivoted diagonal of ``R``.

    Returns
    -------
    LstsqResult
        ``(b, effective_rank, residual_norm)``.
    """
    A = _as_matrix(A)
    z = np.asarray(z, dtype=float).ravel()
    _check_tol(tol)
    n_rows, n_cols = A.shape
    if n_rows < 1 or n_cols < 1:
        raise DomainError(f"least squares needs a non-empty matrix, got shape {A.shape}")
    if z.size != n_rows:
        raise ValueError(f"right-hand side has {z.size} entries, matrix has {n_rows} rows")
    if not np.all(np.isfinite(z)):
        raise ValueError("right-hand side contains non-finite entries")

    Q, R, perm = scipy.linalg.qr(A, mode="economic", pivoting=True)
    rank = _rank_from_r(R, tol)
    b = np.zeros(n_cols)
    if rank > 0:
        c = Q[:, :rank].T @ z
        if rank == n_cols:
            y = scipy.linalg.solve_triangular(R[:rank, :rank], c)
        else:
            Z, T = scipy.linalg.qr(R[:rank, :].T, mode="economic")
            y = Z @ scipy.linalg.solve_triangular(T, c, trans="T")
        b[perm] = y
    residual = float(np.linalg.norm(A @ b - z))
    return LstsqResult(b, rank, residual)


def null_space(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the null space of ``A``.

    Obtained from a pivoted QR of ``A.T``: the trailing columns of the full
    ``Q`` are orthogonal to the row space.

    Returns
    -------
    ndarray, shape (n, n - rank)
    """
    A = _as_matrix(A)
    _check_tol(tol)
    n = A.shape[1]
    if A.shape[0] == 0 or not np.any(A):
        return np.eye(n)
    Q, R, _ = scipy.linalg.qr(A.T, mode="full", pivoting=True)
    return Q[:, _rank_from_r(R, tol):]

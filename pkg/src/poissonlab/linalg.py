"""Minimal dense linear algebra: matrix products, a normal-equation
pseudoinverse for skinny full-rank matrices, and a Thomas solver for
tridiagonal systems.

Matrices and vectors are plain float64 numpy arrays (row-major). The
pseudoinverse deliberately implements (X^T X)^{-1} X^T through a
Cholesky factorization of the normal equations rather than an SVD: the
design matrices in this package have at most a handful of columns, and
the normal-equation route keeps the arithmetic auditable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, SingularMatrixError

# A factorization pivot below this fraction of the largest diagonal entry
# is treated as rank deficiency.
PIVOT_RTOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one row and column."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def as_vector(a) -> np.ndarray:
    """Coerce to a 1-D float64 array with at least one entry."""
    v = np.asarray(a, dtype=float)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ShapeError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit inner-dimension check."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def cholesky_spd(a: np.ndarray) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric positive-definite matrix.

    Raises SingularMatrixError when any pivot falls below
    PIVOT_RTOL times the largest diagonal entry, which covers both
    rank-deficient and non-positive-definite inputs.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    threshold = PIVOT_RTOL * float(np.max(np.abs(np.diag(a))))
    lower = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - lower[j, :j] @ lower[j, :j]
        if not (pivot > threshold):
            raise SingularMatrixError(
                f"pivot {pivot:.3e} at column {j} below threshold {threshold:.3e}"
            )
        lower[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def solve_cholesky(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (L L^T) x = rhs given the lower Cholesky factor L.

    rhs may be a vector or a matrix of stacked right-hand-side columns.
    """
    n = lower.shape[0]
    y = np.zeros_like(rhs, dtype=float)
    for i in range(n):
        y[i] = (rhs[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    x = np.zeros_like(y)
    for i in reversed(range(n)):
        x[i] = (y[i] - lower[i + 1 :, i] @ x[i + 1 :]) / lower[i, i]
    return x


def pseudoinverse(x) -> np.ndarray:
    """Moore-Penrose pseudoinverse (X^T X)^{-1} X^T of a skinny full-rank matrix.

    Requires rows >= cols. Rank deficiency of X^T X surfaces as
    SingularMatrixError.
    """
    x = as_matrix(x)
    rows, cols = x.shape
    if rows < cols:
        raise ShapeError(f"expected rows >= cols, got shape {x.shape}")
    xtx = x.T @ x
    lower = cholesky_spd(xtx)
    return solve_cholesky(lower, x.T)


@dataclass(frozen=True)
class TridiagonalSystem:
    """A·u = rhs with A given by its sub-, main- and super-diagonals."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sub", np.asarray(self.sub, dtype=float))
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=float))
        object.__setattr__(self, "sup", np.asarray(self.sup, dtype=float))
        object.__setattr__(self, "rhs", np.asarray(self.rhs, dtype=float))
        n = self.diag.shape[0]
        if self.diag.ndim != 1 or n < 1:
            raise ShapeError("diag must be a vector of length >= 1")
        for name, arr, want in (
            ("sub", self.sub, n - 1),
            ("sup", self.sup, n - 1),
            ("rhs", self.rhs, n),
        ):
            if arr.ndim != 1 or arr.shape[0] != want:
                raise ShapeError(f"{name} must have length {want}, got {arr.shape}")

    @property
    def n(self) -> int:
        return self.diag.shape[0]


def solve_tridiagonal(system: TridiagonalSystem) -> np.ndarray:
    """Thomas algorithm without pivoting.

    Intended for diagonally dominant systems (the finite-difference
    Laplacian qualifies); a vanishing pivot raises SingularMatrixError.
    """
    n = system.n
    scale = max(1.0, float(np.max(np.abs(system.diag))))
    tiny = PIVOT_RTOL * scale
    sup_over_pivot = np.empty(n - 1) if n > 1 else np.empty(0)
    work = np.empty(n)

    pivot = system.diag[0]
    if abs(pivot) <= tiny:
        raise SingularMatrixError(f"zero pivot at row 0 ({pivot:.3e})")
    work[0] = system.rhs[0] / pivot
    if n > 1:
        sup_over_pivot[0] = system.sup[0] / pivot
    for i in range(1, n):
        pivot = system.diag[i] - system.sub[i - 1] * sup_over_pivot[i - 1]
        if abs(pivot) <= tiny:
            raise SingularMatrixError(f"zero pivot at row {i} ({pivot:.3e})")
        work[i] = (system.rhs[i] - system.sub[i - 1] * work[i - 1]) / pivot
        if i < n - 1:
            sup_over_pivot[i] = system.sup[i] / pivot

    u = np.empty(n)
    u[n - 1] = work[n - 1]
    for i in reversed(range(n - 1)):
        u[i] = work[i] - sup_over_pivot[i] * u[i + 1]
    return u

"""Isotropic covariance kernels on a product of two spheres.

The admissible class on S^{d1} × S^{d2} is the double series

    k(x1, x2) = c · Σ_{m,n} a_{mn} P̃_m^{λ1}(x1) P̃_n^{λ2}(x2)

with nonnegative summable coefficients. A kernel is separable exactly when
the coefficient matrix has rank one, which is decided here by checking all
2×2 minors against a relative tolerance.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateZeroError,
    DomainError,
    NormalizationError,
    ZeroMassError,
)
from .gegenbauer import GegenbauerBasis, eval_sequence
from .schoenberg import NORMALIZATION_TOL, SchoenbergSequence, _check_nonnegative


@dataclass(frozen=True)
class ProductSphereKernel:
    """Coefficient matrix a_{mn} (rows: first sphere, cols: second) with
    unit total mass, plus the overall scale c."""

    coeff_matrix: np.ndarray
    scale_c: float
    basis1: GegenbauerBasis
    basis2: GegenbauerBasis

    def __post_init__(self):
        arr = np.array(self.coeff_matrix, dtype=float, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise DomainError("coeff_matrix must be a nonempty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coeff_matrix must be finite")
        _check_nonnegative(arr)
        if abs(arr.sum() - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(
                f"stored coefficients must sum to 1 within {NORMALIZATION_TOL}, got {arr.sum()!r}"
            )
        if not (math.isfinite(self.scale_c) and self.scale_c > 0):
            raise DomainError(f"scale_c must be a positive real, got {self.scale_c}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeff_matrix", arr)

    @property
    def truncations(self) -> tuple:
        """Largest retained degrees (M, N)."""
        return (self.coeff_matrix.shape[0] - 1, self.coeff_matrix.shape[1] - 1)


def make_ps_kernel(
    matrix, basis1: GegenbauerBasis, basis2: GegenbauerBasis, normalize: bool = False
) -> ProductSphereKernel:
    """Validate a coefficient matrix into a ProductSphereKernel.

    With `normalize` the total mass moves into `scale_c`; otherwise the
    entries must already sum to 1.
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise DomainError("matrix must be a nonempty 2-D array")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix must be finite")
    _check_nonnegative(arr)
    total = float(arr.sum())
    if total == 0.0:
        raise ZeroMassError("all coefficients are zero")
    if normalize:
        return ProductSphereKernel(arr / total, total, basis1, basis2)
    return ProductSphereKernel(arr, 1.0, basis1, basis2)


def ps_kernel_eval(kernel: ProductSphereKernel, x1, x2):
    """k(x1, x2) = c · Σ a_{mn} P̃_m(x1) P̃_n(x2); x1 and x2 broadcast."""
    x1_b, x2_b = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    m_max, n_max = kernel.truncations
    t1 = eval_sequence(kernel.basis1, m_max, x1_b)
    t2 = eval_sequence(kernel.basis2, n_max, x2_b)
    value = kernel.scale_c * np.einsum("mn,m...,n...->...", kernel.coeff_matrix, t1, t2)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class Separable:
    """Rank-one witness: coeff_matrix ≈ outer(row_factors, col_factors)."""

    row_factors: np.ndarray
    col_factors: np.ndarray


@dataclass(frozen=True)
class NonSeparable:
    """A violating 2×2 minor (m, n, m', n') and its determinant value."""

    minor: tuple
    value: float


def separability_test(kernel: ProductSphereKernel, tol: float = 1e-9):
    """Decide whether the coefficient matrix is rank one.

    All 2×2 minors a_{mn} a_{m'n'} − a_{mn'} a_{m'n} must vanish within
    tol · (max entry)². Returns Separable with nonnegative factors whose
    outer product reconstructs the matrix, or NonSeparable with the first
    violating minor in row-pair-major order.
    """
    a = kernel.coeff_matrix
    a_max = float(a.max())
    if a_max == 0.0:
        raise DegenerateZeroError("coefficient matrix is identically zero")
    threshold = tol * a_max * a_max

    rows, cols = a.shape
    col_pairs = np.triu_indices(cols, k=1)
    for m in range(rows - 1):
        for m2 in range(m + 1, rows):
            outer = np.outer(a[m], a[m2])
            # (outer - outer.T)[n, n2] = a[m,n] a[m2,n2] - a[m,n2] a[m2,n]
            vals = (outer - outer.T)[col_pairs]
            bad = np.flatnonzero(np.abs(vals) > threshold)
            if bad.size:
                k = int(bad[0])
                n, n2 = int(col_pairs[0][k]), int(col_pairs[1][k])
                return NonSeparable(minor=(m, n, m2, n2), value=float(vals[k]))

    i, j = np.unravel_index(int(np.argmax(a)), a.shape)
    row_factors = a[:, j].copy()
    col_factors = a[i, :] / a[i, j]
    return Separable(row_factors=row_factors, col_factors=col_factors)


def outer_product_kernel(
    seq1: SchoenbergSequence, seq2: SchoenbergSequence
) -> ProductSphereKernel:
    """The separable kernel k1(x1) k2(x2) as a rank-one coefficient matrix."""
    matrix = np.outer(seq1.coeffs, seq2.coeffs)
    scale = seq1.scale_c * seq2.scale_c
    return ProductSphereKernel(matrix, scale, seq1.basis, seq2.basis)

"""Dense symmetric / SPD kernels.

Symmetric matrices are carried as plain ``numpy.ndarray`` objects that went
through :func:`sym_matrix`, which symmetrizes and validates them. Every
kernel here returns a fresh array and never mutates its inputs.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

__all__ = [
    "NotPositiveDefinite",
    "DimensionMismatch",
    "CholeskyFactor",
    "sym_matrix",
    "cholesky",
    "spd_inverse",
    "factor_inverse",
    "log_det",
    "frob_inner",
    "hard_threshold",
    "soft_threshold",
]


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Raised when a Cholesky factorization hits a non-positive pivot.

    ``pivot_index`` is the 0-based index of the failing pivot. ``stage``
    is filled in by callers that perform several inversions per step.
    """

    def __init__(self, pivot_index, stage=None):
        self.pivot_index = pivot_index
        self.stage = stage
        where = f" during {stage}" if stage else ""
        super().__init__(
            f"matrix is not positive definite (pivot {pivot_index}){where}")


class DimensionMismatch(ValueError):
    pass


def sym_matrix(a):
    """Return ``(a + a.T) / 2`` as a float64 array after validating it.

    Parameters
    ----------
    a : array-like
        Square matrix (a scalar is promoted to 1x1).

    Returns
    -------
    ndarray
        Exactly symmetric copy of ``a``.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return (a + a.T) / 2


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular ``lower`` with ``A = lower @ lower.T``."""

    lower: np.ndarray

    @property
    def dim(self):
        return self.lower.shape[0]

    def reconstruct(self):
        return self.lower @ self.lower.T


def cholesky(a):
    """Cholesky factor of an SPD matrix.

    Raises
    ------
    NotPositiveDefinite
        With the 0-based index of the first non-positive pivot.
    """
    a = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise NotPositiveDefinite(0)
    c, info = lapack.dpotrf(a, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefinite(info - 1)
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    return CholeskyFactor(c)


def spd_inverse(a):
    """Inverse of an SPD matrix via its Cholesky factor, re-symmetrized."""
    return factor_inverse(cholesky(a))


def factor_inverse(f):
    """``A^{-1}`` from a :class:`CholeskyFactor` of ``A``."""
    inv, info = lapack.dpotri(f.lower, lower=1)
    if info != 0:
        raise NotPositiveDefinite(max(info - 1, 0))
    # dpotri fills the lower triangle only; mirroring makes it exactly symmetric
    inv = np.tril(inv)
    return inv + np.tril(inv, -1).T


def log_det(f):
    """``log det A`` from a :class:`CholeskyFactor` of ``A``."""
    return 2.0 * float(np.sum(np.log(np.diag(f.lower))))


def frob_inner(a, b):
    """Frobenius inner product ``sum_ij a_ij b_ij``."""
    a = np.asarray(a)
    b = np.asarray(b)
    _check_same_shape(a, b)
    return float(np.sum(a * b))


def _diag_mask(a, skip_diagonal):
    mask = np.zeros(a.shape, dtype=bool)
    if skip_diagonal:
        np.fill_diagonal(mask, True)
    return mask


def hard_threshold(a, thr, skip_diagonal=True):
    """Zero every entry with ``|a_ij| < thr``.

    Entries with magnitude exactly ``thr`` survive. When ``skip_diagonal``
    is set the diagonal is left untouched.
    """
    if not thr > 0:
        raise ValueError("thr must be positive")
    a = np.asarray(a, dtype=np.float64)
    out = np.where(np.abs(a) < thr, 0.0, a)
    keep = _diag_mask(a, skip_diagonal)
    out[keep] = a[keep]
    return out


def soft_threshold(a, t, skip_diagonal=True):
    """Entrywise ``sign(a) * max(|a| - t, 0)``, diagonal exempt if flagged."""
    if not t > 0:
        raise ValueError("t must be positive")
    a = np.asarray(a, dtype=np.float64)
    out = np.sign(a) * np.maximum(np.abs(a) - t, 0.0)
    keep = _diag_mask(a, skip_diagonal)
    out[keep] = a[keep]
    return out

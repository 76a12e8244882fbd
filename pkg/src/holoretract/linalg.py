"""Dense complex linear algebra at desk scale.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``;
the helpers here validate shapes/finiteness and fix the rank cutoff used
throughout the package.
"""

import numpy as np

from .errors import DimensionError, RankDeficient

#: relative singular-value cutoff for every rank decision
RANK_RTOL = 1e-10


def as_vector(x, dim=None):
    v = np.asarray(x, dtype=complex)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {v.shape[0]}")
    return v


def as_matrix(a, shape=None):
    A = np.asarray(a, dtype=complex)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if shape is not None:
        for want, got in zip(shape, A.shape):
            if want is not None and want != got:
                raise DimensionError(f"expected shape {shape}, got {A.shape}")
    return A


def _tolerance(s):
    return RANK_RTOL * (s[0] if s.size else 0.0)


def rank(A):
    A = as_matrix(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > _tolerance(s))) if s[0] > 0 else 0


def solve_least_squares(A, b):
    """Minimize ``||A x - b||_2`` for ``A`` of full column rank.

    Raises :class:`RankDeficient` when the columns of ``A`` are dependent.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    if rank(A) < A.shape[1]:
        raise RankDeficient(f"matrix of shape {A.shape} has rank {rank(A)}")
    if A.shape[0] == A.shape[1]:
        return np.linalg.solve(A, b)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return x


def kernel_basis(A):
    """Orthonormal basis of the null space, as a list of vectors."""
    A = as_matrix(A)
    n = A.shape[1]
    if A.shape[0] == 0:
        return list(np.eye(n, dtype=complex))
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    if s.size == 0 or s[0] == 0:
        r = 0
    else:
        r = int(np.sum(s > _tolerance(s)))
    return [Vh[k].conj().copy() for k in range(r, n)]


def pseudo_inverse(A):
    A = as_matrix(A)
    return np.linalg.pinv(A, rcond=RANK_RTOL)


def orthonormal_range(A):
    """Orthonormal basis of the column space (columns of the result)."""
    A = as_matrix(A)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return U[:, :0]
    return U[:, : int(np.sum(s > _tolerance(s)))]


def complex_to_real_matrix(A):
    """Real ``(2m, 2n)`` matrix acting on ``[Re x; Im x]``."""
    A = np.asarray(A, dtype=complex)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])

"""Dense complex matrix arithmetic and a deterministic Hermitian eigensolver.

Matrices are plain ``numpy.ndarray`` values of dtype complex128; every
operation validates shapes and returns fresh arrays.  The eigensolver is a
cyclic Jacobi iteration (see :mod:`entropylab.kernels`) with a fixed sweep
order, a fixed ordering rule inside degenerate clusters and a fixed phase
convention, so identical inputs produce identical outputs.
"""

from dataclasses import dataclass

import numpy as np

from .backend import jacobi_kernel
from .errors import ConvergenceError, DimensionMismatchError, ValidationError

HERMITIAN_TOL = 1e-10
OFFDIAG_THRESHOLD = 1e-12
MAX_SWEEPS = 100
DEGENERACY_GAP = 1e-9
PHASE_MODULUS_MIN = 1e-8


def as_matrix(x):
    """Validate and return ``x`` as a square complex128 matrix."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValidationError("matrix contains NaN or Inf entries")
    return m


def _require_same_dim(x, y):
    if x.shape != y.shape:
        raise DimensionMismatchError(f"dimension mismatch: {x.shape} vs {y.shape}")


def hs_inner(x, y):
    """Hilbert-Schmidt inner product Tr(y* x)."""
    x = as_matrix(x)
    y = as_matrix(y)
    _require_same_dim(x, y)
    return complex(np.sum(np.conj(y) * x))


def matmul(x, y):
    x = as_matrix(x)
    y = as_matrix(y)
    _require_same_dim(x, y)
    return x @ y


def add(x, y):
    x = as_matrix(x)
    y = as_matrix(y)
    _require_same_dim(x, y)
    return x + y


def scale(alpha, x):
    return complex(alpha) * as_matrix(x)


def adjoint(x):
    return as_matrix(x).conj().T.copy()


def trace(x):
    return complex(np.trace(as_matrix(x)))


def frobenius_norm(x):
    return float(np.linalg.norm(as_matrix(x)))


@dataclass
class HermitianEig:
    """Eigenvalues sorted non-increasing with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def projection(self, i):
        v = self.eigenvectors[:, i]
        return np.outer(v, v.conj())

    def projections(self):
        return np.stack([self.projection(i) for i in range(self.n)])


def _order_with_ties(values, vectors):
    # Stable descending sort, then reorder degenerate clusters by
    # lexicographic comparison of eigenvector component moduli.
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    n = values.shape[0]
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop - 1] - values[stop] < DEGENERACY_GAP:
            stop += 1
        if stop - start > 1:
            keys = [tuple(np.abs(vectors[:, k])) for k in range(start, stop)]
            sub = sorted(range(start, stop), key=lambda k: keys[k - start])
            values[start:stop] = values[sub]
            vectors[:, start:stop] = vectors[:, sub]
        start = stop
    return values, vectors


def _fix_phases(vectors):
    n = vectors.shape[0]
    for j in range(n):
        col = vectors[:, j]
        for k in range(n):
            mod = abs(col[k])
            if mod > PHASE_MODULUS_MIN:
                vectors[:, j] = col * (np.conj(col[k]) / mod)
                break
    return vectors


def hermitian_eig(m, backend=None):
    """Deterministic eigendecomposition of a Hermitian matrix.

    Raises ``ValidationError`` for non-Hermitian input and
    ``ConvergenceError`` if the sweep cap is hit before the off-diagonal
    norm reaches its threshold.
    """
    m = as_matrix(m)
    herm_defect = float(np.linalg.norm(m - m.conj().T))
    if herm_defect > HERMITIAN_TOL:
        raise ValidationError(
            f"matrix is not Hermitian: ||m - m*||_F = {herm_defect:.3e}"
        )
    work = (m + m.conj().T) / 2.0
    scale_f = max(1.0, float(np.linalg.norm(work)))
    threshold = OFFDIAG_THRESHOLD * scale_f
    kernel = jacobi_kernel(backend)
    values, vectors, sweeps, off = kernel(work, threshold, MAX_SWEEPS)
    if off > threshold:
        raise ConvergenceError(
            f"Jacobi sweep cap ({MAX_SWEEPS}) hit with off-diagonal norm "
            f"{off:.3e} > {threshold:.3e}",
            residual=off,
        )
    values, vectors = _order_with_ties(values, vectors)
    vectors = _fix_phases(vectors)
    return HermitianEig(eigenvalues=values, eigenvectors=vectors)

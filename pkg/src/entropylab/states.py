"""Entropy function, probability vectors, density matrices, majorization.

All entropies use the natural logarithm; the CLI converts to bits for
display only.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import matrix_core
from .errors import DimensionMismatchError, ValidationError

ETA_CLAMP = 1e-12
PROB_NEG_CLAMP = 1e-12
PROB_SUM_TOL = 1e-10
DENSITY_EV_CLAMP = 1e-10
DENSITY_TRACE_TOL = 1e-10
MAJORIZE_SLACK = 1e-10


def eta(t):
    """-t ln t on [0, 1], with eta(0) = 0.  Accepts scalars or arrays.

    Inputs may stray past the interval by at most 1e-12 and are clamped
    back; anything further out raises.
    """
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < -ETA_CLAMP) or np.any(arr > 1.0 + ETA_CLAMP):
        raise ValidationError(f"eta argument outside [0,1] clamp window: {t!r}")
    arr = np.clip(arr, 0.0, 1.0)
    out = np.zeros_like(arr)
    pos = arr > 0.0
    out[pos] = -arr[pos] * np.log(arr[pos])
    return float(out) if np.isscalar(t) or arr.ndim == 0 else out


def prob_vector(weights):
    """Validate weights as a probability vector; returns them sorted
    non-increasing with tiny negatives clamped to zero."""
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.size < 1:
        raise ValidationError("probability vector must be nonempty")
    if np.any(w < -PROB_NEG_CLAMP) or np.any(w > 1.0 + PROB_NEG_CLAMP):
        raise ValidationError(f"weights outside [0,1] clamp window: {w}")
    w = np.clip(w, 0.0, 1.0)
    total = w.sum()
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ValidationError(f"weights sum to {total}, not 1")
    return np.sort(w)[::-1].copy()


def shannon_entropy(weights):
    """Sum of eta over the entries of a probability vector, in nats."""
    w = prob_vector(weights)
    return float(eta(w).sum())


@dataclass(eq=False)
class SpectralDecomposition:
    """Sorted spectrum plus the matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def n(self):
        return self.values.shape[0]

    @cached_property
    def projections(self):
        cols = self.vectors
        return np.stack(
            [np.outer(cols[:, i], cols[:, i].conj()) for i in range(self.n)]
        )


@dataclass(eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    The spectral decomposition is computed on first use and cached; the
    positivity check (eigenvalues above -1e-10, tiny negatives clamped)
    happens at that point.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = matrix_core.as_matrix(self.matrix)
        herm = float(np.linalg.norm(m - m.conj().T))
        if herm > matrix_core.HERMITIAN_TOL:
            raise ValidationError(f"density matrix not Hermitian: defect {herm:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > DENSITY_TRACE_TOL:
            raise ValidationError(f"density matrix trace {tr}, expected 1")
        self.matrix = m

    @property
    def n(self):
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self):
        eig = matrix_core.hermitian_eig(self.matrix)
        values = eig.eigenvalues
        if values[-1] < -DENSITY_EV_CLAMP:
            raise ValidationError(
                f"density matrix has eigenvalue {values[-1]:.3e} < -{DENSITY_EV_CLAMP}"
            )
        return SpectralDecomposition(
            values=np.maximum(values, 0.0), vectors=eig.eigenvectors
        )

    @property
    def eigenvalues(self):
        return self.spectrum.values


def as_density(m):
    return m if isinstance(m, DensityMatrix) else DensityMatrix(m)


def von_neumann_entropy(d):
    """Shannon entropy of the eigenvalue vector of a density matrix."""
    return float(eta(as_density(d).eigenvalues).sum())


def majorizes(lam, mu, slack=MAJORIZE_SLACK):
    """True iff every top-k partial sum of lam dominates that of mu."""
    lam = np.asarray(lam, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    if lam.shape != mu.shape:
        raise DimensionMismatchError(f"length mismatch: {lam.shape} vs {mu.shape}")
    if np.any(np.diff(lam) > PROB_NEG_CLAMP) or np.any(np.diff(mu) > PROB_NEG_CLAMP):
        raise ValidationError("majorizes expects vectors sorted non-increasing")
    return bool(np.all(np.cumsum(lam) >= np.cumsum(mu) - slack))

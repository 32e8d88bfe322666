"""Positive unital trace-preserving maps on M_n(C).

A map is stored as its n^2 x n^2 transfer matrix acting on column-stacked
(vectorized) matrices.  In that convention the Hilbert-Schmidt adjoint is
the conjugate transpose of the transfer matrix and composition is matrix
multiplication.

Built-in constructors produce maps that are positive by construction; maps
built from a raw transfer matrix are only sample-tested for positivity
(deciding positivity of an arbitrary linear map is computationally hard).
"""

from dataclasses import dataclass, field

import numpy as np

from . import matrix_core
from .errors import DimensionMismatchError, ValidationError
from .matrix_core import as_matrix

UNITAL_TOL = 1e-9
TRACE_TOL = 1e-9
POSITIVITY_FLOOR = -1e-8
UNITARY_TOL = 1e-10
PROJECTION_TOL = 1e-9
BISTOCHASTIC_TOL = 1e-10
DEFAULT_POSITIVITY_SAMPLES = 200


def vec(x):
    """Column-stacking vectorization."""
    return np.asarray(x, dtype=np.complex128).reshape(-1, order="F")


def unvec(v, n):
    return np.asarray(v, dtype=np.complex128).reshape((n, n), order="F")


def _conjugation_transfer(left, right):
    # transfer of x -> left @ x @ right under column stacking
    return np.kron(right.T, left)


@dataclass(eq=False, repr=False)
class PutMap:
    """Positive unital Tr-preserving map as a transfer matrix plus metadata."""

    n: int
    transfer: np.ndarray
    provenance: str
    params: dict = field(default_factory=dict)
    certified_positive: bool = False

    def __repr__(self):
        return f"PutMap(n={self.n}, provenance={self.provenance!r})"


@dataclass
class ValidationReport:
    unital_residual: float
    trace_residual: float
    positivity_samples: int
    positivity_min_eigenvalue: float
    certified_positive: bool
    unital_pass: bool
    trace_pass: bool
    positivity_pass: bool

    @property
    def passed(self):
        return self.unital_pass and self.trace_pass and self.positivity_pass


def apply(phi, x):
    """Apply the map to a matrix."""
    x = as_matrix(x)
    if x.shape[0] != phi.n:
        raise DimensionMismatchError(
            f"map acts on {phi.n}x{phi.n}, got {x.shape[0]}x{x.shape[0]}"
        )
    return unvec(phi.transfer @ vec(x), phi.n)


def apply_to_stack(phi, mats):
    """Apply the map to a stack of matrices, shape (k, n, n)."""
    mats = np.asarray(mats, dtype=np.complex128)
    k = mats.shape[0]
    cols = mats.transpose(0, 2, 1).reshape(k, -1).T  # vec of each matrix
    out = phi.transfer @ cols
    return out.T.reshape(k, phi.n, phi.n).transpose(0, 2, 1)


def hs_adjoint(phi):
    """Adjoint with respect to <x, y> = Tr(y* x)."""
    transfer = phi.transfer.conj().T.copy()
    prov = phi.provenance
    params = dict(phi.params)
    if prov == "unitary-conj":
        params["u"] = params["u"].conj().T.copy()
    elif prov == "weighted-isometry":
        v = params["v"]
        params = {
            "a": np.ascontiguousarray(params["a"].T),
            "v": np.conj(v.transpose(1, 0, 3, 2)),
        }
    elif prov not in ("transpose", "depolarizing", "cond-expectation"):
        prov = "derived"
        params = {}
    return PutMap(
        n=phi.n,
        transfer=transfer,
        provenance=prov,
        params=params,
        certified_positive=phi.certified_positive,
    )


def compose(phi, psi):
    """Composition (phi after psi): transfer matrices multiply."""
    if phi.n != psi.n:
        raise DimensionMismatchError(f"dimension mismatch: {phi.n} vs {psi.n}")
    return PutMap(
        n=phi.n,
        transfer=phi.transfer @ psi.transfer,
        provenance="derived",
        certified_positive=phi.certified_positive and psi.certified_positive,
    )


def convex_combination(maps, weights):
    w = np.asarray(weights, dtype=np.float64)
    if len(maps) != w.size or w.size == 0:
        raise ValidationError("need one weight per map")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
        raise ValidationError("weights must be nonnegative and sum to 1")
    n = maps[0].n
    if any(m.n != n for m in maps):
        raise DimensionMismatchError("maps act on different dimensions")
    transfer = sum(wi * m.transfer for wi, m in zip(w, maps))
    return PutMap(
        n=n,
        transfer=transfer,
        provenance="convex-combo",
        certified_positive=all(m.certified_positive for m in maps),
    )


# ---------------------------------------------------------------------------
# constructors


def unitary_conjugation(u):
    u = as_matrix(u)
    n = u.shape[0]
    defect = float(np.linalg.norm(u.conj().T @ u - np.eye(n)))
    if defect > UNITARY_TOL:
        raise ValidationError(f"matrix is not unitary: ||u*u - I||_F = {defect:.3e}")
    return PutMap(
        n=n,
        transfer=_conjugation_transfer(u, u.conj().T),
        provenance="unitary-conj",
        params={"u": u.copy()},
        certified_positive=True,
    )


def identity_map(n):
    return unitary_conjugation(np.eye(n, dtype=np.complex128))


def transpose_map(n):
    nn = n * n
    transfer = np.zeros((nn, nn), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            transfer[i + j * n, j + i * n] = 1.0
    return PutMap(
        n=n,
        transfer=transfer,
        provenance="transpose",
        certified_positive=True,
    )


def depolarizing(n):
    vi = vec(np.eye(n, dtype=np.complex128))
    transfer = np.outer(vi, vi.conj()) / n
    return PutMap(
        n=n,
        transfer=transfer,
        provenance="depolarizing",
        certified_positive=True,
    )


def check_projection_family(projections, tol=PROJECTION_TOL):
    """Validate a complete family of minimal mutually orthogonal projections.

    Returns the family as an (n, n, n) array.
    """
    projs = np.asarray(projections, dtype=np.complex128)
    if projs.ndim != 3 or projs.shape[0] != projs.shape[1] or projs.shape[1] != projs.shape[2]:
        raise ValidationError(f"expected n projections of size n x n, got {projs.shape}")
    n = projs.shape[0]
    for i in range(n):
        p = projs[i]
        if np.linalg.norm(p - p.conj().T) > tol:
            raise ValidationError(f"projection {i} is not Hermitian")
        if np.linalg.norm(p @ p - p) > tol:
            raise ValidationError(f"projection {i} is not idempotent")
        if abs(np.trace(p) - 1.0) > tol:
            raise ValidationError(f"projection {i} is not minimal (trace != 1)")
        for k in range(i):
            if np.linalg.norm(projs[k] @ p) > tol:
                raise ValidationError(f"projections {k} and {i} are not orthogonal")
    if np.linalg.norm(projs.sum(axis=0) - np.eye(n)) > tol:
        raise ValidationError("projections do not sum to the identity")
    return projs


def conditional_expectation(projections):
    """Pinching onto the abelian algebra spanned by the projections:
    x -> sum_j Tr(p_j x) p_j."""
    projs = check_projection_family(projections)
    n = projs.shape[0]
    transfer = np.zeros((n * n, n * n), dtype=np.complex128)
    for j in range(n):
        vp = vec(projs[j])
        transfer += np.outer(vp, vp.conj())
    return PutMap(
        n=n,
        transfer=transfer,
        provenance="cond-expectation",
        params={"projections": projs},
        certified_positive=True,
    )


def _check_bistochastic(a, tol=BISTOCHASTIC_TOL):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if np.any(a < -tol):
        raise ValidationError("bistochastic matrix has a negative entry")
    if np.any(np.abs(a.sum(axis=0) - 1.0) > tol) or np.any(
        np.abs(a.sum(axis=1) - 1.0) > tol
    ):
        raise ValidationError("row/column sums differ from 1")
    return np.clip(a, 0.0, None)


def isometry_family(e_vectors, p_vectors):
    """Partial isometries v[i, j] = |p_i><e_j| from two orthonormal bases
    given as matrix columns."""
    e_vectors = as_matrix(e_vectors)
    p_vectors = as_matrix(p_vectors)
    n = e_vectors.shape[0]
    if p_vectors.shape[0] != n:
        raise DimensionMismatchError("bases have different dimensions")
    v = np.empty((n, n, n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            v[i, j] = np.outer(p_vectors[:, i], e_vectors[:, j].conj())
    return v


def weighted_isometry_map(a, v):
    """Map x -> sum_ij a_ij v_ij x v_ij* for a bistochastic weight matrix and
    a grid of partial isometries with v_ij* v_ij = e_j and v_ij v_ij* = p_i.

    Sends the source projection e_i to sum_j a_ji p_j.
    """
    a = _check_bistochastic(a)
    v = np.asarray(v, dtype=np.complex128)
    n = a.shape[0]
    if v.shape != (n, n, n, n):
        raise ValidationError(f"expected isometry grid of shape {(n, n, n, n)}, got {v.shape}")
    e_projs = np.empty((n, n, n), dtype=np.complex128)
    p_projs = np.empty((n, n, n), dtype=np.complex128)
    for j in range(n):
        e_projs[j] = v[0, j].conj().T @ v[0, j]
    for i in range(n):
        p_projs[i] = v[i, 0] @ v[i, 0].conj().T
    for i in range(n):
        for j in range(n):
            if np.linalg.norm(v[i, j].conj().T @ v[i, j] - e_projs[j]) > PROJECTION_TOL:
                raise ValidationError(f"v[{i},{j}]* v[{i},{j}] is not the source projection e_{j}")
            if np.linalg.norm(v[i, j] @ v[i, j].conj().T - p_projs[i]) > PROJECTION_TOL:
                raise ValidationError(f"v[{i},{j}] v[{i},{j}]* is not the range projection p_{i}")
    check_projection_family(e_projs)
    check_projection_family(p_projs)
    transfer = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            if a[i, j] != 0.0:
                transfer += a[i, j] * _conjugation_transfer(v[i, j], v[i, j].conj().T)
    return PutMap(
        n=n,
        transfer=transfer,
        provenance="weighted-isometry",
        params={"a": a, "v": v},
        certified_positive=True,
    )


def _vector_from_projection(p, tol=PROJECTION_TOL):
    # deterministic unit vector spanning a rank-one projection
    d = np.real(np.diag(p))
    k = int(np.argmax(d))
    if d[k] <= tol:
        raise ValidationError("projection has no usable diagonal pivot")
    col = p[:, k] / np.sqrt(d[k])
    for entry in col:
        if abs(entry) > 1e-8:
            return col * (np.conj(entry) / abs(entry))
    return col


def entropy_target_map(projections, mu):
    """Map x -> sum_k sum_j mu_{j+k-1 mod n} v_jk x v_jk* built on the given
    minimal projection family, with v_jk = |e_j><e_k|.

    Applied to the first projection it yields sum_j mu_j e_j, so the output
    entropy of that projection is exactly sum_j eta(mu_j).
    """
    projs = check_projection_family(projections)
    n = projs.shape[0]
    mu = np.asarray(mu, dtype=np.float64).reshape(-1)
    if mu.size != n:
        raise ValidationError(f"need {n} weights, got {mu.size}")
    if np.any(mu < -1e-12) or abs(mu.sum() - 1.0) > 1e-10:
        raise ValidationError("weights must be nonnegative and sum to 1")
    mu = np.clip(mu, 0.0, None)
    basis = np.column_stack([_vector_from_projection(projs[i]) for i in range(n)])
    transfer = np.zeros((n * n, n * n), dtype=np.complex128)
    for k in range(n):
        for j in range(n):
            w = mu[(j + k) % n]
            if w != 0.0:
                vjk = np.outer(basis[:, j], basis[:, k].conj())
                transfer += w * _conjugation_transfer(vjk, vjk.conj().T)
    return PutMap(
        n=n,
        transfer=transfer,
        provenance="entropy-target",
        params={"mu": mu, "projections": projs},
        certified_positive=True,
    )


def from_transfer(transfer):
    """Wrap a raw transfer matrix; positivity is only sample-tested."""
    transfer = np.asarray(transfer, dtype=np.complex128)
    if transfer.ndim != 2 or transfer.shape[0] != transfer.shape[1]:
        raise ValidationError(f"transfer matrix must be square, got {transfer.shape}")
    n = int(round(np.sqrt(transfer.shape[0])))
    if n * n != transfer.shape[0]:
        raise ValidationError(f"transfer size {transfer.shape[0]} is not a perfect square")
    return PutMap(n=n, transfer=transfer, provenance="transfer-raw")


# ---------------------------------------------------------------------------
# validation


def validate_put(phi, samples=DEFAULT_POSITIVITY_SAMPLES, seed=0):
    """Check unitality, trace preservation on the matrix-unit basis, and
    positivity on random PSD inputs (skipped when positivity is certified
    by construction and samples == 0)."""
    n = phi.n
    eye = np.eye(n, dtype=np.complex128)
    unital_residual = float(np.linalg.norm(apply(phi, eye) - eye))
    # Tr(Phi(E_ab)) for all matrix units at once: row vector vec(I)* T
    traces = vec(eye).conj() @ phi.transfer
    trace_residual = float(np.max(np.abs(traces - vec(eye).conj())))
    min_eig = np.inf
    drawn = 0
    if samples > 0:
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            x = g @ g.conj().T
            x /= np.trace(x).real
            image = apply(phi, x)
            image = (image + image.conj().T) / 2.0
            w = matrix_core.hermitian_eig(image).eigenvalues
            drawn += 1
            min_eig = min(min_eig, float(w[-1]))
    positivity_pass = phi.certified_positive or (
        drawn > 0 and min_eig >= POSITIVITY_FLOOR
    )
    return ValidationReport(
        unital_residual=unital_residual,
        trace_residual=trace_residual,
        positivity_samples=drawn,
        positivity_min_eigenvalue=float(min_eig) if drawn else float("nan"),
        certified_positive=phi.certified_positive,
        unital_pass=unital_residual <= UNITAL_TOL,
        trace_pass=trace_residual <= TRACE_TOL,
        positivity_pass=bool(positivity_pass),
    )

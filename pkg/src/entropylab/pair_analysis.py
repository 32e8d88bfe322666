"""Everything derived from one (state, map) pair.

Given a density matrix with spectrum ``lam`` / projections ``e_i`` and a
positive unital trace-preserving map whose output state has spectrum
``mu`` / projections ``p_j``, this module computes:

* the bistochastic matrix ``b`` with ``b_ij = Tr(Phi(e_i) p_j)``,
* the connecting unitary pairing the i-th input eigenbranch with the i-th
  output eigenbranch,
* the six entropy values attached to the pair,
* the support index sets ``I_j`` (rows feeding column j of b) and
  ``J_lambda`` (nonzero weights of lam).

Eigenvalue lists are always sorted non-increasing; the weighted entropies
are invariant under permutations of degenerate eigenbranches, which is the
well-definedness guarantee for everything downstream.
"""

from dataclasses import dataclass

import numpy as np

from . import channels, matrix_core, states
from .errors import DimensionMismatchError, ValidationError
from .states import DensityMatrix, as_density, eta

EPS_ZERO = 1e-9
B_BOUNDARY_CLAMP = 1e-12
B_SUM_TOL = 1e-9
TRANSPORT_TOL = 1e-8
CLUSTER_CONSTANCY_TOL = 1e-8


def as_bistochastic(entries, sum_tol=B_SUM_TOL, clamp=B_BOUNDARY_CLAMP):
    """Validate a bistochastic matrix; entries within ``clamp`` of [0, 1]
    are clamped onto the boundary, larger violations raise."""
    b = np.asarray(entries, dtype=np.float64)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {b.shape}")
    if np.any(b < -clamp) or np.any(b > 1.0 + clamp):
        raise ValidationError(
            f"entries outside [0,1] beyond clamp window: min {b.min()}, max {b.max()}"
        )
    b = np.clip(b, 0.0, 1.0)
    rows = b.sum(axis=1)
    cols = b.sum(axis=0)
    if np.any(np.abs(rows - 1.0) > sum_tol) or np.any(np.abs(cols - 1.0) > sum_tol):
        raise ValidationError(
            f"row/column sums differ from 1 beyond {sum_tol}: "
            f"rows {rows}, cols {cols}"
        )
    return b


@dataclass
class IndexSets:
    """Support sets of the pair: I[j] = rows with b_ij > 0, J_lambda =
    indices of nonzero weights (all 0-based)."""

    I: list
    J_lambda: frozenset


@dataclass
class ClusterValues:
    """Per-column averages of lam over I_j, with constancy diagnostics."""

    values: np.ndarray
    spreads: np.ndarray
    constant: np.ndarray


@dataclass(eq=False, repr=False)
class PairAnalysis:
    rho: DensityMatrix
    phi: channels.PutMap
    lam: np.ndarray
    mu: np.ndarray
    e_vectors: np.ndarray
    p_vectors: np.ndarray
    e_projs: np.ndarray
    p_projs: np.ndarray
    b: np.ndarray
    connecting_unitary: np.ndarray
    phi_d: np.ndarray
    phi_e: np.ndarray
    phi_star_p: np.ndarray
    s_phi_e: np.ndarray
    s_phi_star_p: np.ndarray
    s_rho: float
    s_out: float
    h_lambda_b: float
    h_mu_b: float
    s_rho_phi: float
    s_rho_phi_star: float

    @property
    def n(self):
        return self.lam.shape[0]

    @property
    def entropies(self):
        return {
            "S_rho": self.s_rho,
            "S_out": self.s_out,
            "H_lambda_b": self.h_lambda_b,
            "H_mu_b": self.h_mu_b,
            "S_rho_phi": self.s_rho_phi,
            "S_rho_phi_star": self.s_rho_phi_star,
        }

    def __repr__(self):
        return (
            f"PairAnalysis(n={self.n}, S_rho={self.s_rho:.6f}, "
            f"S_out={self.s_out:.6f}, H_lambda_b={self.h_lambda_b:.6f})"
        )


def _projections(vectors):
    n = vectors.shape[0]
    return np.stack([np.outer(vectors[:, i], vectors[:, i].conj()) for i in range(n)])


def _entropy_of_image(image, what):
    try:
        return states.von_neumann_entropy(DensityMatrix(image))
    except ValidationError as exc:
        raise ValidationError(f"{what} is not a density matrix: {exc}") from exc


def assemble(rho, phi, lam, e_vectors, mu, p_vectors):
    """Build a PairAnalysis from explicit spectral data.

    ``analyze`` is the normal entry point; this one exists so callers can
    relabel eigenbranches (permutations inside degenerate clusters) and
    check that the derived quantities do not move.
    """
    n = rho.n
    e_projs = _projections(e_vectors)
    p_projs = _projections(p_vectors)
    phi_e = channels.apply_to_stack(phi, e_projs)
    b_raw = np.einsum("kj,ikl,lj->ij", p_vectors.conj(), phi_e, p_vectors).real
    b = as_bistochastic(b_raw)
    transported = np.sort(lam @ b)[::-1]
    if float(np.max(np.abs(transported - mu))) > TRANSPORT_TOL:
        raise ValidationError(
            "transport identity violated: sorted(lam b) differs from mu by "
            f"{float(np.max(np.abs(transported - mu))):.3e}"
        )
    adjoint = channels.hs_adjoint(phi)
    phi_star_p = channels.apply_to_stack(adjoint, p_projs)
    s_phi_e = np.array(
        [_entropy_of_image(phi_e[i], f"Phi(e_{i})") for i in range(n)]
    )
    s_phi_star_p = np.array(
        [_entropy_of_image(phi_star_p[j], f"Phi*(p_{j})") for j in range(n)]
    )
    eta_b = eta(b)
    return PairAnalysis(
        rho=rho,
        phi=phi,
        lam=lam,
        mu=mu,
        e_vectors=e_vectors,
        p_vectors=p_vectors,
        e_projs=e_projs,
        p_projs=p_projs,
        b=b,
        connecting_unitary=p_vectors @ e_vectors.conj().T,
        phi_d=channels.apply(phi, rho.matrix),
        phi_e=phi_e,
        phi_star_p=phi_star_p,
        s_phi_e=s_phi_e,
        s_phi_star_p=s_phi_star_p,
        s_rho=float(eta(lam).sum()),
        s_out=float(eta(mu).sum()),
        h_lambda_b=float(lam @ eta_b.sum(axis=1)),
        h_mu_b=float(mu @ eta_b.sum(axis=0)),
        s_rho_phi=float(lam @ s_phi_e),
        s_rho_phi_star=float(mu @ s_phi_star_p),
    )


def analyze(rho, phi):
    """Full analysis of a (state, map) pair."""
    rho = as_density(rho)
    if rho.n != phi.n:
        raise DimensionMismatchError(f"state is {rho.n}-dim, map is {phi.n}-dim")
    spec_in = rho.spectrum
    image = channels.apply(phi, rho.matrix)
    try:
        out_state = DensityMatrix(image)
        spec_out = out_state.spectrum
    except ValidationError as exc:
        raise ValidationError(
            f"map output is not a valid density matrix (invalid map?): {exc}"
        ) from exc
    return assemble(
        rho, phi, spec_in.values, spec_in.vectors, spec_out.values, spec_out.vectors
    )


def weighted_entropy_row(pair):
    """Row-weighted entropy of b: sum_i lam_i sum_j eta(b_ij)."""
    return float(pair.lam @ eta(pair.b).sum(axis=1))


def weighted_entropy_col(pair):
    """Column-weighted entropy of b: sum_j mu_j sum_i eta(b_ij)."""
    return float(pair.mu @ eta(pair.b).sum(axis=0))


def averaged_entropy_out(pair):
    """Average output entropy over input eigenbranches:
    sum_i lam_i S(Phi(e_i))."""
    return float(pair.lam @ pair.s_phi_e)


def averaged_entropy_in(pair):
    """Mirror average through the adjoint map: sum_j mu_j S(Phi*(p_j))."""
    return float(pair.mu @ pair.s_phi_star_p)


def index_sets(pair, eps_zero=EPS_ZERO):
    cols = []
    for j in range(pair.n):
        members = [int(i) for i in np.flatnonzero(pair.b[:, j] > eps_zero)]
        if not members:
            raise ValidationError(
                f"column {j} of b has no entry above {eps_zero}; "
                "bistochasticity is broken"
            )
        cols.append(members)
    j_lambda = frozenset(int(k) for k in np.flatnonzero(pair.lam > eps_zero))
    return IndexSets(I=cols, J_lambda=j_lambda)


def lambda_cluster_constants(pair, eps_zero=EPS_ZERO, tol=CLUSTER_CONSTANCY_TOL):
    """Average of lam over each support set I_j.

    In the entropy-equality regime lam is constant on each I_j; the spread
    is reported per column so callers can flag violations instead of
    erroring."""
    sets = index_sets(pair, eps_zero=eps_zero)
    values = np.empty(pair.n)
    spreads = np.empty(pair.n)
    for j, members in enumerate(sets.I):
        block = pair.lam[members]
        values[j] = float(block.mean())
        spreads[j] = float(block.max() - block.min())
    return ClusterValues(values=values, spreads=spreads, constant=spreads <= tol)

"""Seeded construction of states, maps, and whole instances.

Every function takes a ``numpy.random.Generator`` (PCG64 behind a 64-bit
seed) so identical seeds give identical instances on every platform.
"""

import math

import numpy as np

from . import channels
from .errors import ValidationError
from .states import DensityMatrix, eta

INSTANCE_KINDS = (
    "unitary-conj",
    "depolarizing",
    "transpose",
    "cond-exp",
    "weighted-isometry",
    "entropy-target",
    "random-state",
    "random-bistochastic",
)

# kinds that produce a channel suitable for generic sweeps
CHANNEL_KINDS = (
    "unitary-conj",
    "depolarizing",
    "transpose",
    "cond-exp",
    "weighted-isometry",
    "entropy-target",
    "random-bistochastic",
)


def rng_from_seed(seed):
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def random_unitary(n, rng):
    """Orthonormalization of a seeded complex Gaussian matrix, with the
    phase of the R diagonal fixed so the result is unique."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(n, rng):
    """Normalized seeded PSD matrix; full rank with probability one."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_pure_density(n, rng):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    v /= np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


def random_prob_vector(n, rng, floor=0.1):
    """Random full-support probability weights, sorted non-increasing."""
    w = rng.dirichlet(np.ones(n))
    w = (1.0 - floor) * w + floor / n
    return np.sort(w)[::-1]


def random_bistochastic(n, rng, components=None):
    """Convex combination of seeded permutation matrices."""
    k = components if components is not None else max(3, n * n)
    weights = rng.dirichlet(np.ones(k))
    b = np.zeros((n, n))
    for w in weights:
        perm = rng.permutation(n)
        mat = np.zeros((n, n))
        mat[np.arange(n), perm] = 1.0
        b += w * mat
    return b


def random_projections(n, rng):
    u = random_unitary(n, rng)
    return np.stack([np.outer(u[:, i], u[:, i].conj()) for i in range(n)])


def mu_for_target_entropy(n, target, tol=1e-6):
    """Weights with Shannon entropy ``target``, found by bisection along the
    segment from the point mass to the uniform vector (entropy runs
    monotonically from 0 to ln n along it)."""
    log_n = math.log(n)
    if target < -1e-12 or target > log_n + 1e-12:
        raise ValidationError(f"target entropy {target} outside [0, ln {n}]")
    target = min(max(target, 0.0), log_n)

    def weights(t):
        w = np.full(n, t / n)
        w[0] = 1.0 - t + t / n
        return w

    def entropy(t):
        return float(eta(weights(t)).sum())

    lo, hi = 0.0, 1.0
    if target <= 0.0:
        return weights(0.0)
    if target >= log_n:
        return weights(1.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if entropy(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 or abs(entropy(mid) - target) <= tol / 4:
            break
    return weights(0.5 * (lo + hi))


def make_instance(kind, n, seed, target=None):
    """Deterministic (state, channel) instance for a generator kind.

    ``random-state`` yields a state only (channel is None).  Instances pair
    the channel with a state that exercises the construction: the
    weighted-isometry kinds anchor the isometries at the state's own
    eigenbasis, the entropy-target kind uses a pure state from the same
    basis as its projection family.
    """
    if kind not in INSTANCE_KINDS:
        raise ValidationError(f"unknown instance kind {kind!r}")
    if n < 1:
        raise ValidationError(f"dimension must be >= 1, got {n}")
    rng = rng_from_seed(seed)
    meta = {"kind": kind, "n": int(n), "seed": int(seed)}

    if kind == "random-state":
        return random_density(n, rng), None, meta
    if kind == "unitary-conj":
        rho = random_density(n, rng)
        return rho, channels.unitary_conjugation(random_unitary(n, rng)), meta
    if kind == "depolarizing":
        return random_density(n, rng), channels.depolarizing(n), meta
    if kind == "transpose":
        return random_density(n, rng), channels.transpose_map(n), meta
    if kind == "cond-exp":
        rho = random_density(n, rng)
        return rho, channels.conditional_expectation(random_projections(n, rng)), meta
    if kind == "weighted-isometry":
        rho = random_density(n, rng)
        e_vectors = rho.spectrum.vectors
        p_vectors = random_unitary(n, rng)
        a = random_bistochastic(n, rng)
        phi = channels.weighted_isometry_map(
            a, channels.isometry_family(e_vectors, p_vectors)
        )
        return rho, phi, meta
    if kind == "random-bistochastic":
        # diagonal state + matrix-unit isometries: the textbook bistochastic
        # averaging channel acting on the standard basis
        w = random_prob_vector(n, rng)
        rho = DensityMatrix(np.diag(w).astype(np.complex128))
        eye = np.eye(n, dtype=np.complex128)
        a = random_bistochastic(n, rng)
        phi = channels.weighted_isometry_map(a, channels.isometry_family(eye, eye))
        return rho, phi, meta
    # entropy-target
    basis = random_unitary(n, rng)
    rho = DensityMatrix(np.outer(basis[:, 0], basis[:, 0].conj()))
    if target is None:
        target = float(rng.uniform(0.1, math.log(n))) if n > 1 else 0.0
    mu = mu_for_target_entropy(n, target)
    projs = np.stack([np.outer(basis[:, i], basis[:, i].conj()) for i in range(n)])
    phi = channels.entropy_target_map(projs, mu)
    meta["target"] = float(target)
    return rho, phi, meta

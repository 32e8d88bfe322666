"""Kernel backend selection.

``ENTROPYLAB_BACKEND`` picks the eigensolver kernel: ``numba`` (default when
numba imports) or ``numpy`` (pure-numpy fallback).  The choice is read once
at import; tests and benchmarks can still request either kernel explicitly.
"""

import os

from . import kernels

BACKENDS = {
    "numba": kernels.jacobi_eigh_numba,
    "numpy": kernels.jacobi_eigh_numpy,
}


def available_backends():
    names = ["numpy"]
    if kernels.HAS_NUMBA:
        names.insert(0, "numba")
    return names


def _resolve_default():
    requested = os.environ.get("ENTROPYLAB_BACKEND", "").strip().lower()
    if requested == "":
        return "numba" if kernels.HAS_NUMBA else "numpy"
    if requested not in BACKENDS:
        raise ValueError(
            f"ENTROPYLAB_BACKEND={requested!r}: expected 'numba' or 'numpy'"
        )
    if requested == "numba" and not kernels.HAS_NUMBA:
        raise ValueError("ENTROPYLAB_BACKEND=numba but numba is not importable")
    return requested


DEFAULT_BACKEND = _resolve_default()


def jacobi_kernel(backend=None):
    name = DEFAULT_BACKEND if backend is None else backend
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(BACKENDS)}")

"""Cyclic Jacobi eigensolver kernels for Hermitian matrices.

Two interchangeable implementations of the same sweep schedule:

* a scalar-loop kernel compiled with numba (``jacobi_eigh_numba``), the
  default on machines where numba imports;
* a vectorized numpy fallback (``jacobi_eigh_numpy``).

Both run full cyclic sweeps over the strict upper triangle in row-major
order, annihilate the pivot with a complex Givens rotation, and stop when
the off-diagonal Frobenius norm drops below ``threshold``.  Pivots with
modulus at most ``threshold / (2n)`` are skipped; their combined mass keeps
the off-diagonal norm under the threshold.

Each kernel returns ``(diag, vectors, sweeps, off)`` with the eigenvalues
unsorted on the diagonal and the accumulated unitary in ``vectors``.
Callers own sorting, tie-breaking and phase conventions.
"""

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
    HAS_NUMBA = False


def _offdiag_norm(a):
    n = a.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                x = a[i, j]
                total += x.real * x.real + x.imag * x.imag
    return np.sqrt(total)


def _jacobi_driver(a, v, threshold, max_sweeps):
    n = a.shape[0]
    skip = threshold / (2.0 * n)
    sweeps = 0
    off = _offdiag_norm(a)
    while off > threshold and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = np.sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r <= skip:
                    continue
                f = apq / r
                fc = np.conj(f)
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * fc * akq
                    a[k, q] = s * akp + c * fc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * f * aqk
                    a[q, k] = s * apk + c * f * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * fc * vkq
                    v[k, q] = s * vkp + c * fc * vkq
        sweeps += 1
        off = _offdiag_norm(a)
    return sweeps, off


if HAS_NUMBA:
    _jacobi_driver_numba = njit(cache=True)(_jacobi_driver)


def jacobi_eigh_numba(m, threshold, max_sweeps):
    if not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    a = np.ascontiguousarray(m, dtype=np.complex128).copy()
    v = np.eye(a.shape[0], dtype=np.complex128)
    sweeps, off = _jacobi_driver_numba(a, v, float(threshold), int(max_sweeps))
    return np.diag(a).real.copy(), v, sweeps, off


def jacobi_eigh_numpy(m, threshold, max_sweeps):
    a = np.array(m, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    skip = threshold / (2.0 * n)
    sweeps = 0

    def off_norm():
        sq = np.abs(a) ** 2
        return np.sqrt(max(sq.sum() - np.trace(sq).real, 0.0))

    off = off_norm()
    while off > threshold and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                f = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                fc = np.conj(f)
                col_p = c * a[:, p] - s * fc * a[:, q]
                col_q = s * a[:, p] + c * fc * a[:, q]
                a[:, p] = col_p
                a[:, q] = col_q
                row_p = c * a[p, :] - s * f * a[q, :]
                row_q = s * a[p, :] + c * f * a[q, :]
                a[p, :] = row_p
                a[q, :] = row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vec_p = c * v[:, p] - s * fc * v[:, q]
                vec_q = s * v[:, p] + c * fc * v[:, q]
                v[:, p] = vec_p
                v[:, q] = vec_q
        sweeps += 1
        off = off_norm()
    return np.diag(a).real.copy(), v, sweeps, off

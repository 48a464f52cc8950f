# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic-Jacobi eigensolver for complex Hermitian matrices.

Hot kernel behind every positivity check in the package.  Mirrors
``symdyn._jacobi_py.jacobi_eigh`` exactly; keep the two in sync.
"""

import numpy as np

cimport cython
from libc.math cimport fabs, sqrt

DEF OFF_TOL = 1e-14
DEF MAX_SWEEPS = 100


def jacobi_eigh(a, bint vectors=True):
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and unitary ``v``
    such that ``a = v @ diag(w) @ v.conj().T``.  ``v`` is None when
    ``vectors`` is False.  The input is not modified.
    """
    cdef int n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")

    am = np.array(a, dtype=np.complex128, order="C")
    vm = np.eye(n, dtype=np.complex128) if vectors else None
    if n == 1:
        return (np.array([am[0, 0].real]), vm)

    cdef double complex[:, :] A = am
    cdef double complex[:, :] V = vm if vectors else am  # dummy alias when unused

    cdef double fro = 0.0, off
    cdef int i, j, p, q, sweep
    for i in range(n):
        for j in range(n):
            fro += A[i, j].real * A[i, j].real + A[i, j].imag * A[i, j].imag
    fro = sqrt(fro)
    cdef double threshold = OFF_TOL * (fro if fro > 2.2e-308 else 2.2e-308)
    cdef double skip_tol = threshold / n

    cdef double absb, tau, t, c, sgn
    cdef double complex beta, s, sconj, xp, xq

    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += A[i, j].real * A[i, j].real + A[i, j].imag * A[i, j].imag
        if sqrt(off) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = A[p, q]
                absb = sqrt(beta.real * beta.real + beta.imag * beta.imag)
                if absb < skip_tol:
                    continue
                tau = (A[q, q].real - A[p, p].real) / (2.0 * absb)
                sgn = 1.0 if tau >= 0 else -1.0
                t = sgn / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = (t * c / absb) * beta
                sconj = s.conjugate()
                for i in range(n):
                    xp = A[i, p]
                    xq = A[i, q]
                    A[i, p] = c * xp - sconj * xq
                    A[i, q] = s * xp + c * xq
                for j in range(n):
                    xp = A[p, j]
                    xq = A[q, j]
                    A[p, j] = c * xp - s * xq
                    A[q, j] = sconj * xp + c * xq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                if vectors:
                    for i in range(n):
                        xp = V[i, p]
                        xq = V[i, q]
                        V[i, p] = c * xp - sconj * xq
                        V[i, q] = s * xp + c * xq
    else:
        raise ArithmeticError("Jacobi sweep limit reached without convergence")

    w = np.diagonal(am).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if vectors:
        vm = vm[:, order]
    return (w, vm)

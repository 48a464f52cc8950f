"""Reference cyclic-Jacobi eigensolver for complex Hermitian matrices.

Pure-Python/numpy implementation of the same algorithm as the compiled
extension ``symdyn._jacobi``.  It is selected automatically when the
extension is unavailable (see ``symdyn._eig``); the two must stay
behaviourally identical, which ``tests/test_eig_kernel.py`` enforces.

Convergence: sweeps stop once the off-diagonal Frobenius mass drops below
``1e-14`` times the Frobenius norm of the input.
"""

from __future__ import annotations

import numpy as np

_OFF_TOL = 1e-14
_MAX_SWEEPS = 100


def jacobi_eigh(a: np.ndarray, vectors: bool = True):
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and unitary ``v``
    such that ``a = v @ diag(w) @ v.conj().T``.  ``v`` is None when
    ``vectors`` is False.  The input is not modified.
    """
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    v = np.eye(n, dtype=np.complex128) if vectors else None
    if n == 1:
        w = np.array([a[0, 0].real])
        return (w, v)

    threshold = _OFF_TOL * max(np.linalg.norm(a), np.finfo(float).tiny)

    for _ in range(_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = a[p, q]
                absb = abs(beta)
                if absb < threshold / n:
                    continue
                tau = (a[q, q].real - a[p, p].real) / (2.0 * absb)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c * (beta / absb)
                # column rotation: A <- A J with J = [[c, s], [-conj(s), c]]
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s.conjugate() * aq
                a[:, q] = s * ap + c * aq
                # row rotation: A <- J^dagger A
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s.conjugate() * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s.conjugate() * vq
                    v[:, q] = s * vp + c * vq
    else:
        raise ArithmeticError("Jacobi sweep limit reached without convergence")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if vectors:
        v = v[:, order]
    return (w, v)

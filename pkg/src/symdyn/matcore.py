"""Dense complex matrix kernel: eigensystems, tensor algebra, Choi conversion.

Conventions used throughout the package:

* Operators are ``numpy.ndarray`` of ``complex128``.
* Vectorization is column-stacking: ``vec(X)[n*d + m] = X[m, n]``, so a
  superoperator ``S`` acts as ``vec(Phi[X]) = S @ vec(X)`` and composition
  of maps is matrix multiplication of their superoperators.
* The Choi matrix of a map ``Phi`` on a ``d``-level system is
  ``C[Phi] = (id (x) Phi)[d P+]`` with ``P+ = (1/d) sum_{mn} |mm><nn|``,
  i.e. ``C = sum_{mn} |m><n| (x) Phi[|m><n|]``.  Under this normalization
  ``C[id] = d P+`` and ``C[Phi]`` has trace ``d`` for trace-preserving maps.

Positivity checks run on the cyclic-Jacobi eigensolver (compiled kernel
with a pure-Python fallback, see ``symdyn._eig``); everything here is a
pure function over immutable inputs.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from ._eig import KERNEL_BACKEND, jacobi_eigh

__all__ = [
    "DEFAULT_PSD_TOL",
    "KERNEL_BACKEND",
    "NonHermitianError",
    "PsdResult",
    "apply_superop",
    "choi_of",
    "dual_superop",
    "flip_operator",
    "hermitian_eigensystem",
    "hermitian_eigenvalues",
    "hermiticity_defect",
    "is_psd",
    "kron",
    "maximally_entangled",
    "partial_transpose",
    "require_hermitian",
    "super_of",
    "superop_from_action",
    "trace_norm",
    "trace_preserving_defect",
    "unital_defect",
    "unvec",
    "vec",
]

DEFAULT_PSD_TOL = 1e-9

kron = np.kron


class NonHermitianError(ValueError):
    """Raised when an operation requires a Hermitian matrix.

    Carries the offending entry: ``defect`` is ``max |A - A^dagger|`` and
    ``index`` the position where it is attained.
    """

    def __init__(self, defect: float, index: tuple[int, int]):
        self.defect = defect
        self.index = index
        super().__init__(
            f"matrix is not Hermitian: |A - A^dagger| reaches {defect:.3e} "
            f"at entry {index}"
        )


class PsdResult(NamedTuple):
    ok: bool
    min_eigenvalue: float


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest entrywise deviation of ``a`` from its conjugate transpose."""
    return float(np.abs(a - a.conj().T).max())


def require_hermitian(a: np.ndarray, tol: float = 1e-12) -> None:
    """Reject ``a`` unless ``max |A - A^dagger| <= tol * max(1, ||A||_F)``."""
    dev = np.abs(a - a.conj().T)
    defect = float(dev.max())
    if defect > tol * max(1.0, float(np.linalg.norm(a))):
        index = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise NonHermitianError(defect, (int(index[0]), int(index[1])))


def hermitian_eigensystem(a: np.ndarray, check: bool = True):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.

    Satisfies ``a = v @ diag(w) @ v.conj().T`` to a reconstruction residual
    of at most ``1e-11 * ||a||_F``.
    """
    if check:
        require_hermitian(a)
    return jacobi_eigh(np.asarray(a, dtype=complex), vectors=True)


def hermitian_eigenvalues(a: np.ndarray, check: bool = True) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (no eigenvectors)."""
    if check:
        require_hermitian(a)
    w, _ = jacobi_eigh(np.asarray(a, dtype=complex), vectors=False)
    return w


def is_psd(a: np.ndarray, tol: float = DEFAULT_PSD_TOL) -> PsdResult:
    """Positive semidefiniteness with a relative tolerance band.

    True iff the smallest eigenvalue is ``>= -tol * max(1, ||a||_F)``; the
    witness eigenvalue is always returned.
    """
    w = hermitian_eigenvalues(a)
    lo = float(w[0])
    return PsdResult(lo >= -tol * max(1.0, float(np.linalg.norm(a))), lo)


def trace_norm(a: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix (sum of absolute eigenvalues)."""
    return float(np.abs(hermitian_eigenvalues(a)).sum())


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(x, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if d is None:
        d = int(round(np.sqrt(v.size)))
        if d * d != v.size:
            raise ValueError(f"vector of length {v.size} is not square-sized")
    return v.reshape(d, d, order="F")


def superop_from_action(action: Callable[[np.ndarray], np.ndarray], d: int) -> np.ndarray:
    """Matrix of a linear map on d x d operators, columns from matrix units."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[j] = 1.0
        s[:, j] = vec(action(unvec(e, d)))
    return s


def apply_superop(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply a superoperator matrix to an operator."""
    d = int(round(np.sqrt(s.shape[0])))
    return unvec(s @ vec(x), d)


def dual_superop(s: np.ndarray) -> np.ndarray:
    """Dual map with respect to the Hilbert-Schmidt inner product."""
    return s.conj().T


def trace_preserving_defect(s: np.ndarray) -> float:
    """``||dual(S)[I] - I||_max``; zero for trace-preserving maps."""
    d = int(round(np.sqrt(s.shape[0])))
    return float(np.abs(apply_superop(dual_superop(s), np.eye(d)) - np.eye(d)).max())


def unital_defect(s: np.ndarray) -> float:
    """``||S[I] - I||_max``; zero for unital maps."""
    d = int(round(np.sqrt(s.shape[0])))
    return float(np.abs(apply_superop(s, np.eye(d)) - np.eye(d)).max())


def _reshuffle(m: np.ndarray) -> np.ndarray:
    d2 = m.shape[0]
    d = int(round(np.sqrt(d2)))
    if d * d != d2 or m.shape != (d2, d2):
        raise ValueError(f"expected a d^2 x d^2 matrix, got shape {m.shape}")
    return m.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d2, d2)


def choi_of(s: np.ndarray) -> np.ndarray:
    """Choi matrix of a superoperator under the package normalization."""
    return _reshuffle(s)


def super_of(c: np.ndarray) -> np.ndarray:
    """Superoperator matrix of a Choi matrix (inverse of :func:`choi_of`)."""
    return _reshuffle(c)


def maximally_entangled(d: int) -> np.ndarray:
    """Projector ``P+`` onto the maximally entangled state of two qudits."""
    omega = np.zeros(d * d, dtype=complex)
    omega[:: d + 1] = 1.0
    return np.outer(omega, omega.conj()) / d


def flip_operator(d: int) -> np.ndarray:
    """Swap of the two tensor factors of a d x d bipartite space."""
    f = np.zeros((d * d, d * d), dtype=complex)
    for m in range(d):
        for n in range(d):
            f[m * d + n, n * d + m] = 1.0
    return f


def partial_transpose(a: np.ndarray, subsystem: int = 2) -> np.ndarray:
    """Partial transpose of an operator on a d (x) d space.

    ``subsystem`` selects the transposed factor (1 or 2); the operation is
    an involution and preserves the trace.
    """
    d2 = a.shape[0]
    d = int(round(np.sqrt(d2)))
    if d * d != d2 or a.shape != (d2, d2):
        raise ValueError(f"expected a d^2 x d^2 matrix, got shape {a.shape}")
    t = a.reshape(d, d, d, d)
    if subsystem == 2:
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == 1:
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError("subsystem must be 1 or 2")
    return t.reshape(d2, d2)

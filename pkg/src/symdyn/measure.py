"""Orthonormal Hermitian operator bases and symmetric measurements.

A symmetric measurement, or (N,M)-POVM, is a collection of N POVMs with M
outcomes each whose operators satisfy the trace symmetry constraints

    Tr E_{a,k}           = d/M
    Tr E_{a,k}^2         = x
    Tr E_{a,k} E_{a,l}   = y = (d - M x) / (M (M-1)),   l != k
    Tr E_{a,k} E_{b,l}   = z = d / M^2,                 b != a

with the purity parameter restricted to d/M^2 < x <= min(d^2/M^2, d/M).
Such measurements can be built in any dimension from an orthonormal basis
{G_0 = I/sqrt(d), G_{a,k}} of Hermitian operators via

    E_{a,k} = I/M + t H_{a,k},
    H_{a,k} = G_a - sqrt(M)(sqrt(M)+1) G_{a,k}   (k < M),
    H_{a,M} = (sqrt(M)+1) G_a,                    G_a = sum_k G_{a,k},

where x = d/M^2 + t^2 (M-1)(sqrt(M)+1)^2 and the admissible range of t
depends on the basis (found here by bisection, never by formula).

The module also verifies the conical 2-design identity
``sum E (x) E = kappa_+ I (x) I + kappa_- F`` satisfied by every
informationally complete (N,M)-POVM.

All constructions are pure functions over immutable inputs and safe for
parallel parameter sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import matcore

__all__ = [
    "DesignReport",
    "HermitianBasis",
    "SymmetricPOVM",
    "SymmetryReport",
    "conical_design_check",
    "gellmann_basis",
    "gellmann_mum_povm",
    "kappa_minus",
    "kappa_plus",
    "max_admissible_t",
    "mub_bases",
    "mub_povm",
    "pauli_15_2_povm",
    "pauli_product_basis",
    "povm_from_basis",
    "t_from_x",
    "verify_symmetric",
    "x_from_t",
    "x_range",
]

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class HermitianBasis:
    """Traceless orthonormal Hermitian operators grouped for POVM building.

    ``groups`` holds N tuples of M-1 operators each; together with the
    implicit G_0 = I/sqrt(d) they must be orthonormal under Tr(A B).
    """

    d: int
    groups: tuple[tuple[np.ndarray, ...], ...]

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def group_size(self) -> int:
        return len(self.groups[0])

    def elements(self) -> Iterable[np.ndarray]:
        for group in self.groups:
            yield from group

    def validate(self, tol: float = 1e-12) -> float:
        """Worst deviation from hermiticity, tracelessness and orthonormality."""
        flat = list(self.elements())
        worst = 0.0
        for g in flat:
            worst = max(worst, matcore.hermiticity_defect(g))
            worst = max(worst, abs(np.trace(g)))
        for i, gi in enumerate(flat):
            for j, gj in enumerate(flat):
                ov = np.trace(gi @ gj)
                worst = max(worst, abs(ov - (1.0 if i == j else 0.0)))
        if worst > tol:
            raise ValueError(f"basis fails orthonormality checks (residual {worst:.3e})")
        return worst


def _gellmann_parts(d: int):
    """Diagonal, symmetric and antisymmetric generalized Gell-Mann matrices."""
    diag = []
    for r in range(1, d):
        v = np.zeros(d)
        v[:r] = 1.0
        v[r] = -r
        diag.append(np.diag(v).astype(complex) / np.sqrt(r * (r + 1)))
    sym, asym = [], []
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = 1.0
            sym.append(m / np.sqrt(2))
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = -1j
            m[j, i] = 1j
            asym.append(m / np.sqrt(2))
    return diag, sym, asym


def gellmann_basis(d: int) -> HermitianBasis:
    """Generalized Gell-Mann matrices grouped for the M = d, N = d+1 family.

    The d-1 diagonal matrices form the first group; the off-diagonal
    matrices fill the remaining d groups, taking the symmetric matrices in
    index order followed by the antisymmetric ones in reverse index order.
    For d = 3 this yields the four pairs {diag}, {sym01, sym02},
    {sym12, antisym12}, {antisym02, antisym01}.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    diag, sym, asym = _gellmann_parts(d)
    flat = sym + asym[::-1]
    groups = [tuple(diag)]
    for a in range(d):
        groups.append(tuple(flat[a * (d - 1) : (a + 1) * (d - 1)]))
    return HermitianBasis(d=d, groups=tuple(groups))


def pauli_product_basis() -> HermitianBasis:
    """Normalized two-qubit Pauli products (sigma_k (x) sigma_l)/2, 15 groups of one.

    Ordered lexicographically in (k, l) with (0, 0) skipped; every element
    G satisfies (2G)^2 = I.
    """
    names = "IXYZ"
    groups = []
    for k in names:
        for l in names:
            if k == l == "I":
                continue
            groups.append((np.kron(PAULI[k], PAULI[l]) / 2,))
    return HermitianBasis(d=4, groups=tuple(groups))


def pauli_product_labels() -> list[str]:
    """Labels matching the group order of :func:`pauli_product_basis`."""
    names = "IXYZ"
    return [k + l for k in names for l in names if not k == l == "I"]


# ---------------------------------------------------------------------------
# symmetric POVMs


@dataclass(frozen=True)
class SymmetricPOVM:
    """An (N,M)-POVM: ``ops[a, k]`` is the k-th operator of the a-th POVM.

    ``t`` is the deformation parameter of the operator-basis construction;
    for measurements built directly from projectors it is the nominal value
    recovered from x.
    """

    d: int
    n_povms: int
    n_outcomes: int
    t: float
    ops: np.ndarray  # (N, M, d, d)
    x: float
    y: float
    z: float

    @property
    def info_complete(self) -> bool:
        return self.n_povms * (self.n_outcomes - 1) == self.d * self.d - 1


def x_range(d: int, m: int) -> tuple[float, float]:
    """Open-below range (lo, hi) of the purity parameter x."""
    return d / m**2, min(d * d / m**2, d / m)


def x_from_t(d: int, m: int, t: float) -> float:
    """Purity parameter of the basis construction at deformation t."""
    return d / m**2 + t * t * (m - 1) * (np.sqrt(m) + 1) ** 2


def t_from_x(d: int, m: int, x: float) -> float:
    """Positive deformation parameter reproducing purity x."""
    lo, _ = x_range(d, m)
    if x <= lo:
        raise ValueError(f"x must exceed d/M^2 = {lo}")
    return float(np.sqrt((x - lo) / ((m - 1) * (np.sqrt(m) + 1) ** 2)))


def kappa_plus(d: int, m: int, x: float) -> float:
    """Conical 2-design coefficient of I (x) I for an informationally complete POVM."""
    return (d**3 - x * m * m) / (d * m * (m - 1))


def kappa_minus(d: int, m: int, x: float) -> float:
    """Conical 2-design coefficient of the flip operator."""
    return (x * m * m - d) / (m * (m - 1))


def _povm_operators(basis: HermitianBasis, t: float) -> np.ndarray:
    d = basis.d
    m = basis.group_size + 1
    root = np.sqrt(m)
    ops = np.empty((basis.n_groups, m, d, d), dtype=complex)
    eye = np.eye(d, dtype=complex) / m
    for a, group in enumerate(basis.groups):
        g_a = np.sum(group, axis=0)
        for k, g_ak in enumerate(group):
            ops[a, k] = eye + t * (g_a - root * (root + 1) * g_ak)
        ops[a, m - 1] = eye + t * (root + 1) * g_a
    return ops


def povm_from_basis(
    basis: HermitianBasis,
    n_povms: int,
    n_outcomes: int,
    t: float,
    psd_tol: float = 1e-10,
) -> SymmetricPOVM:
    """Build the (N,M)-POVM ``E_{a,k} = I/M + t H_{a,k}`` from a grouped basis.

    Raises if the basis cardinality does not match (N, M), if t = 0 (the
    purity constraint d/M^2 < x is strict), or if any operator fails
    positive semidefiniteness at ``psd_tol`` (the witness eigenvalue is
    reported in the error).
    """
    if basis.n_groups != n_povms or basis.group_size != n_outcomes - 1:
        raise ValueError(
            f"basis supplies {basis.n_groups} groups of {basis.group_size}, "
            f"expected {n_povms} groups of {n_outcomes - 1}"
        )
    d, m = basis.d, n_outcomes
    x = x_from_t(d, m, t)
    lo, hi = x_range(d, m)
    if x <= lo:
        raise ValueError(f"t = {t} gives x = {x} <= d/M^2 = {lo}; the bound is strict")
    if x > hi + 1e-12:
        raise ValueError(f"t = {t} gives x = {x} beyond the upper bound {hi}")
    ops = _povm_operators(basis, t)
    min_eig = min(
        matcore.hermitian_eigenvalues(ops[a, k])[0]
        for a in range(n_povms)
        for k in range(m)
    )
    if min_eig < -psd_tol:
        raise ValueError(
            f"t = {t} is outside the admissible range: smallest POVM-element "
            f"eigenvalue {min_eig:.3e}"
        )
    y = (d - m * x) / (m * (m - 1))
    return SymmetricPOVM(
        d=d, n_povms=n_povms, n_outcomes=m, t=float(t), ops=ops, x=float(x),
        y=float(y), z=d / m**2,
    )


def max_admissible_t(basis: HermitianBasis, tol: float = 1e-12) -> tuple[float, float]:
    """Admissible deformation range (t_min, t_max) found by bisection.

    Endpoints yield positive semidefinite operators; scaling an endpoint by
    ``1 + 1e-10`` does not.  t = 0 always lies inside the range.
    """

    def min_eig(t: float) -> float:
        ops = _povm_operators(basis, t)
        return min(
            matcore.hermitian_eigenvalues(ops[a, k])[0]
            for a in range(ops.shape[0])
            for k in range(ops.shape[1])
        )

    def endpoint(sign: float) -> float:
        lo = 0.0
        hi = sign * 1.0
        while min_eig(hi) >= -5e-14 and abs(hi) < 1e6:
            lo, hi = hi, hi * 2.0
        while abs(hi - lo) > tol:
            mid = 0.5 * (lo + hi)
            if min_eig(mid) >= -5e-14:
                lo = mid
            else:
                hi = mid
        return lo

    return endpoint(-1.0), endpoint(+1.0)


def gellmann_mum_povm(d: int = 3, t: float | None = None) -> SymmetricPOVM:
    """Mutually unbiased measurements built on the Gell-Mann grouping.

    Defaults to the largest admissible deformation of the basis.  For
    d = 3 that point is t = 1/(3(1 + sqrt(3))), giving the non-optimal
    purity x = 5/9 (the basis cannot reach the projective value x = 1).
    """
    basis = gellmann_basis(d)
    if t is None:
        t = 1.0 / (3.0 * (1.0 + np.sqrt(3.0))) if d == 3 else max_admissible_t(basis)[1]
    return povm_from_basis(basis, d + 1, d, t)


def pauli_15_2_povm() -> SymmetricPOVM:
    """Optimal (15,2)-POVM of rank-2 projectors ``I/2 +- G_a`` on two qubits.

    Built from the Pauli-product basis at the deformation saturating the
    purity bound x = d/M = 2 (t = sqrt(2) - 1, the admissible maximum).
    """
    return povm_from_basis(pauli_product_basis(), 15, 2, t_from_x(4, 2, 2.0))


# ---------------------------------------------------------------------------
# mutually unbiased bases

_MUB_DIMS = (2, 3, 5)


def mub_bases(d: int) -> list[np.ndarray]:
    """Complete set of d+1 mutually unbiased bases (columns are vectors).

    Weyl-Heisenberg construction for odd prime d (computational basis plus
    d quadratic-phase Fourier bases); Pauli eigenbases for d = 2.  Any two
    vectors from different bases satisfy |<e|f>|^2 = 1/d.
    """
    if d not in _MUB_DIMS:
        raise ValueError(f"d must be prime (one of {_MUB_DIMS}), got {d}")
    if d == 2:
        s = 1 / np.sqrt(2)
        return [
            np.eye(2, dtype=complex),
            np.array([[s, s], [s, -s]], dtype=complex),
            np.array([[s, s], [1j * s, -1j * s]], dtype=complex),
        ]
    omega = np.exp(2j * np.pi / d)
    bases = [np.eye(d, dtype=complex)]
    for a in range(d):
        v = np.empty((d, d), dtype=complex)
        for k in range(d):
            for j in range(d):
                v[j, k] = omega ** ((a * j * j + j * k) % d) / np.sqrt(d)
        bases.append(v)
    return bases


def mub_povm(d: int) -> SymmetricPOVM:
    """(d+1, d)-POVM of rank-1 projectors onto a complete set of MUBs.

    Projective, hence x = 1, y = 0, z = 1/d; informationally complete with
    conical 2-design coefficients kappa_+ = kappa_- = 1.
    """
    bases = mub_bases(d)
    ops = np.empty((d + 1, d, d, d), dtype=complex)
    for a, v in enumerate(bases):
        for k in range(d):
            ops[a, k] = np.outer(v[:, k], v[:, k].conj())
    return SymmetricPOVM(
        d=d, n_povms=d + 1, n_outcomes=d, t=t_from_x(d, d, 1.0), ops=ops,
        x=1.0, y=0.0, z=1.0 / d,
    )


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class SymmetryReport:
    """Measured symmetry parameters and the worst constraint violation."""

    x: float
    y: float
    z: float
    residual: float
    info_complete: bool


def verify_symmetric(povm: SymmetricPOVM | np.ndarray, d: int | None = None) -> SymmetryReport:
    """Check the defining trace constraints of a symmetric measurement.

    The residual is the worst deviation over all constraint classes: unit
    decomposition, element traces, purity, same-POVM and cross-POVM
    overlaps (including the closed-form relations tying y and z to x).
    Report-only; nothing is raised.
    """
    if isinstance(povm, SymmetricPOVM):
        ops, d = povm.ops, povm.d
    else:
        ops = np.asarray(povm)
        d = ops.shape[-1]
    n, m = ops.shape[0], ops.shape[1]
    gram = np.einsum("akij,blji->akbl", ops, ops)

    purities = np.array([[gram[a, k, a, k].real for k in range(m)] for a in range(n)])
    x_est = float(purities.mean())
    same = [
        gram[a, k, a, l].real for a in range(n) for k in range(m) for l in range(m) if k != l
    ]
    cross = [
        gram[a, k, b, l].real
        for a in range(n)
        for b in range(n)
        for k in range(m)
        for l in range(m)
        if a != b
    ]
    y_est = float(np.mean(same)) if same else (d - m * x_est) / (m * (m - 1))
    z_est = float(np.mean(cross)) if cross else d / m**2

    residual = 0.0
    eye = np.eye(d)
    for a in range(n):
        residual = max(residual, float(np.abs(ops[a].sum(axis=0) - eye).max()))
        for k in range(m):
            residual = max(residual, abs(np.trace(ops[a, k]).real - d / m))
            residual = max(residual, float(np.abs(np.imag(gram[a, k, a, k]))))
    residual = max(residual, float(np.abs(purities - x_est).max()))
    if same:
        residual = max(residual, float(np.abs(np.asarray(same) - y_est).max()))
        residual = max(residual, abs(y_est - (d - m * x_est) / (m * (m - 1))))
    residual = max(residual, float(np.abs(np.asarray(cross) - d / m**2).max()) if cross else 0.0)

    return SymmetryReport(
        x=x_est, y=y_est, z=z_est, residual=residual,
        info_complete=n * (m - 1) == d * d - 1,
    )


@dataclass(frozen=True)
class DesignReport:
    """Conical 2-design verification of an informationally complete POVM."""

    kappa_plus: float
    kappa_minus: float
    residual: float
    info_complete: bool
    channel_identity_residual: float


def design_sum(povm: SymmetricPOVM) -> np.ndarray:
    """``sum_{a,k} E_{a,k} (x) E_{a,k}`` as a d^2 x d^2 matrix."""
    ops = povm.ops.reshape(-1, povm.d, povm.d)
    return sum(np.kron(e, e) for e in ops)


def conical_design_check(povm: SymmetricPOVM) -> DesignReport:
    """Verify ``sum E (x) E = kappa_+ I + kappa_- F`` and the channel-sum identity.

    The kappa coefficients come from their closed forms in (d, M, x).  The
    channel identity compares ``sum_a Phi_a`` with
    ``(M/d)(kappa_+ d Phi_0 + kappa_- id)`` on the matrix-unit basis, where
    ``Phi_a[X] = (M/d) sum_k E_{a,k} Tr(E_{a,k} X)``.  For POVMs that are
    not informationally complete the identities do not apply and only the
    flag is reported.
    """
    d, m = povm.d, povm.n_outcomes
    kp = kappa_plus(d, m, povm.x)
    km = kappa_minus(d, m, povm.x)
    if not povm.info_complete:
        return DesignReport(kp, km, float("nan"), False, float("nan"))

    target = kp * np.eye(d * d) + km * matcore.flip_operator(d)
    residual = float(np.abs(design_sum(povm) - target).max())

    flat = povm.ops.reshape(-1, d, d)
    chan_residual = 0.0
    for idx in range(d * d):
        probe = np.zeros((d, d), dtype=complex)
        probe[idx // d, idx % d] = 1.0
        total = (m / d) * np.einsum("kij,k->ij", flat, np.einsum("kji,ij->k", flat, probe))
        expected = (m / d) * (kp * np.trace(probe) * np.eye(d) + km * probe)
        chan_residual = max(chan_residual, float(np.abs(total - expected).max()))

    return DesignReport(kp, km, residual, True, chan_residual)

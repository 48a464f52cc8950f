"""Quantum channels generated by symmetric measurements.

Every (N,M)-POVM induces a family of entanglement-breaking channels

    Phi_a[X] = (M/d) sum_k E_{a,k} Tr(E_{a,k} X),

together with the maximally depolarizing channel Phi_0[X] = I Tr(X)/d and
the complementary family Psi_a = (M Phi_0 - Phi_a)/(M-1).  The operators

    U_{a,k} = sum_l omega^{k l} E_{a,l},   omega = exp(2 pi i / M),

are joint eigenvectors: Phi_a[U_{b,l}] = (M/d)(x-y) delta_ab U_{b,l}.

Mixtures of the identity with either family give highly symmetric unital
channels whose eigenvalues are degenerate per POVM index; this module
converts between the probability and eigenvalue parameterizations, and
provides complete-positivity and entanglement-breaking tests (closed-form
sufficient conditions plus Choi-matrix oracles).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .measure import SymmetricPOVM, verify_symmetric

__all__ = [
    "ChannelFamily",
    "MixtureSpec",
    "build_family",
    "choi_of_eigenvalues",
    "composition_check",
    "cp_exact",
    "cp_sufficient",
    "eb_sufficient",
    "eigen_ops",
    "EigenOpsReport",
    "fujiwara_algoet",
    "mixture_channel",
    "mixture_from_probs",
    "ppt_necessary",
    "spec_from_eigenvalues",
]


@dataclass(frozen=True)
class ChannelFamily:
    """The channel algebra of one symmetric measurement.

    Superoperators use the column-stacking convention of ``matcore``.
    ``eigen_action = M(x-y)/d`` is the nonzero eigenvalue of each Phi_a.
    All arrays are treated as immutable.
    """

    povm: SymmetricPOVM
    phi0: np.ndarray          # (d^2, d^2)
    phi: np.ndarray           # (N, d^2, d^2)
    psi: np.ndarray           # (N, d^2, d^2)
    eigen_ops: np.ndarray     # (N, M-1, d, d)
    omega: complex
    choi_phi: np.ndarray      # (N, d^2, d^2)
    choi_id: np.ndarray       # (d^2, d^2)
    design_sums: np.ndarray   # (N, d^2, d^2): sum_k E (x) E per POVM

    @property
    def d(self) -> int:
        return self.povm.d

    @property
    def n_povms(self) -> int:
        return self.povm.n_povms

    @property
    def n_outcomes(self) -> int:
        return self.povm.n_outcomes

    @property
    def eigen_action(self) -> float:
        p = self.povm
        return p.n_outcomes * (p.x - p.y) / p.d

    @property
    def kappa_plus(self) -> float:
        p = self.povm
        m = p.n_outcomes
        return (p.d**3 - p.x * m * m) / (p.d * m * (m - 1))

    @property
    def kappa_minus(self) -> float:
        p = self.povm
        return p.x - p.y

    @property
    def info_complete(self) -> bool:
        return self.povm.info_complete


def build_family(povm: SymmetricPOVM, tol: float = 1e-8) -> ChannelFamily:
    """Construct Phi_0, Phi_a, Psi_a and the eigenoperator grid from a POVM.

    The POVM is re-verified first (symmetry residual above ``tol`` is
    rejected).  Construction invariants are enforced: trace preservation,
    unitality, positive semidefinite Choi matrices and the eigenoperator
    trace relation Tr(U_{a,k} U_{b,l}^dag) = M(x-y) delta_ab delta_kl.
    """
    report = verify_symmetric(povm)
    if report.residual > tol:
        raise ValueError(
            f"POVM fails symmetry constraints (residual {report.residual:.3e} > {tol:.1e})"
        )
    d, n, m = povm.d, povm.n_povms, povm.n_outcomes
    eye = np.eye(d, dtype=complex)

    phi0 = matcore.superop_from_action(lambda x: eye * np.trace(x) / d, d)
    phi = np.empty((n, d * d, d * d), dtype=complex)
    for a in range(n):
        ops_a = povm.ops[a]

        def action(x, ops_a=ops_a):
            return (m / d) * np.einsum("kij,k->ij", ops_a, np.einsum("kji,ij->k", ops_a, x))

        phi[a] = matcore.superop_from_action(action, d)
    psi = (m * phi0[None, :, :] - phi) / (m - 1)

    omega = np.exp(2j * np.pi / m)
    u = np.empty((n, m - 1, d, d), dtype=complex)
    for a in range(n):
        for k in range(1, m):
            u[a, k - 1] = sum(omega ** (k * l) * povm.ops[a, l - 1] for l in range(1, m + 1))

    choi_phi = np.array([matcore.choi_of(phi[a]) for a in range(n)])
    choi_id = d * matcore.maximally_entangled(d)
    design_sums = np.array(
        [sum(np.kron(e, e) for e in povm.ops[a]) for a in range(n)]
    )

    fam = ChannelFamily(
        povm=povm, phi0=phi0, phi=phi, psi=psi, eigen_ops=u, omega=omega,
        choi_phi=choi_phi, choi_id=choi_id, design_sums=design_sums,
    )
    _check_construction(fam)
    return fam


def _check_construction(fam: ChannelFamily, tol: float = 1e-10) -> None:
    d, n, m = fam.d, fam.n_povms, fam.n_outcomes
    for a in range(n):
        if matcore.trace_preserving_defect(fam.phi[a]) > tol:
            raise RuntimeError(f"Phi_{a + 1} is not trace preserving")
        if matcore.unital_defect(fam.phi[a]) > tol:
            raise RuntimeError(f"Phi_{a + 1} is not unital")
        ok, w = matcore.is_psd(fam.choi_phi[a])
        if not ok:
            raise RuntimeError(f"Phi_{a + 1} has a negative Choi eigenvalue {w:.3e}")
        ok, w = matcore.is_psd(matcore.choi_of(fam.psi[a]))
        if not ok:
            raise RuntimeError(f"Psi_{a + 1} has a negative Choi eigenvalue {w:.3e}")
    scale = m * (fam.povm.x - fam.povm.y)
    u = fam.eigen_ops.reshape(n * (m - 1), d, d)
    gram = np.einsum("aij,bij->ab", u, u.conj())
    if np.abs(gram - scale * np.eye(n * (m - 1))).max() > tol * max(1.0, scale):
        raise RuntimeError("eigenoperator trace relation violated")


def composition_check(fam: ChannelFamily) -> float:
    """Worst residual of the channel composition relations.

    Checks ``Phi_a Phi_b = Phi_0`` for a != b and
    ``Phi_a^2 = (M/d)[(x-y) Phi_a + M y Phi_0]``, plus idempotence of
    Phi_0 itself.
    """
    p = fam.povm
    m, d = p.n_outcomes, p.d
    worst = float(np.abs(fam.phi0 @ fam.phi0 - fam.phi0).max())
    for a in range(fam.n_povms):
        sq = fam.phi[a] @ fam.phi[a]
        target = (m / d) * ((p.x - p.y) * fam.phi[a] + m * p.y * fam.phi0)
        worst = max(worst, float(np.abs(sq - target).max()))
        for b in range(fam.n_povms):
            if a != b:
                worst = max(worst, float(np.abs(fam.phi[a] @ fam.phi[b] - fam.phi0).max()))
    return worst


def channel_sum_residual(fam: ChannelFamily) -> float:
    """Residual of ``sum_a Phi_a = (M/d)(kappa_+ d Phi_0 + kappa_- id)``."""
    m, d = fam.n_outcomes, fam.d
    target = (m / d) * (
        fam.kappa_plus * d * fam.phi0 + fam.kappa_minus * np.eye(d * d)
    )
    return float(np.abs(fam.phi.sum(axis=0) - target).max())


@dataclass(frozen=True)
class EigenOpsReport:
    orthogonality_residual: float
    eigen_action_residual: float
    unitary: bool
    unitarity_defect: float


def eigen_ops(fam: ChannelFamily, tol: float = 1e-10) -> EigenOpsReport:
    """Verify the eigenoperator grid of the family.

    Reports the worst deviation from the trace-orthogonality relation, from
    the eigenvalue equations ``Phi_a[U_{b,l}] = (M/d)(x-y) delta_ab U``,
    and whether the U_{a,k} are unitary.  Unitarity holds exactly when the
    measurement operators are projections (x = d/M).
    """
    d, n, m = fam.d, fam.n_povms, fam.n_outcomes
    scale = m * (fam.povm.x - fam.povm.y)
    u = fam.eigen_ops.reshape(n * (m - 1), d, d)
    gram = np.einsum("aij,bij->ab", u, u.conj())
    orth = float(np.abs(gram - scale * np.eye(n * (m - 1))).max())

    action = 0.0
    for a in range(n):
        for b in range(n):
            for k in range(m - 1):
                got = matcore.apply_superop(fam.phi[a], fam.eigen_ops[b, k])
                want = (fam.eigen_action if a == b else 0.0) * fam.eigen_ops[b, k]
                action = max(action, float(np.abs(got - want).max()))

    eye = np.eye(d)
    defect = max(float(np.abs(uk @ uk.conj().T - eye).max()) for uk in u)
    return EigenOpsReport(
        orthogonality_residual=orth,
        eigen_action_residual=action,
        unitary=defect <= tol,
        unitarity_defect=defect,
    )


# ---------------------------------------------------------------------------
# mixtures


@dataclass(frozen=True)
class MixtureSpec:
    """A mixture parameterization: probabilities plus channel eigenvalues.

    ``variant`` is "lambda" for mixtures of the identity with Phi_a and
    "lambda_tilde" for mixtures with Psi_a.  ``probs`` has length N+1 with
    the identity weight first.  ``valid_probability`` records whether the
    probabilities form an admissible distribution (for eigenvalue-derived
    specs this is reported, never enforced).
    """

    variant: str
    probs: np.ndarray
    eigenvalues: np.ndarray
    valid_probability: bool


def _mixture_eigenvalues(fam: ChannelFamily, probs: np.ndarray, variant: str) -> np.ndarray:
    p = fam.povm
    d, m = p.d, p.n_outcomes
    c = m * (p.x - p.y)
    if variant == "lambda":
        return (d * probs[0] + c * probs[1:] - 1.0) / (d - 1)
    return (d * probs[0] - 1.0 - c * probs[1:] / (m - 1)) / (d - 1)


def _probs_valid(probs: np.ndarray, variant: str, d: int, tol: float = 1e-12) -> bool:
    ok = bool(np.all(probs >= -tol) and abs(probs.sum() - 1.0) <= 1e-9)
    if variant == "lambda":
        ok = ok and probs[0] >= 1.0 / d - tol
    return ok


def mixture_from_probs(fam: ChannelFamily, probs, variant: str = "lambda") -> MixtureSpec:
    """Spec from an explicit probability vector (p_0, ..., p_N)."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (fam.n_povms + 1,):
        raise ValueError(f"expected {fam.n_povms + 1} probabilities, got {probs.shape}")
    if variant not in ("lambda", "lambda_tilde"):
        raise ValueError(f"unknown variant {variant!r}")
    return MixtureSpec(
        variant=variant,
        probs=probs,
        eigenvalues=_mixture_eigenvalues(fam, probs, variant),
        valid_probability=_probs_valid(probs, variant, fam.d),
    )


def spec_from_eigenvalues(fam: ChannelFamily, eigenvalues, variant: str = "lambda") -> MixtureSpec:
    """Invert the eigenvalue formulas back to a (possibly invalid) probability vector.

    Requires an informationally complete family.  The recovered vector
    always reproduces the eigenvalues; whether it is a genuine probability
    distribution is reported in ``valid_probability``.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.shape != (fam.n_povms,):
        raise ValueError(f"expected {fam.n_povms} eigenvalues, got {lam.shape}")
    p = fam.povm
    d, m, n = p.d, p.n_outcomes, fam.n_povms
    c = m * (p.x - p.y)
    s = lam.sum()
    if variant == "lambda":
        denom = n * d - c  # equals d M kappa_+ when informationally complete
        p0 = ((d - 1) * s + n - c) / denom
        pa = (d - 1) / c * (lam - (d * s - c) / denom)
    elif variant == "lambda_tilde":
        denom = n * d + c / (m - 1)
        p0 = ((d - 1) * s + n + c / (m - 1)) / denom
        pa = (d - 1) * (m - 1) / c * ((d * s + c / (m - 1)) / denom - lam)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    probs = np.concatenate(([p0], pa))
    return MixtureSpec(
        variant=variant,
        probs=probs,
        eigenvalues=lam,
        valid_probability=_probs_valid(probs, variant, d),
    )


def mixture_channel(
    fam: ChannelFamily, spec: MixtureSpec, validate: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """Superoperator and eigenvalue vector of a mixture.

    The map is ``[(d p_0 - 1)/(d - 1)] id + [d/(d - 1)] sum_a p_a Phi_a``
    (with Psi_a for the tilde variant).  With ``validate`` the probability
    vector must be admissible: nonnegative, summing to one, and p_0 >= 1/d
    in the lambda form.
    """
    if validate and not spec.valid_probability:
        raise ValueError(
            "mixture weights are not an admissible probability vector "
            f"(variant {spec.variant!r}): {spec.probs}"
        )
    d = fam.d
    probs = spec.probs
    family = fam.phi if spec.variant == "lambda" else fam.psi
    s = (d * probs[0] - 1.0) / (d - 1) * np.eye(d * d, dtype=complex)
    s = s + (d / (d - 1)) * np.einsum("a,aij->ij", probs[1:], family)
    return s, _mixture_eigenvalues(fam, probs, spec.variant)


def choi_of_eigenvalues(fam: ChannelFamily, eigenvalues) -> np.ndarray:
    """Choi matrix of the unital mixture with the given eigenvalue vector.

    Uses the identity ``Lambda = (1 - a sum(lam)) Phi_0 + a sum_a lam_a Phi_a``
    with ``a = d / (M (x - y))``, valid for informationally complete
    families; linear in the eigenvalues, so suited to bulk scans.
    """
    if not fam.info_complete:
        raise ValueError("eigenvalue reconstruction requires an informationally complete POVM")
    lam = np.asarray(eigenvalues, dtype=float)
    p = fam.povm
    a = p.d / (p.n_outcomes * (p.x - p.y))
    choi0 = np.eye(fam.d * fam.d, dtype=complex) / fam.d  # Choi of Phi_0
    return (1.0 - a * lam.sum()) * choi0 + a * np.einsum(
        "a,aij->ij", lam, fam.choi_phi
    )


# ---------------------------------------------------------------------------
# positivity and entanglement tests


def cp_sufficient(fam: ChannelFamily, spec: MixtureSpec) -> bool:
    """Closed-form sufficient complete-positivity test for a mixture.

    Lambda form:  kappa_-/d <= (1/M) sum lam <= kappa_-/d + kappa_+ min lam.
    Tilde form:   -M(x-y)/(d(M-1)) <= sum lam <= N  together with
    max lam <= [d(M-1) sum lam + M(x-y)] / [d(d^2-1) + M(x-y)].
    Pure inequality evaluation; sufficiency only.
    """
    p = fam.povm
    d, m, n = p.d, p.n_outcomes, fam.n_povms
    lam = spec.eigenvalues
    s = lam.sum()
    c = m * (p.x - p.y)
    if spec.variant == "lambda":
        lo = fam.kappa_minus / d
        return bool(lo <= s / m <= lo + fam.kappa_plus * lam.min())
    bound = (d * (m - 1) * s + c) / (d * (d * d - 1) + c)
    return bool(-c / (d * (m - 1)) <= s <= n and lam.max() <= bound)


def cp_exact(superop: np.ndarray, tol: float = matcore.DEFAULT_PSD_TOL) -> tuple[bool, float]:
    """Complete positivity via the Choi-matrix eigenvalue oracle."""
    ok, w = matcore.is_psd(matcore.choi_of(superop), tol)
    return ok, w


def fujiwara_algoet(fam: ChannelFamily, eigenvalues) -> bool:
    """Generalized Fujiwara-Algoet conditions, exact for MUB-based mixtures.

    ``-1/(d-1) <= sum lam <= 1 + d min lam``.  Necessary and sufficient for
    complete positivity of generalized Pauli channels, i.e. families built
    from a complete set of mutually unbiased bases; raises for any other
    family.
    """
    p = fam.povm
    if not (p.n_povms == p.d + 1 and p.n_outcomes == p.d and abs(p.x - 1.0) < 1e-9):
        raise ValueError(
            "Fujiwara-Algoet conditions apply only to rank-1 MUB families "
            f"(need N = d+1, M = d, x = 1; got N={p.n_povms}, M={p.n_outcomes}, x={p.x})"
        )
    lam = np.asarray(eigenvalues, dtype=float)
    d = fam.d
    return bool(-1.0 / (d - 1) <= lam.sum() <= 1.0 + d * lam.min())


def eb_sufficient(fam: ChannelFamily, eigenvalues) -> bool:
    """Sufficient entanglement-breaking test on the mixture eigenvalues.

    True if all eigenvalues are nonnegative with
    ``sum lam <= M(x-y)/d``, or all nonpositive with
    ``sum |lam| <= M(x-y)/(d(M-1))``: either way the mixture is a convex
    combination of Phi_0 with entanglement-breaking channels.
    """
    p = fam.povm
    lam = np.asarray(eigenvalues, dtype=float)
    c = p.n_outcomes * (p.x - p.y)
    if np.all(lam >= 0):
        if lam.sum() <= c / p.d:
            return True
    if np.all(lam <= 0):
        if np.abs(lam).sum() <= c / (p.d * (p.n_outcomes - 1)):
            return True
    return False


def ppt_necessary(superop: np.ndarray, tol: float = matcore.DEFAULT_PSD_TOL) -> tuple[bool, float]:
    """PPT check of the Choi matrix (necessary for entanglement breaking)."""
    pt = matcore.partial_transpose(matcore.choi_of(superop), subsystem=2)
    ok, w = matcore.is_psd(pt, tol)
    return ok, w

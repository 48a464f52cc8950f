"""Time-local generators, spectral evolution and divisibility classification.

A coefficient vector gamma drives the generator

    L(t) = sum_a gamma_a(t) (Phi_a - id),

which annihilates the trace, is unital, and acts on the eigenoperators as
``L[U_{a,k}] = xi_a U_{a,k}`` with
``xi_a = (M/d)(x-y) gamma_a - sum_b gamma_b``.  The induced dynamical map
has eigenvalues ``lambda_a(t) = exp(integral_0^t xi_a)``.

Classification works on two levels per time point:

* closed-form tests on gamma: nonnegativity or the complementary-family
  combination (CP-divisibility), the xi sign test (necessary for
  P-divisibility), the positive-map sufficient conditions sorted by the
  number of negative coefficients (P-divisibility), and positivity of
  ``sum_a gamma_a sum_k E_{a,k} (x) E_{a,k}`` (D-divisibility via complete
  copositivity);
* numerical oracles: eigenvalues of the Kossakowski matrix (canonical
  decoherence rates), trace-norm contraction sampling, and complete
  positivity of sampled propagators.

Nothing here mutates a ChannelFamily: snapshots are independent and may be
built in parallel across a time grid, and the sampling oracles take
explicit seeds.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .chan import ChannelFamily, mixture_channel, spec_from_eigenvalues
from .measure import _gellmann_parts

__all__ = [
    "CpdivResult",
    "DivisibilityReport",
    "GeneratorSnapshot",
    "PdivResult",
    "PropagatorResult",
    "RateTrajectory",
    "TraceNormViolation",
    "bisect_threshold",
    "canonical_reconstruction_residual",
    "canonical_traceless_basis",
    "classify_rates",
    "cpdiv_exact",
    "cpdiv_sufficient",
    "ddiv_sufficient",
    "dynamical_map_at",
    "evolve_eigenvalues",
    "generator_at",
    "pdiv_necessary",
    "pdiv_sufficient",
    "propagator_cp_check",
    "tracenorm_falsifier",
]

QUADRATURE_TOL = 1e-8
DERIVATIVE_TOL = 1e-7


@functools.lru_cache(maxsize=None)
def canonical_traceless_basis(d: int) -> tuple[np.ndarray, ...]:
    """Generalized Gell-Mann basis (diagonal, symmetric, antisymmetric order)."""
    diag, sym, asym = _gellmann_parts(d)
    return tuple(diag + sym + asym)


@functools.lru_cache(maxsize=None)
def _basis_stack(d: int) -> np.ndarray:
    """Columns ``vec(I/sqrt(d)), vec(F_1), ...`` for process-matrix projection."""
    cols = [matcore.vec(np.eye(d, dtype=complex) / np.sqrt(d))]
    cols.extend(matcore.vec(f) for f in canonical_traceless_basis(d))
    return np.stack(cols, axis=1)


def _stack_for(d: int, basis) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    if basis is None:
        return _basis_stack(d), canonical_traceless_basis(d)
    basis = tuple(np.asarray(f, dtype=complex) for f in basis)
    cols = [matcore.vec(np.eye(d, dtype=complex) / np.sqrt(d))]
    cols.extend(matcore.vec(f) for f in basis)
    return np.stack(cols, axis=1), basis


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class RateTrajectory:
    """Sampled generator coefficients on a time grid, linear in between.

    ``times`` must be strictly increasing and start at zero; ``rates`` has
    one row per grid time and one column per POVM index.
    """

    times: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        rates = np.asarray(self.rates, dtype=float)
        if times.ndim != 1 or rates.ndim != 2 or rates.shape[0] != times.size:
            raise ValueError("need times (K+1,) and rates (K+1, N)")
        if times[0] != 0.0:
            raise ValueError("trajectory must start at t = 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if not np.all(np.isfinite(rates)):
            raise ValueError("rates must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "rates", rates)

    @property
    def n_rates(self) -> int:
        return self.rates.shape[1]

    @classmethod
    def constant(cls, gamma, t_max: float = 1.0, num: int = 2) -> "RateTrajectory":
        gamma = np.asarray(gamma, dtype=float)
        times = np.linspace(0.0, t_max, num)
        return cls(times=times, rates=np.tile(gamma, (num, 1)))

    def interpolate(self, t: float) -> np.ndarray:
        """Piecewise-linear rate vector at time t (must lie on the grid range)."""
        if t < self.times[0] or t > self.times[-1]:
            raise ValueError(f"t = {t} outside the grid range [0, {self.times[-1]}]")
        out = np.empty(self.n_rates)
        for j in range(self.n_rates):
            out[j] = np.interp(t, self.times, self.rates[:, j])
        return out


# ---------------------------------------------------------------------------
# generator snapshots


@dataclass(frozen=True)
class GeneratorSnapshot:
    """One time slice of the generator and its canonical decomposition.

    ``kossakowski`` is the coefficient matrix of L in the traceless part of
    ``basis`` (identity components projected out); ``rates`` are its
    eigenvalues, ascending, and ``hamiltonian`` the extracted coherent part
    (identically zero for these generators, kept as a consistency check).
    """

    time: float
    gamma: np.ndarray
    generator: np.ndarray
    xi: np.ndarray
    kossakowski: np.ndarray
    rates: np.ndarray
    hamiltonian: np.ndarray
    basis: tuple[np.ndarray, ...] = field(repr=False)


def generator_superop(fam: ChannelFamily, gamma) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    d2 = fam.d * fam.d
    return np.einsum("a,aij->ij", gamma, fam.phi) - gamma.sum() * np.eye(d2, dtype=complex)


def generator_at(fam: ChannelFamily, gamma, time: float = 0.0, basis=None) -> GeneratorSnapshot:
    """Build the generator for coefficient vector gamma and decompose it.

    The Kossakowski matrix is obtained by expanding the Choi matrix of L in
    ``{I/sqrt(d)} + basis`` and dropping the identity row and column; its
    eigenvalues are the canonical decoherence rates.  ``basis`` defaults to
    the generalized Gell-Mann matrices; any traceless orthonormal set gives
    the same rates.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (fam.n_povms,):
        raise ValueError(f"expected {fam.n_povms} coefficients, got {gamma.shape}")
    if not np.all(np.isfinite(gamma)):
        raise ValueError("coefficients must be finite")
    d = fam.d
    ell = generator_superop(fam, gamma)
    xi = fam.eigen_action * gamma - gamma.sum()

    stack, basis_ops = _stack_for(d, basis)
    choi = matcore.choi_of(ell)
    process = stack.conj().T @ choi @ stack
    kossakowski = process[1:, 1:]
    # coherent part from the identity row: H = -(1/sqrt(d)) sum_i Im(c_{i0}) F_i
    h = np.zeros((d, d), dtype=complex)
    for i, f in enumerate(basis_ops):
        h -= np.imag(process[i + 1, 0]) / np.sqrt(d) * f
    rates = matcore.hermitian_eigenvalues(kossakowski)
    return GeneratorSnapshot(
        time=float(time), gamma=gamma, generator=ell, xi=xi,
        kossakowski=kossakowski, rates=rates, hamiltonian=h, basis=basis_ops,
    )


def canonical_reconstruction_residual(snap: GeneratorSnapshot) -> float:
    """Rebuild L from (rates, eigenvectors, H) and compare superoperators.

    Uses ``L[rho] = -i[H, rho] + sum_a J_a (V_a rho V_a^dag -
    {V_a^dag V_a, rho}/2)`` with ``V_a = sum_i W_{ia} F_i`` from the
    Kossakowski eigendecomposition.
    """
    d = snap.hamiltonian.shape[0]
    w, vecs = matcore.hermitian_eigensystem(snap.kossakowski)
    ops = [
        sum(vecs[i, a] * f for i, f in enumerate(snap.basis))
        for a in range(len(snap.basis))
    ]

    def action(rho):
        out = -1j * (snap.hamiltonian @ rho - rho @ snap.hamiltonian)
        for ja, va in zip(w, ops):
            vv = va.conj().T @ va
            out = out + ja * (va @ rho @ va.conj().T - 0.5 * (vv @ rho + rho @ vv))
        return out

    rebuilt = matcore.superop_from_action(action, d)
    return float(np.abs(rebuilt - snap.generator).max())


# ---------------------------------------------------------------------------
# spectral evolution


def _interval_integrals(traj: RateTrajectory, xi_grid: np.ndarray) -> np.ndarray:
    """Integral of each xi component over every grid interval.

    Trapezoid on the grid, compared against the half-step refinement with
    one Richardson extrapolation; the two must agree to QUADRATURE_TOL
    (trajectories are piecewise linear, so they normally agree exactly).
    """
    dt = np.diff(traj.times)[:, None]
    coarse = 0.5 * dt * (xi_grid[:-1] + xi_grid[1:])
    mid = 0.5 * (xi_grid[:-1] + xi_grid[1:])  # linear interpolation at midpoints
    fine = 0.25 * dt * (xi_grid[:-1] + 2 * mid + xi_grid[1:])
    if np.max(np.abs(fine - coarse)) > QUADRATURE_TOL:
        raise ArithmeticError("quadrature refinement disagrees; grid too coarse")
    return (4.0 * fine - coarse) / 3.0


def evolve_eigenvalues(fam: ChannelFamily, traj: RateTrajectory) -> np.ndarray:
    """Dynamical-map eigenvalues ``lambda_a`` sampled on the trajectory grid.

    ``lambda_a(t) = exp(integral_0^t xi_a)`` with lambda_a(0) = 1.
    """
    if traj.n_rates != fam.n_povms:
        raise ValueError("trajectory width does not match the family")
    xi_grid = fam.eigen_action * traj.rates - traj.rates.sum(axis=1)[:, None]
    pieces = _interval_integrals(traj, xi_grid)
    integral = np.vstack([np.zeros((1, fam.n_povms)), np.cumsum(pieces, axis=0)])
    return np.exp(integral)


def eigenvalues_at(fam: ChannelFamily, traj: RateTrajectory, t: float) -> np.ndarray:
    """Map eigenvalues at an arbitrary time inside the grid range."""
    if t < 0 or t > traj.times[-1]:
        raise ValueError(f"t = {t} outside the grid range [0, {traj.times[-1]}]")
    k = int(np.searchsorted(traj.times, t, side="right") - 1)
    k = min(k, traj.times.size - 2)
    lam_grid = evolve_eigenvalues(fam, traj)
    g0 = traj.rates[k]
    gt = traj.interpolate(t)
    xi0 = fam.eigen_action * g0 - g0.sum()
    xit = fam.eigen_action * gt - gt.sum()
    partial = 0.5 * (t - traj.times[k]) * (xi0 + xit)
    return lam_grid[k] * np.exp(partial)


def dynamical_map_at(fam: ChannelFamily, traj: RateTrajectory, t: float) -> np.ndarray:
    """Superoperator of the dynamical map at time t.

    Reconstructed from the eigenvalue vector through the probability
    inversion and the mixture formula; Lambda(0) is the identity.  The
    recovered weights need not be a probability distribution at
    intermediate times, so validation is off.
    """
    lam = eigenvalues_at(fam, traj, t)
    spec = spec_from_eigenvalues(fam, lam, "lambda")
    superop, _ = mixture_channel(fam, spec, validate=False)
    return superop


# ---------------------------------------------------------------------------
# divisibility tests


@dataclass(frozen=True)
class CpdivResult:
    ok: bool
    branch: str | None
    zeta: np.ndarray


def cpdiv_sufficient(fam: ChannelFamily, gamma) -> CpdivResult:
    """Sufficient CP-divisibility conditions on the generator coefficients.

    Either all gamma_a >= 0 (the generator is built from completely
    positive combinations directly), or all
    ``zeta_a = (M-1)/(N - kappa_+) [sum_b gamma_b - (N - kappa_+) gamma_a]``
    are nonnegative (the same generator rewritten over the complementary
    channels Psi_a).  For MUB families the two branches coincide.
    """
    gamma = np.asarray(gamma, dtype=float)
    n, m = fam.n_povms, fam.n_outcomes
    kp = fam.kappa_plus
    zeta = (m - 1) / (n - kp) * (gamma.sum() - (n - kp) * gamma)
    if np.all(gamma >= 0):
        return CpdivResult(True, "nonnegative-rates", zeta)
    if np.all(zeta >= 0):
        return CpdivResult(True, "complementary-family", zeta)
    return CpdivResult(False, None, zeta)


def cpdiv_exact(snap: GeneratorSnapshot, tol: float = matcore.DEFAULT_PSD_TOL) -> bool:
    """CP-divisibility oracle: all canonical decoherence rates >= -tol."""
    return bool(snap.rates[0] >= -tol)


def pdiv_necessary(snap: GeneratorSnapshot, tol: float = matcore.DEFAULT_PSD_TOL) -> bool:
    """Necessary P-divisibility test: every eigenvalue rate xi_a <= tol."""
    return bool(np.all(snap.xi <= tol))


@dataclass(frozen=True)
class PdivResult:
    ok: bool
    n_negative: int
    branch: str | None
    mu0: float
    mu: np.ndarray
    eta: np.ndarray
    reason: str


def pdiv_sufficient(fam: ChannelFamily, gamma) -> PdivResult:
    """Sufficient P-divisibility conditions sorted by negative-coefficient count.

    With L strictly negative coefficients (zeros count as positive),
    b = M(d-1)(x-y)/d and kappa_+ as in the conical design:

    * L <= (N-b)/2: every positive coefficient must reach
      ``max_beta |gamma_beta|`` over the negative ones;
    * (N-b)/2 < L < (N-b+M kappa_+)/2: the bound is amplified to
      ``(M kappa_+ + b - N + 2L) / (M kappa_+ - b + N - 2L)`` times the
      largest magnitude; the auxiliary map weight mu_0 is fixed at its
      smallest admissible value;
    * larger L (including L = N) is out of range for this construction.
    """
    gamma = np.asarray(gamma, dtype=float)
    p = fam.povm
    n, m, d = fam.n_povms, fam.n_outcomes, fam.d
    b = m * (d - 1) * (p.x - p.y) / d
    mkp = m * fam.kappa_plus
    neg = gamma < 0
    l_count = int(neg.sum())
    max_neg = float(np.abs(gamma[neg]).max()) if l_count else 0.0
    min_pos = float(gamma[~neg].min()) if l_count < n else 0.0
    eta = np.abs(gamma)
    shift = b - n + 2 * l_count
    zero_note = ""
    n_zero = int((gamma == 0).sum())
    if n_zero:
        zero_note = f" ({n_zero} zero coefficients counted as positive)"

    if l_count == n:
        return PdivResult(False, l_count, None, float("nan"), np.abs(gamma), eta,
                          "all coefficients negative: not covered (L = N)")
    if l_count <= (n - b) / 2:
        ok = min_pos >= max_neg
        mu0 = 0.0
        mu = np.abs(gamma)
        reason = "" if ok else (
            f"positive coefficients must reach max |gamma_neg| = {max_neg}"
        )
        return PdivResult(ok, l_count, "plain-maximum", mu0, mu, eta, (reason + zero_note).strip())
    if l_count < (n - b + mkp) / 2:
        ratio = (mkp + shift) / (mkp - shift)
        ok = min_pos >= ratio * max_neg
        mu0 = mkp / (mkp - shift) * max_neg
        mu = np.where(neg, mu0 * shift / mkp - gamma, gamma - mu0 * shift / mkp)
        reason = "" if ok else (
            f"positive coefficients must reach {ratio} * max |gamma_neg| = {ratio * max_neg}"
        )
        return PdivResult(ok, l_count, "amplified-ratio", mu0, mu, eta, (reason + zero_note).strip())
    return PdivResult(False, l_count, None, float("nan"), np.abs(gamma), eta,
                      f"L = {l_count} negative coefficients exceed the admissible range")


def ddiv_sufficient(
    fam: ChannelFamily, gamma, tol: float = matcore.DEFAULT_PSD_TOL
) -> tuple[bool, float]:
    """Sufficient D-divisibility: ``sum_a gamma_a sum_k E (x) E`` must be PSD.

    Positivity of this operator makes the generating map completely
    copositive, hence decomposable; the witness eigenvalue is returned.
    """
    gamma = np.asarray(gamma, dtype=float)
    w = np.einsum("a,aij->ij", gamma, fam.design_sums)
    ok, mn = matcore.is_psd(w, tol)
    return ok, mn


# ---------------------------------------------------------------------------
# oracles on trajectories


@dataclass(frozen=True)
class TraceNormViolation:
    time: float
    probe: int
    derivative: float


def _hermitian_probes(d: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    probes = []
    for _ in range(count):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = (g + g.conj().T) / 2
        probes.append(h / np.linalg.norm(h))
    return probes


def tracenorm_falsifier(
    fam: ChannelFamily,
    traj: RateTrajectory,
    samples: int = 50,
    seed: int = 0,
    deriv_tol: float = DERIVATIVE_TOL,
) -> list[TraceNormViolation]:
    """Search for trace-norm growth, which rules out P-divisibility.

    Estimates ``d/dt || Lambda(t)[X] ||_1`` by central differences (step =
    a tenth of the local grid spacing) for ``samples`` random Hermitian
    probes at every interior grid time, recording derivatives above
    ``deriv_tol``.  An empty list is consistent with, but no proof of,
    P-divisibility.
    """
    rng = np.random.default_rng(seed)
    probes = _hermitian_probes(fam.d, samples, rng)
    violations = []
    for k in range(1, traj.times.size):
        t = traj.times[k]
        h = (traj.times[k] - traj.times[k - 1]) / 10.0
        t_lo, t_hi = t - h, min(t + h, traj.times[-1])
        if t_hi <= t_lo:
            continue
        s_lo = dynamical_map_at(fam, traj, t_lo)
        s_hi = dynamical_map_at(fam, traj, t_hi)
        for i, x in enumerate(probes):
            n_lo = matcore.trace_norm(matcore.apply_superop(s_lo, x))
            n_hi = matcore.trace_norm(matcore.apply_superop(s_hi, x))
            deriv = (n_hi - n_lo) / (t_hi - t_lo)
            if deriv > deriv_tol:
                violations.append(TraceNormViolation(float(t), i, float(deriv)))
    return violations


@dataclass(frozen=True)
class PropagatorResult:
    s: float
    t: float
    cp: bool | None
    min_choi_eigenvalue: float | None
    skipped: str | None = None


def propagator_cp_check(
    fam: ChannelFamily,
    traj: RateTrajectory,
    pairs,
    tol: float = matcore.DEFAULT_PSD_TOL,
    invertibility_cutoff: float = 1e-10,
) -> list[PropagatorResult]:
    """Complete positivity of the propagator V(t,s) = Lambda(t) Lambda(s)^-1.

    Pairs with nearly singular Lambda(s) (an eigenvalue below the cutoff in
    magnitude) are skipped with a flag rather than inverted.
    """
    results = []
    for s, t in pairs:
        lam_s = eigenvalues_at(fam, traj, s)
        if np.abs(lam_s).min() <= invertibility_cutoff:
            results.append(PropagatorResult(float(s), float(t), None, None,
                                            "skipped: non-invertible"))
            continue
        map_s = dynamical_map_at(fam, traj, s)
        map_t = dynamical_map_at(fam, traj, t)
        v = map_t @ np.linalg.inv(map_s)
        ok, mn = matcore.is_psd(matcore.choi_of(v), tol)
        results.append(PropagatorResult(float(s), float(t), bool(ok), float(mn)))
    return results


# ---------------------------------------------------------------------------
# aggregated reports


@dataclass(frozen=True)
class DivisibilityReport:
    """Classification of one time slice, analytic tests next to oracles."""

    time: float
    gamma: list
    cp_sufficient: bool
    cp_branch: str | None
    cp_exact: bool
    min_rate: float
    p_necessary: bool
    p_sufficient: bool
    p_branch: str | None
    n_negative: int
    d_sufficient: bool
    d_min_eigenvalue: float
    b: float
    zeta: list
    eta: list
    mu: list
    mu0: float
    xi: list
    rates: list
    trace_norm_violations: int = 0


def classify_rates(
    fam: ChannelFamily, gamma, time: float = 0.0, tol: float = matcore.DEFAULT_PSD_TOL
) -> DivisibilityReport:
    """Run every per-instant divisibility test on one coefficient vector."""
    gamma = np.asarray(gamma, dtype=float)
    snap = generator_at(fam, gamma, time)
    cps = cpdiv_sufficient(fam, gamma)
    pds = pdiv_sufficient(fam, gamma)
    dds, dmin = ddiv_sufficient(fam, gamma, tol)
    p = fam.povm
    b = fam.n_outcomes * (fam.d - 1) * (p.x - p.y) / fam.d
    return DivisibilityReport(
        time=float(time),
        gamma=[float(g) for g in gamma],
        cp_sufficient=cps.ok,
        cp_branch=cps.branch,
        cp_exact=cpdiv_exact(snap, tol),
        min_rate=float(snap.rates[0]),
        p_necessary=pdiv_necessary(snap, tol),
        p_sufficient=pds.ok,
        p_branch=pds.branch,
        n_negative=pds.n_negative,
        d_sufficient=dds,
        d_min_eigenvalue=float(dmin),
        b=float(b),
        zeta=[float(z) for z in cps.zeta],
        eta=[float(e) for e in pds.eta],
        mu=[float(m) for m in pds.mu],
        mu0=float(pds.mu0),
        xi=[float(x) for x in snap.xi],
        rates=[float(r) for r in snap.rates],
    )


# ---------------------------------------------------------------------------
# utilities


def bisect_threshold(predicate, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Smallest argument in [lo, hi] where a monotone predicate turns true."""
    if predicate(lo):
        return lo
    if not predicate(hi):
        raise ValueError("predicate is false on the whole bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi

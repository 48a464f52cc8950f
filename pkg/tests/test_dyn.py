"""Generators, spectral evolution and divisibility classification."""

import numpy as np
import pytest

from symdyn import chan, dyn, matcore, measure


# ---------------------------------------------------------------------------
# snapshots


def test_zero_generator(mub3_family):
    snap = dyn.generator_at(mub3_family, np.zeros(4))
    assert np.abs(snap.generator).max() == 0
    assert np.allclose(snap.xi, 0) and np.allclose(snap.rates, 0)


def test_generator_annihilates_trace_and_identity(mum3_family):
    rng = np.random.default_rng(0)
    snap = dyn.generator_at(mum3_family, rng.uniform(-1, 1, 4))
    eye = np.eye(3)
    assert np.abs(matcore.apply_superop(snap.generator, eye)).max() < 1e-12
    for _ in range(4):
        x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        out = matcore.apply_superop(snap.generator, x)
        assert abs(np.trace(out)) < 1e-10


def test_xi_formula_and_eigen_action(all_families):
    rng = np.random.default_rng(1)
    for name, fam in all_families.items():
        gamma = rng.uniform(-2, 2, fam.n_povms)
        snap = dyn.generator_at(fam, gamma)
        expected = fam.eigen_action * gamma - gamma.sum()
        assert np.abs(snap.xi - expected).max() < 1e-12, name
        for a in (0, fam.n_povms - 1):
            u = fam.eigen_ops[a, 0]
            got = matcore.apply_superop(snap.generator, u)
            assert np.abs(got - snap.xi[a] * u).max() < 1e-10, name


def test_pauli_15_2_xi_reduction(pauli15_family):
    # (M/d)(x - y) = 1 for this family, so xi_a = gamma_a - sum(gamma)
    rng = np.random.default_rng(2)
    gamma = rng.uniform(-1, 1, 15)
    snap = dyn.generator_at(pauli15_family, gamma)
    assert np.abs(snap.xi - (gamma - gamma.sum())).max() < 1e-12


def test_kossakowski_reconstruction(all_families):
    rng = np.random.default_rng(3)
    for name, fam in all_families.items():
        gamma = rng.uniform(-2, 2, fam.n_povms)
        snap = dyn.generator_at(fam, gamma)
        assert dyn.canonical_reconstruction_residual(snap) < 1e-10, name
        assert np.abs(snap.hamiltonian).max() < 1e-10, name


def test_pauli_15_2_diagonal_form(pauli15_family):
    """In the Pauli-product basis the Kossakowski matrix is diagonal and the
    generator takes the form (1/4) sum_a J_a (4 G_a X G_a - X)."""
    basis = tuple(g[0] for g in measure.pauli_product_basis().groups)
    rng = np.random.default_rng(4)
    gamma = rng.uniform(-1, 2, 15)
    snap = dyn.generator_at(pauli15_family, gamma, basis=basis)
    k = snap.kossakowski
    assert np.abs(k - np.diag(np.diag(k))).max() < 1e-10
    rates = np.diag(k).real
    for _ in range(4):
        x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        lhs = matcore.apply_superop(snap.generator, x)
        rhs = -0.25 * rates.sum() * x
        for j, g in zip(rates, basis):
            rhs = rhs + 0.25 * j * (4 * g @ x @ g)
        assert np.abs(lhs - rhs).max() < 1e-10


def test_rates_basis_independent(pauli15_family):
    basis = tuple(g[0] for g in measure.pauli_product_basis().groups)
    gamma = np.linspace(-1, 1, 15)
    default = dyn.generator_at(pauli15_family, gamma)
    custom = dyn.generator_at(pauli15_family, gamma, basis=basis)
    assert np.abs(default.rates - custom.rates).max() < 1e-10


# ---------------------------------------------------------------------------
# trajectories and evolution


def test_trajectory_validation():
    with pytest.raises(ValueError, match="start"):
        dyn.RateTrajectory(times=[0.5, 1.0], rates=[[1.0], [1.0]])
    with pytest.raises(ValueError, match="increasing"):
        dyn.RateTrajectory(times=[0.0, 0.0], rates=[[1.0], [1.0]])
    with pytest.raises(ValueError, match="finite"):
        dyn.RateTrajectory(times=[0.0, 1.0], rates=[[np.nan], [1.0]])


def test_zero_rates_give_unit_eigenvalues(mub3_family):
    traj = dyn.RateTrajectory.constant(np.zeros(4), t_max=2.0, num=9)
    lam = dyn.evolve_eigenvalues(mub3_family, traj)
    assert np.abs(lam - 1.0).max() == 0.0


def test_constant_rates_closed_form(all_families):
    rng = np.random.default_rng(5)
    for name, fam in all_families.items():
        gamma = rng.uniform(-1, 1, fam.n_povms)
        traj = dyn.RateTrajectory.constant(gamma, t_max=1.5, num=16)
        lam = dyn.evolve_eigenvalues(fam, traj)
        xi = fam.eigen_action * gamma - gamma.sum()
        closed = np.exp(np.outer(traj.times, xi))
        assert np.abs(lam - closed).max() < 1e-10, name


def test_mub3_uniform_rates():
    fam = chan.build_family(measure.mub_povm(3))
    traj = dyn.RateTrajectory.constant(np.ones(4), t_max=0.5, num=6)
    lam = dyn.evolve_eigenvalues(fam, traj)
    assert np.abs(lam - np.exp(-3 * traj.times)[:, None]).max() < 1e-12


def test_evolution_stable_under_grid_refinement(mub3_family):
    # sampling the same piecewise-linear rates on a refined grid must not
    # change the eigenvalues at shared times
    rng = np.random.default_rng(10)
    coarse_t = np.linspace(0.0, 1.0, 6)
    coarse_r = rng.uniform(-1, 1, size=(6, 4))
    coarse = dyn.RateTrajectory(times=coarse_t, rates=coarse_r)
    fine_t = np.linspace(0.0, 1.0, 41)
    fine_r = np.stack([np.interp(fine_t, coarse_t, coarse_r[:, j]) for j in range(4)], axis=1)
    fine = dyn.RateTrajectory(times=fine_t, rates=fine_r)
    lam_coarse = dyn.evolve_eigenvalues(mub3_family, coarse)
    lam_fine = dyn.evolve_eigenvalues(mub3_family, fine)
    assert np.abs(lam_fine[::8] - lam_coarse).max() < 1e-12


def test_dynamical_map_identity_at_zero(mub3_family):
    traj = dyn.RateTrajectory.constant([0.3, 0.1, 0.7, 0.2], t_max=1.0, num=5)
    s = dyn.dynamical_map_at(mub3_family, traj, 0.0)
    assert np.abs(s - np.eye(9)).max() < 1e-12
    with pytest.raises(ValueError, match="outside"):
        dyn.dynamical_map_at(mub3_family, traj, 1.5)


def test_dynamical_map_semigroup_cp(mub3_family):
    traj = dyn.RateTrajectory.constant([0.5, 1.0, 0.1, 0.3], t_max=1.0, num=11)
    for t in (0.25, 0.6, 1.0):
        ok, _ = chan.cp_exact(dyn.dynamical_map_at(mub3_family, traj, t))
        assert ok


def test_mub3_map_off_grid_value(mub3_family):
    traj = dyn.RateTrajectory.constant(np.ones(4), t_max=1.0, num=11)
    s = dyn.dynamical_map_at(mub3_family, traj, 0.1)
    u = mub3_family.eigen_ops[2, 1]
    got = matcore.apply_superop(s, u)
    assert np.abs(got - np.exp(-0.3) * u).max() < 1e-10


# ---------------------------------------------------------------------------
# divisibility: closed-form tests


def test_cpdiv_sufficient_branches(mum3_family):
    res = dyn.cpdiv_sufficient(mum3_family, np.ones(4))
    assert res.ok and res.branch == "nonnegative-rates"
    # the complementary branch equals 9 sum(gamma) - 25 gamma_a >= 0 here
    gamma = np.array([1.0, 1.0, 1.0, -0.1])
    res = dyn.cpdiv_sufficient(mum3_family, gamma)
    manual = 9 * gamma.sum() - 25 * gamma
    assert res.ok == bool(np.all(manual >= 0))
    assert np.abs(res.zeta - manual * 2 / 25).max() < 1e-12


def test_cpdiv_sufficient_mub_collapses_to_nonnegativity(mub3_family):
    rng = np.random.default_rng(6)
    for _ in range(300):
        gamma = rng.uniform(-1, 1, 4)
        res = dyn.cpdiv_sufficient(mub3_family, gamma)
        assert res.ok == bool(np.all(gamma >= 0))


def test_cpdiv_sufficient_implies_exact(all_families):
    rng = np.random.default_rng(7)
    for name, fam in all_families.items():
        hits = 0
        for k in range(400):
            lo = -2.0 if k % 2 else -0.05  # mostly-positive batch keeps hits up at N = 15
            gamma = rng.uniform(lo, 2, fam.n_povms)
            if not dyn.cpdiv_sufficient(fam, gamma).ok:
                continue
            hits += 1
            snap = dyn.generator_at(fam, gamma)
            assert dyn.cpdiv_exact(snap), (name, gamma, snap.rates[0])
        assert hits > 0


def test_cpdiv_exact_mub_iff_nonnegative(mub3_family):
    rng = np.random.default_rng(8)
    for _ in range(300):
        gamma = rng.uniform(-1, 1, 4)
        if abs(gamma.min()) < 1e-8:
            continue
        snap = dyn.generator_at(mub3_family, gamma)
        assert (snap.rates[0] > -1e-12) == (gamma.min() > 0)


def test_cpdiv_exact_mum_examples(mum3_family):
    # a rate vector with one negative entry that stays of Lindblad type
    snap = dyn.generator_at(mum3_family, np.array([1.0, 1.0, 1.0, -0.1]))
    assert dyn.cpdiv_exact(snap)
    # and one that does not
    snap = dyn.generator_at(mum3_family, np.array([0.0, 1.0, -1.0, 1.0]))
    assert not dyn.cpdiv_exact(snap)


def test_mum_slice_nonnegative_rates_are_cp_divisible(mum3_family):
    rng = np.random.default_rng(9)
    for _ in range(100):
        gamma = rng.uniform(0, 2, 4)
        gamma[2] = 0.5 * (gamma[1] + gamma[3])
        snap = dyn.generator_at(mum3_family, gamma)
        assert dyn.cpdiv_exact(snap)


def test_pdiv_necessary(mub3_family):
    snap = dyn.generator_at(mub3_family, np.zeros(4))
    assert dyn.pdiv_necessary(snap)  # boundary
    snap = dyn.generator_at(mub3_family, np.array([3.0, 3.0, -1.0, -1.0]))
    assert dyn.pdiv_necessary(snap)  # xi = gamma_a - 4 <= 0
    snap = dyn.generator_at(mub3_family, np.array([1.0, 1.0, -1.0, -1.0]))
    assert not dyn.pdiv_necessary(snap)  # xi_1 = 1 > 0


def test_pdiv_sufficient_mub_boundary(mub3_family):
    ok = dyn.pdiv_sufficient(mub3_family, np.array([5.0, 5.0, -1.0, -1.0]))
    assert ok.ok and ok.branch == "amplified-ratio" and ok.n_negative == 2
    bad = dyn.pdiv_sufficient(mub3_family, np.array([4.99, 4.99, -1.0, -1.0]))
    assert not bad.ok and "5.0" in bad.reason


def test_pdiv_sufficient_all_positive(all_families):
    for fam in all_families.values():
        res = dyn.pdiv_sufficient(fam, np.full(fam.n_povms, 0.7))
        assert res.ok and res.branch == "plain-maximum" and res.n_negative == 0


def test_pdiv_sufficient_rejects_all_negative(mub3_family):
    res = dyn.pdiv_sufficient(mub3_family, -np.ones(4))
    assert not res.ok and "L = N" in res.reason


def test_pdiv_sufficient_pauli_15_2_boundary(pauli15_family):
    gamma = np.full(15, -1.0)
    gamma[:3] = 13.0
    res = dyn.pdiv_sufficient(pauli15_family, gamma)
    assert res.ok and res.n_negative == 12 and res.branch == "amplified-ratio"
    gamma[:3] = 12.9
    assert not dyn.pdiv_sufficient(pauli15_family, gamma).ok


def test_pdiv_sufficient_too_many_negatives(pauli15_family):
    gamma = np.full(15, 100.0)
    gamma[:13] = -0.01  # L = 13 >= (N - b + M kappa_+)/2 = 13
    res = dyn.pdiv_sufficient(pauli15_family, gamma)
    assert not res.ok and "exceed" in res.reason


def test_ddiv_sufficient_mub_special_case(mub3_family):
    # gamma_1 = g, rest = h: positive iff h >= 0 and g >= -h
    for g, h, want in [(1.0, 0.5, True), (-0.4, 0.5, True), (-0.6, 0.5, False), (1.0, -0.1, False)]:
        gamma = np.array([g, h, h, h])
        ok, _ = dyn.ddiv_sufficient(mub3_family, gamma, tol=1e-12)
        assert ok == want, (g, h)


def test_ddiv_threshold_remark_value(mub3_family):
    def pred(g):
        return dyn.ddiv_sufficient(mub3_family, np.array([g, g, -1.0, -1.0]), tol=1e-12)[0]

    thr = dyn.bisect_threshold(pred, 0.0, 20.0, tol=1e-10)
    assert thr == pytest.approx(2 + np.sqrt(3), abs=1e-8)


# ---------------------------------------------------------------------------
# oracles


def test_falsifier_empty_for_semigroup(mub3_family):
    traj = dyn.RateTrajectory.constant([0.5, 0.2, 0.8, 0.1], t_max=1.0, num=11)
    assert dyn.tracenorm_falsifier(mub3_family, traj, samples=40, seed=1) == []


def test_falsifier_detects_growth(mub3_family):
    traj = dyn.RateTrajectory.constant([1.0, 1.0, -1.0, -1.0], t_max=0.5, num=6)
    violations = dyn.tracenorm_falsifier(mub3_family, traj, samples=30, seed=5)
    assert violations
    assert max(v.derivative for v in violations) > 1e-3


def test_falsifier_identity_probe_fixed(mub3_family):
    # the identity is a fixed point of every unital map: its norm is constant
    traj = dyn.RateTrajectory.constant([1.0, 1.0, -1.0, -1.0], t_max=0.5, num=6)
    eye = np.eye(3) / np.sqrt(3)
    for t in (0.1, 0.3):
        s = dyn.dynamical_map_at(mub3_family, traj, t)
        assert matcore.trace_norm(matcore.apply_superop(s, eye)) == pytest.approx(
            np.sqrt(3), abs=1e-12
        )


def test_propagator_identity_pair(mub3_family):
    traj = dyn.RateTrajectory.constant([0.2, 0.4, 0.1, 0.3], t_max=1.0, num=5)
    res = dyn.propagator_cp_check(mub3_family, traj, [(0.4, 0.4)])
    assert res[0].cp and res[0].min_choi_eigenvalue == pytest.approx(0.0, abs=1e-12)


def test_propagator_semigroup_true(mub3_family):
    traj = dyn.RateTrajectory.constant([0.2, 0.4, 0.1, 0.3], t_max=1.0, num=11)
    pairs = [(0.1, 0.5), (0.0, 1.0), (0.3, 0.9)]
    for r in dyn.propagator_cp_check(mub3_family, traj, pairs):
        assert r.cp


def test_propagator_detects_non_markovianity(mub2_family):
    times = np.linspace(0.0, 2.0, 101)
    rates = np.stack([np.ones_like(times), np.ones_like(times), -np.tanh(times)], axis=1)
    traj = dyn.RateTrajectory(times=times, rates=rates)
    # the map itself stays completely positive...
    for t in (0.5, 1.0, 2.0):
        ok, _ = chan.cp_exact(dyn.dynamical_map_at(mub2_family, traj, t))
        assert ok
    # ...but short-interval propagators are not
    pairs = [(times[k], times[k + 1]) for k in range(40, 60, 5)]
    flags = [r.cp for r in dyn.propagator_cp_check(mub2_family, traj, pairs)]
    assert False in flags


def test_propagator_skips_non_invertible(mub3_family):
    # strongly depolarizing rates drive eigenvalues below the cutoff
    traj = dyn.RateTrajectory.constant(np.full(4, 10.0), t_max=10.0, num=21)
    res = dyn.propagator_cp_check(mub3_family, traj, [(9.0, 9.5)])
    assert res[0].cp is None and "non-invertible" in res[0].skipped


def test_classify_rates_report(mum3_family):
    rep = dyn.classify_rates(mum3_family, np.array([1.0, 0.5, 0.4, 0.3]))
    assert rep.cp_sufficient and rep.cp_exact and rep.p_necessary and rep.d_sufficient
    assert rep.p_sufficient and rep.n_negative == 0
    assert len(rep.rates) == 8 and len(rep.xi) == 4

"""Channel families, mixtures and positivity/entanglement tests."""

import numpy as np
import pytest

from symdyn import chan, matcore, measure


# ---------------------------------------------------------------------------
# construction and algebra


def test_build_rejects_bad_povm():
    povm = measure.mub_povm(3)
    broken = measure.SymmetricPOVM(
        d=3, n_povms=4, n_outcomes=3, t=povm.t,
        ops=povm.ops + 1e-4 * np.eye(3), x=povm.x, y=povm.y, z=povm.z,
    )
    with pytest.raises(ValueError, match="symmetry"):
        chan.build_family(broken)


def test_family_unital_and_trace_preserving(all_families):
    for fam in all_families.values():
        for a in range(fam.n_povms):
            assert matcore.unital_defect(fam.phi[a]) < 1e-10
            assert matcore.trace_preserving_defect(fam.phi[a]) < 1e-10
            assert matcore.unital_defect(fam.psi[a]) < 1e-10


def test_family_choi_psd(mub3_family):
    for a in range(4):
        ok, w = matcore.is_psd(mub3_family.choi_phi[a])
        assert ok and w > -1e-12


def test_composition_relations(all_families):
    for name, fam in all_families.items():
        assert chan.composition_check(fam) < 1e-10, name


def test_channel_sum_identity(all_families):
    for name, fam in all_families.items():
        assert chan.channel_sum_residual(fam) < 1e-10, name


def test_mub5_family_builds():
    fam = chan.build_family(measure.mub_povm(5))
    assert chan.composition_check(fam) < 1e-10
    assert chan.channel_sum_residual(fam) < 1e-10
    assert chan.eigen_ops(fam).unitary


def test_pauli_15_2_channel_form(pauli15_family):
    # Phi_a[X] = I Tr(X)/4 + G_a Tr(G_a X) on probe matrices
    fam = pauli15_family
    basis = list(measure.pauli_product_basis().elements())
    rng = np.random.default_rng(0)
    for a in (0, 7, 14):
        g = basis[a]
        for _ in range(3):
            x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            got = matcore.apply_superop(fam.phi[a], x)
            want = np.eye(4) * np.trace(x) / 4 + g * np.trace(g @ x)
            assert np.abs(got - want).max() < 1e-12


def test_eigen_ops_mub_unitary(mub3_family):
    report = chan.eigen_ops(mub3_family)
    assert report.unitary
    assert report.orthogonality_residual < 1e-10
    assert report.eigen_action_residual < 1e-10


def test_eigen_ops_mum_not_unitary(mum3_family):
    report = chan.eigen_ops(mum3_family)
    assert not report.unitary
    assert report.orthogonality_residual < 1e-10
    assert report.eigen_action_residual < 1e-10


def test_pauli_15_2_eigenops_unitary(pauli15_family):
    # projective measurement operators (x = d/M), so the U's are unitary
    assert chan.eigen_ops(pauli15_family).unitary


def test_psi_eigen_action(mum3_family):
    fam = mum3_family
    p = fam.povm
    coeff = -p.n_outcomes * (p.x - p.y) / (p.d * (p.n_outcomes - 1))
    u = fam.eigen_ops[2, 1]
    got = matcore.apply_superop(fam.psi[2], u)
    assert np.abs(got - coeff * u).max() < 1e-10
    # and zero on other sectors
    got = matcore.apply_superop(fam.psi[0], u)
    assert np.abs(got).max() < 1e-10


# ---------------------------------------------------------------------------
# mixtures


def test_identity_mixture(mub3_family):
    spec = chan.mixture_from_probs(mub3_family, [1, 0, 0, 0, 0])
    s, lam = chan.mixture_channel(mub3_family, spec)
    assert np.allclose(lam, 1.0)
    assert np.abs(s - np.eye(9)).max() < 1e-12


def test_uniform_mub3_mixture(mub3_family):
    spec = chan.mixture_from_probs(mub3_family, [1 / 3, 1 / 6, 1 / 6, 1 / 6, 1 / 6])
    s, lam = chan.mixture_channel(mub3_family, spec)
    assert np.allclose(lam, 0.25, atol=1e-12)
    for a in range(4):
        for k in range(2):
            u = mub3_family.eigen_ops[a, k]
            assert np.abs(matcore.apply_superop(s, u) - 0.25 * u).max() < 1e-10


def test_tilde_identity(mub3_family):
    spec = chan.mixture_from_probs(mub3_family, [1, 0, 0, 0, 0], "lambda_tilde")
    _, lam = chan.mixture_channel(mub3_family, spec)
    assert np.allclose(lam, 1.0)


def test_mixture_validation(mub3_family):
    bad = chan.mixture_from_probs(mub3_family, [0.2, 0.2, 0.2, 0.2, 0.2])  # p0 < 1/d
    assert not bad.valid_probability
    with pytest.raises(ValueError, match="admissible"):
        chan.mixture_channel(mub3_family, bad)
    chan.mixture_channel(mub3_family, bad, validate=False)


def test_spec_round_trips(all_families):
    rng = np.random.default_rng(77)
    for fam in all_families.values():
        for variant in ("lambda", "lambda_tilde"):
            for _ in range(20):
                lam = rng.uniform(-1, 1, fam.n_povms)
                spec = chan.spec_from_eigenvalues(fam, lam, variant)
                assert np.abs(spec.eigenvalues - lam).max() < 1e-12
                assert abs(spec.probs.sum() - 1) < 1e-12
                back = chan.mixture_from_probs(fam, spec.probs, variant)
                assert np.abs(back.eigenvalues - lam).max() < 1e-12


def test_unit_eigenvalues_invert_to_identity(mub3_family):
    spec = chan.spec_from_eigenvalues(mub3_family, np.ones(4))
    assert np.abs(spec.probs - [1, 0, 0, 0, 0]).max() < 1e-12


def test_mub3_quarter_eigenvalues_invert(mub3_family):
    spec = chan.spec_from_eigenvalues(mub3_family, np.full(4, 0.25))
    assert np.abs(spec.probs - [1 / 3, 1 / 6, 1 / 6, 1 / 6, 1 / 6]).max() < 1e-12


def test_choi_of_eigenvalues_matches_mixture(all_families):
    rng = np.random.default_rng(5)
    for fam in all_families.values():
        lam = rng.uniform(-0.5, 1, fam.n_povms)
        spec = chan.spec_from_eigenvalues(fam, lam)
        s, _ = chan.mixture_channel(fam, spec, validate=False)
        direct = matcore.choi_of(s)
        fast = chan.choi_of_eigenvalues(fam, lam)
        assert np.abs(direct - fast).max() < 1e-11


# ---------------------------------------------------------------------------
# positivity tests


def test_cp_sufficient_boundaries(mub3_family):
    ident = chan.spec_from_eigenvalues(mub3_family, np.ones(4))
    assert chan.cp_sufficient(mub3_family, ident)  # boundary of the upper bound
    neg = chan.spec_from_eigenvalues(mub3_family, np.array([-0.1, 0.5, 0.5, 0.5]))
    assert not chan.cp_sufficient(mub3_family, neg)  # negative eigenvalue not allowed


def test_cp_exact_reference_channels(mub3_family):
    s, _ = chan.mixture_channel(
        mub3_family, chan.spec_from_eigenvalues(mub3_family, np.zeros(4)), validate=False
    )
    ok, w = chan.cp_exact(s)  # the maximally depolarizing channel
    assert ok and w == pytest.approx(1 / 3, abs=1e-12)


def test_fujiwara_algoet_cases(mub3_family):
    assert chan.fujiwara_algoet(mub3_family, np.ones(4))
    assert not chan.fujiwara_algoet(mub3_family, np.array([-0.5, 1 / 6, 1 / 6, 1 / 6]))
    lam = np.array([-0.4, 0.2, 0.2, 0.2])
    assert not chan.fujiwara_algoet(mub3_family, lam)
    choi = chan.choi_of_eigenvalues(mub3_family, lam)
    assert not matcore.is_psd(choi)[0]


def test_fujiwara_algoet_rejects_non_mub(mum3_family):
    with pytest.raises(ValueError, match="MUB"):
        chan.fujiwara_algoet(mum3_family, np.ones(4))


def test_fujiwara_algoet_matches_choi_oracle(mub3_family):
    rng = np.random.default_rng(123)
    checked = 0
    for _ in range(1500):
        lam = rng.uniform(-1, 1, 4)
        margin = min(lam.sum() + 0.5, 1 + 3 * lam.min() - lam.sum())
        mn = matcore.is_psd(chan.choi_of_eigenvalues(mub3_family, lam), tol=0.0)[1]
        if abs(margin) < 1e-8 or abs(mn) < 1e-8:
            continue
        checked += 1
        assert chan.fujiwara_algoet(mub3_family, lam) == (mn > 0)
    assert checked > 1000


def _eigenvalue_samples(rng, n, count):
    """Box-uniform vectors mixed with correlated ones near the diagonal.

    The spread of the correlated batch shrinks with n so that the thin
    closed-form acceptance regions keep getting sampled as N grows.
    """
    for _ in range(count // 2):
        yield rng.uniform(-1, 1, n)
    for _ in range(count - count // 2):
        center = rng.uniform(-0.5, 1.0)
        yield center + rng.uniform(-0.8 / n, 0.8 / n, n)


def test_cp_sufficient_implies_cp_exact(all_families):
    # sufficiency sweep: zero counterexamples allowed over 10^4 specs per
    # family and variant
    rng = np.random.default_rng(2024)
    for name, fam in all_families.items():
        for variant in ("lambda", "lambda_tilde"):
            hits = 0
            for lam in _eigenvalue_samples(rng, fam.n_povms, 10_000):
                spec = chan.spec_from_eigenvalues(fam, lam, variant)
                if not chan.cp_sufficient(fam, spec):
                    continue
                hits += 1
                mn = matcore.is_psd(chan.choi_of_eigenvalues(fam, lam), tol=0.0)[1]
                assert mn > -1e-10, (name, variant, lam, mn)
            assert hits > 0, (name, variant)


def test_eb_sufficient_cases(mub3_family):
    assert chan.eb_sufficient(mub3_family, np.zeros(4))  # maximally depolarizing
    assert chan.eb_sufficient(mub3_family, np.full(4, 0.25))  # boundary sum = M(x-y)/d
    assert not chan.eb_sufficient(mub3_family, np.ones(4))  # identity channel
    ident, _ = chan.mixture_channel(
        mub3_family, chan.spec_from_eigenvalues(mub3_family, np.ones(4)), validate=False
    )
    ok, _ = chan.ppt_necessary(ident)
    assert not ok


def test_eb_sufficient_implies_ppt(all_families):
    # sufficiency sweep: zero counterexamples allowed over 10^4 specs per family
    rng = np.random.default_rng(31)
    for name, fam in all_families.items():
        hits = 0
        for _ in range(10_000):
            # single-sign vectors with the sum scaled near the branch limits
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            raw = rng.uniform(0.0, 1.0, fam.n_povms)
            budget = rng.uniform(0.2, 1.1)
            p = fam.povm
            limit = p.n_outcomes * (p.x - p.y) / p.d
            if sign < 0:
                limit /= p.n_outcomes - 1
            lam = sign * raw / raw.sum() * budget * limit
            if not chan.eb_sufficient(fam, lam):
                continue
            hits += 1
            s, _ = chan.mixture_channel(
                fam, chan.spec_from_eigenvalues(fam, lam), validate=False
            )
            ok, mn = chan.ppt_necessary(s)
            assert ok, (name, lam, mn)
        assert hits > 0, name

import math

import numpy as np
import pytest

from mtails import rmm
from mtails.errors import (
    DomainError,
    Divergent,
    NotPositiveDefinite,
    PreconditionFailed,
    TooLarge,
    UnknownMoments,
)
from mtails.harness import (
    CertSpec,
    Constant,
    DiagSubgaussian,
    DiscreteAtoms,
    Exponential,
    GaussianVectors,
    RademacherOuter,
    RmmSampler,
    Uniform,
    exact_lemma2_check,
    exact_theorem3_check,
    lieb_concavity_check,
    lieb_midpoint_gap,
    load_suites,
    mc_validate,
    mc_validate_many,
    mgf_hypothesis_grid_check,
    mgf_identity_check,
    reports_to_csv,
    reports_to_json,
    trial_statistics,
)

from conftest import random_pd, random_sym


def random_atoms(rng, d, k):
    atoms = np.stack([random_sym(rng, d) for _ in range(k)])
    return DiscreteAtoms(atoms, rng.dirichlet(np.ones(k)))


class TestEnsembles:
    def test_atoms_validation(self):
        with pytest.raises(DomainError):
            DiscreteAtoms(np.zeros((2, 2, 2)), [0.5, 0.6])
        with pytest.raises(DomainError):
            DiscreteAtoms(np.zeros((2, 2, 2)), [1.0, 0.0])
        with pytest.raises(DomainError):
            DiscreteAtoms(np.zeros((2, 2, 3)), [0.5, 0.5])

    @pytest.mark.parametrize("d", [1, 2, 3, 6])
    def test_rademacher_moments(self, d):
        exact = RademacherOuter(d).exact_moments()
        brute = RademacherOuter(d).brute_force_moments()
        np.testing.assert_allclose(exact.mean, brute.mean, atol=1e-12)
        np.testing.assert_allclose(exact.second, brute.second, atol=1e-12)

    def test_rademacher_enumeration_cap(self):
        with pytest.raises(TooLarge):
            RademacherOuter(13).sign_vectors()

    def test_gaussian_moments(self, rng):
        s = random_pd(rng, 2)
        e = GaussianVectors(s)
        x = e.draw(rng, 400000)
        X = np.einsum("ni,nj->nij", x, x) - s
        np.testing.assert_allclose((X @ X).mean(axis=0), e.exact_moments().second, rtol=0.03, atol=0.03)

    def test_rmm_moments(self, rng):
        A, B = rng.standard_normal((2, 5)), rng.standard_normal((3, 5))
        m = RmmSampler(A, B).exact_moments()
        from mtails.specmat import dilate
        np.testing.assert_allclose(m.mean, dilate(A @ B.T), atol=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(UnknownMoments):
            RademacherOuter(3).target("subgaussian", 10, 1.0)

    def test_sup_needs_single_draw(self):
        with pytest.raises(DomainError):
            DiagSubgaussian((1.0,) * 30).target("sup", 5, 3.0)

    def test_rmm_epsilon_needs_enough_columns(self):
        e = RmmSampler(np.eye(3), np.eye(3))
        with pytest.raises(PreconditionFailed):
            e.target("rmm_epsilon", 10, math.log(10), eps=0.5)


class TestLemma2:
    def test_zero_atom(self):
        e = DiscreteAtoms(np.zeros((1, 3, 3)), [1.0])
        for n in (1, 3, 6):
            r = exact_lemma2_check(e, n)
            assert r.lhs == 3.0 and r.holds

    def test_scalar_pair(self):
        c = 0.7
        r = exact_lemma2_check(DiscreteAtoms.scalar([c, -c], [0.5, 0.5]), 2)
        # E[e^{X1+X2}] / cosh(c)^2 = 1 exactly for commuting scalars
        np.testing.assert_allclose(r.lhs, 1.0, rtol=1e-13)
        assert r.holds

    def test_random_2x2(self, rng):
        for _ in range(10):
            r = exact_lemma2_check(random_atoms(rng, 2, 2), 4)
            assert r.lhs <= 2 + 1e-9

    def test_cap(self):
        e = DiscreteAtoms.scalar([1, 2, 3, 4], np.full(4, 0.25))
        exact_lemma2_check(e, 9)  # 4^9 = 262144 sequences: allowed
        with pytest.raises(TooLarge):
            exact_lemma2_check(e, 10)


class TestTheorem3:
    def test_scalar_grid(self):
        e = DiscreteAtoms.scalar([1.0, -1.0], [0.5, 0.5])
        for t in (0.5, 1.0, 2.0, 4.0):
            assert exact_theorem3_check(e, 4, 0.5, t).holds

    def test_large_t(self):
        r = exact_theorem3_check(DiscreteAtoms.scalar([1.0, -1.0], [0.5, 0.5]), 3, 1.0, 100.0)
        assert r.lhs == 0.0 and r.holds

    def test_eta_zero(self, rng):
        r = exact_theorem3_check(random_atoms(rng, 3, 2), 3, 0.0, 0.5)
        assert r.lhs == 0.0

    def test_random(self, rng):
        for _ in range(10):
            e = random_atoms(rng, 2, 3)
            for eta in (0.25, 1.0, -0.5):
                assert exact_theorem3_check(e, 3, eta, 1.0).holds

    def test_domain(self):
        with pytest.raises(DomainError):
            exact_theorem3_check(DiscreteAtoms.scalar([1.0], [1.0]), 1, 1.0, 0.0)


class TestLieb:
    def test_equal_points(self, rng):
        H, M = random_sym(rng, 3), random_pd(rng, 3)
        assert abs(lieb_midpoint_gap(H, M, M)) <= 1e-12 * max(1.0, np.trace(M))

    def test_zero_h(self, rng):
        M1, M2 = random_pd(rng, 3), random_pd(rng, 3)
        assert abs(lieb_midpoint_gap(np.zeros((3, 3)), M1, M2)) <= 1e-10

    def test_random(self, rng):
        assert all(lieb_concavity_check(random_sym(rng, 3, 2.0), random_pd(rng, 3), random_pd(rng, 3))
                   for _ in range(500))

    def test_not_pd(self, rng):
        with pytest.raises(NotPositiveDefinite):
            lieb_concavity_check(np.eye(2), np.diag([1.0, -1.0]), np.eye(2))


class TestMgfIdentity:
    def test_eta_zero(self):
        r = mgf_identity_check(Exponential(1.0), 0.0)
        assert r.lhs == 0.0 and r.rhs == 0.0

    def test_exponential(self):
        r = mgf_identity_check(Exponential(1.0), 0.5)
        assert r.lhs == 0.5
        assert r.agrees and abs(r.rhs - 0.5) <= 1e-6

    @pytest.mark.parametrize("c, eta", [(2.0, 1.0), (0.3, -2.0), (5.0, 0.4)])
    def test_constant(self, c, eta):
        r = mgf_identity_check(Constant(c), eta)
        np.testing.assert_allclose(r.lhs, math.exp(eta * c) - eta * c - 1, rtol=1e-14)
        assert r.agrees

    @pytest.mark.parametrize("law, eta", [(Uniform(2.0), 1.3), (Exponential(3.0), -1.0), (Exponential(2.0), 1.9)])
    def test_other_laws(self, law, eta):
        assert mgf_identity_check(law, eta).agrees

    def test_divergent(self):
        with pytest.raises(Divergent):
            mgf_identity_check(Exponential(1.0), 1.0)


class TestGridCheck:
    def test_diag_gaussian_tight(self):
        assert mgf_hypothesis_grid_check(DiagSubgaussian((1.0, 2.0, 0.5)), np.linspace(0.1, 5, 30))
        # any smaller variance proxy fails
        assert not mgf_hypothesis_grid_check(DiagSubgaussian((1.0, 2.0)), [1.0], sigma2_bar=1.99)

    def test_zero(self):
        e = DiscreteAtoms(np.zeros((1, 2, 2)), [1.0])
        assert mgf_hypothesis_grid_check(e, [0.5, 2.0], sigma2_bar=0.0, k_bar=1.0)

    def test_rademacher_scalar(self):
        e = DiscreteAtoms.scalar([1.0, -1.0], [0.5, 0.5])
        assert mgf_hypothesis_grid_check(e, np.linspace(0.01, 5, 100))

    def test_skewed_atoms_not_subgaussian_with_variance(self):
        # x x^T - I is skewed; for small eta its MGF outgrows eta^2 (d - 1) / 2
        assert not mgf_hypothesis_grid_check(RademacherOuter(3), [0.25, 0.5])
        assert mgf_hypothesis_grid_check(RademacherOuter(3), [1.0, 2.0, 4.0])

    def test_unknown(self, rng):
        with pytest.raises(UnknownMoments):
            mgf_hypothesis_grid_check(GaussianVectors(np.eye(2)), [1.0])

    def test_grid_domain(self):
        with pytest.raises(DomainError):
            mgf_hypothesis_grid_check(DiagSubgaussian((1.0,)), [0.0])


class TestMonteCarlo:
    def test_rademacher_bernstein(self):
        r = mc_validate(RademacherOuter(4), CertSpec("bernstein", 100, 8.0), trials=5000, seed=3)
        np.testing.assert_allclose(r.bound, 1.0767312371011219e-2, rtol=1e-12)
        assert r.passed and 0 <= r.empirical <= 1
        assert r.slack == pytest.approx(math.sqrt(math.log(1000) / 10000))

    def test_sup_example(self):
        r = mc_validate(DiagSubgaussian((1.0,) * 20), CertSpec("sup", 1, 3.0), trials=20000, seed=1)
        assert r.bound == pytest.approx(math.exp(-3))
        assert r.passed

    def test_zero_trials(self):
        with pytest.raises(DomainError):
            mc_validate(RademacherOuter(2), CertSpec("bernstein", 10, 2.0), trials=0)

    def test_unknown_kind(self):
        with pytest.raises(UnknownMoments):
            mc_validate(GaussianVectors(np.eye(2)), CertSpec("bernstein", 10, 2.0), trials=10)

    def test_thread_independent(self):
        e = RmmSampler(np.eye(4), np.eye(4))
        a = trial_statistics(e, "rmm_precise", 50, 3000, seed=11, threads=1, chunk=512)
        b = trial_statistics(e, "rmm_precise", 50, 3000, seed=11, threads=4, chunk=512)
        assert a.tobytes() == b.tobytes()

    def test_chunk_independent(self):
        e = RademacherOuter(3)
        a = trial_statistics(e, "covariance", 20, 1000, seed=5, chunk=1000)
        b = trial_statistics(e, "covariance", 20, 1000, seed=5, chunk=7)
        assert a.tobytes() == b.tobytes()

    def test_prefix_stable(self):
        e = DiagSubgaussian((1.0, 1.0))
        a = trial_statistics(e, "subgaussian", 4, 100, seed=9)
        b = trial_statistics(e, "subgaussian", 4, 250, seed=9)
        assert a.tobytes() == b[:100].tobytes()

    def test_reports_reproducible(self):
        e = GaussianVectors(np.diag([1.0, 0.5]))
        run = lambda th: reports_to_csv(mc_validate_many(e, "gaussian_cov", 30, [1.0, 3.0], 2000, seed=2, threads=th))
        assert run(1) == run(3)

    def test_counting(self):
        reps = mc_validate_many(DiscreteAtoms.scalar([1.0, -1.0], [0.5, 0.5]), "bernstein", 1,
                                [0.1, 30.0], trials=1000, seed=0)
        # single +-1 draw: the deviation at t=0.1 is below 1, so the +1 draws violate it
        assert 400 < reps[0].violations < 600
        assert reps[1].violations == 0

    def test_serialization(self):
        reps = mc_validate_many(RademacherOuter(2), "covariance_upper", 10, [2.0, 4.0], 500, seed=4)
        lines = reports_to_csv(reps).splitlines()
        assert lines[0].startswith("ensemble_id,kind,n,t,deviation") and len(lines) == 3
        import json
        data = json.loads(reports_to_json(reps))
        assert data[0]["pass"] in (True, False) and data[0]["trials"] == 500


class TestConfig:
    def test_load(self, tmp_path):
        rmm.build_plan(np.eye(2), np.eye(2))
        (tmp_path / "a.csv").write_text("1,0\n0,1\n")
        (tmp_path / "suite.ini").write_text(
            "[r]\nensemble = rademacher\nd = 3\nkind = bernstein\nn = 10\nt = 2, 4\ntrials = 50\n"
            "[m]\nensemble = rmm\na = a.csv\nb = a.csv\nkind = rmm_precise\nn = 5\nt = 1\ntrials = 5\nseed = 7\n"
            "[g]\nensemble = gaussian\nsigma2 = 1, 2\nkind = gaussian_cov\nn = 3\nt = 1\ntrials = 5\n"
        )
        suites = load_suites(tmp_path / "suite.ini")
        assert [s.name for s in suites] == ["r", "m", "g"]
        assert suites[0].ts == (2.0, 4.0) and suites[0].seed is None
        assert suites[1].seed == 7

    def test_bad(self, tmp_path):
        from mtails.harness import ConfigError
        p = tmp_path / "bad.ini"
        p.write_text("[x]\nensemble = nope\n")
        with pytest.raises(ConfigError):
            load_suites(p)
        p.write_text("[x]\nensemble = rademacher\nd = 3\n")
        with pytest.raises(ConfigError):
            load_suites(p)

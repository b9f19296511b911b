import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from polyaig.chain import ChainConfig, PosteriorSamples
from polyaig.dirichlet import (AlphaPrior, CountMatrix, DirichletChainState,
                               alpha_coefficients, gibbs_sweep, grid_cdf,
                               grid_mean_sd, homogeneous_posterior_grid,
                               initial_state, marginal_log_likelihood,
                               posterior_predictive, quadrature_posterior,
                               quadrature_posterior_k2, run_chain,
                               run_chain_homogeneous, update_eta,
                               update_p, update_w)
from polyaig.pig import PigParams, PigSamplerConfig, pig_mean
from polyaig.rng import make_rng
from polyaig.special import EULER_GAMMA
from polyaig.summarize import batch_means_mcse

FAST_PIG = PigSamplerConfig(trunc_terms=200)


def chain_mcse(draws):
    return batch_means_mcse(draws)


class TestCountMatrix:
    def test_basic(self):
        cm = CountMatrix.from_array([[1, 2], [3, 0]], ["a", "b"], ["x", "y"])
        assert cm.n_units == 2 and cm.n_categories == 2
        assert np.array_equal(cm.row_sums, [3, 3])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            CountMatrix.from_array([[1, -1]])

    def test_all_zero_row_named(self):
        with pytest.raises(ValueError, match="unit_2"):
            CountMatrix.from_array([[1, 2], [0, 0]])

    def test_cached_sums_validated(self):
        cm = CountMatrix.from_array([[2, 2]])
        cm.row_sums = np.array([5])
        with pytest.raises(ValueError):
            cm.__post_init__()

    def test_label_lengths(self):
        with pytest.raises(ValueError):
            CountMatrix.from_array([[1, 2]], unit_labels=["a", "b"])

    def test_permuted_categories(self):
        cm = CountMatrix.from_array([[1, 2, 3]], category_labels=["x", "y", "z"])
        pm = cm.permuted_categories([2, 0, 1])
        assert pm.category_labels == ["z", "x", "y"]
        assert np.array_equal(pm.counts, [[3, 1, 2]])

    def test_empty_allowed_for_quadrature(self):
        cm = CountMatrix.from_array(np.zeros((0, 3), dtype=np.int64))
        assert cm.n_units == 0


class TestAlphaPrior:
    def test_default_mean_is_inverse_k(self):
        prior = AlphaPrior.for_categories(6)
        assert prior.mean_vector(6)[0] == pytest.approx(1 / 6, rel=1e-12)
        assert prior.scalar_tau() == pytest.approx(np.sqrt(np.pi / 2) / 6)

    def test_from_mean_roundtrip(self):
        assert AlphaPrior.from_mean(0.25).mean_vector(3)[1] == pytest.approx(0.25)

    def test_vector_tau(self):
        prior = AlphaPrior(tau=(1.0, 2.0))
        assert np.array_equal(prior.tau_vector(2), [1.0, 2.0])
        with pytest.raises(ValueError):
            prior.tau_vector(3)
        with pytest.raises(ValueError):
            prior.scalar_tau()

    def test_positive(self):
        with pytest.raises(ValueError):
            AlphaPrior(tau=0.0)


class TestMarginalLogLikelihood:
    def test_all_zero_counts(self):
        assert marginal_log_likelihood([0, 0, 0], [0.4, 1.0, 2.2]) == 0.0

    def test_single_count(self):
        assert marginal_log_likelihood([1, 0], [1.0, 1.0]) == pytest.approx(
            np.log(0.5), rel=1e-12)

    def test_three_counts(self):
        assert marginal_log_likelihood([2, 1], [1.0, 1.0]) == pytest.approx(
            np.log(1 / 12), rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            marginal_log_likelihood([1, 2, 3], [1.0, 1.0])


def _toy_state(counts, prior, seed=0):
    return initial_state(counts, prior, FAST_PIG, make_rng(seed))


class TestUpdates:
    def test_eta_is_gamma_of_alpha_sum(self):
        counts = CountMatrix.from_array([[4, 3], [1, 2], [5, 5]])
        prior = AlphaPrior(tau=1.0)
        state = _toy_state(counts, prior)
        state.alpha = np.array([1.2, 0.8])
        rng = make_rng(123)
        draws = np.array([update_eta(state, rng) for _ in range(40_000)])
        se = draws.std(ddof=1) / np.sqrt(draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0) - 2.0) <= 4 * se.max())

    def test_eta_consumes_exactly_m_draws(self):
        counts = CountMatrix.from_array([[4, 3], [1, 2]])
        state = _toy_state(counts, AlphaPrior(tau=1.0))
        rng_a, rng_b = make_rng(9), make_rng(9)
        update_eta(state, rng_a)
        rng_b.standard_gamma(float(state.alpha.sum()), size=2)
        assert rng_a.random() == rng_b.random()

    def test_w_marginal_mean_tracks_tilt(self):
        counts = CountMatrix.from_array([[2, 7]])
        state = _toy_state(counts, AlphaPrior(tau=1.0))
        state.alpha = np.array([0.4, 2.5])
        rng = make_rng(7)
        draws = np.stack([update_w(state, FAST_PIG, rng) for _ in range(30_000)])
        for k, alpha_k in enumerate(state.alpha):
            truth = pig_mean(PigParams.integer(c=np.sqrt(2) * alpha_k), FAST_PIG)
            col = draws[:, 0, k]
            se = col.std(ddof=1) / np.sqrt(col.size)
            assert abs(col.mean() - truth) <= 4 * se

    def test_p_posterior_mean(self):
        counts = CountMatrix.from_array([[2, 1]])
        state = _toy_state(counts, AlphaPrior(tau=1.0))
        state.alpha = np.array([1.0, 1.0])
        rng = make_rng(8)
        rows = np.array([np.exp(update_p(state, counts, rng)[0])
                         for _ in range(40_000)])
        se = rows[:, 0].std(ddof=1) / np.sqrt(rows.shape[0])
        assert abs(rows[:, 0].mean() - 0.6) <= 4 * se
        assert np.max(np.abs(rows.sum(axis=1) - 1.0)) <= 1e-10

    def test_uniform_dirichlet_when_counts_zero(self):
        counts = CountMatrix.from_array([[0, 1]])  # one count to satisfy rows
        state = _toy_state(counts, AlphaPrior(tau=1.0))
        state.alpha = np.array([1.0, 1.0])
        # Dirichlet(1, 2): E[p_1] = 1/3
        rng = make_rng(12)
        rows = np.array([np.exp(update_p(state, counts, rng)[0][0])
                         for _ in range(40_000)])
        se = rows.std(ddof=1) / np.sqrt(rows.size)
        assert abs(rows.mean() - 1 / 3) <= 4 * se


class TestAlphaCoefficients:
    def test_hand_worked_state(self):
        # M=1, K=2: w_11 = 0.5, eta_1 = 3, log p_11 = ln 0.6, tau^2 = 1:
        # a_1 = 0.5 + 1/2 = 1; b_1 = ln 3 + EULER_GAMMA + ln 0.6.
        w = np.array([[0.5, 0.25]])
        log_p = np.log(np.array([[0.6, 0.4]]))
        eta = np.array([3.0])
        a, b = alpha_coefficients(w, log_p, eta, AlphaPrior(tau=1.0))
        assert a[0] == pytest.approx(1.0, abs=1e-12)
        assert b[0] == pytest.approx(1.165002329803652, abs=1e-12)
        assert b[0] == pytest.approx(np.log(3.0) + EULER_GAMMA + np.log(0.6),
                                     abs=1e-12)

    def test_prior_term_vanishes_for_flat_tau(self):
        w = np.array([[0.5, 0.25], [1.5, 2.0]])
        log_p = np.full((2, 2), np.log(0.5))
        eta = np.array([1.0, 2.0])
        a, _ = alpha_coefficients(w, log_p, eta, AlphaPrior(tau=1e9))
        assert np.allclose(a, w.sum(axis=0), rtol=0, atol=1e-12)

    def test_symmetry_across_categories(self):
        w = np.array([[0.7, 0.7], [0.2, 0.2]])
        log_p = np.full((2, 2), np.log(0.5))
        eta = np.array([1.3, 0.4])
        a, b = alpha_coefficients(w, log_p, eta, AlphaPrior(tau=2.0))
        assert a[0] == a[1] and b[0] == b[1]


class TestSweepAndChain:
    def test_sweep_determinism_and_invariants(self):
        counts = CountMatrix.from_array([[3, 0, 4], [1, 2, 2]])
        prior = AlphaPrior.for_categories(3)
        s1 = _toy_state(counts, prior, seed=5)
        s2 = _toy_state(counts, prior, seed=5)
        r1, r2 = make_rng(6), make_rng(6)
        for _ in range(3):
            gibbs_sweep(s1, counts, prior, FAST_PIG, r1)
            gibbs_sweep(s2, counts, prior, FAST_PIG, r2)
            s1.validate()
        assert np.array_equal(s1.alpha, s2.alpha)
        assert np.array_equal(s1.w, s2.w)
        assert np.array_equal(s1.log_p, s2.log_p)
        assert np.array_equal(s1.eta, s2.eta)

    def test_run_chain_deterministic(self):
        counts = CountMatrix.from_array([[3, 1], [2, 5]])
        prior = AlphaPrior.for_categories(2)
        cfg = ChainConfig(iterations=300, burn_in=100, thin=2, seed=21,
                          pig_config=PigSamplerConfig(trunc_terms=50))
        s1 = run_chain(counts, prior, cfg)
        s2 = run_chain(counts, prior, cfg)
        assert np.array_equal(s1.draws, s2.draws)
        assert s1.size == cfg.retained == 100
        assert np.array_equal(s1.iters, s2.iters)

    def test_homogeneous_chain_deterministic(self):
        counts = CountMatrix.from_array([[3, 1], [2, 5]])
        prior = AlphaPrior(tau=0.8)
        cfg = ChainConfig(iterations=300, burn_in=100, thin=2, seed=22,
                          pig_config=PigSamplerConfig(trunc_terms=50))
        s1 = run_chain_homogeneous(counts, prior, cfg)
        s2 = run_chain_homogeneous(counts, prior, cfg)
        assert np.array_equal(s1.draws, s2.draws)
        assert s1.names == ["alpha"]

    def test_refuses_empty_counts(self):
        empty = CountMatrix.from_array(np.zeros((0, 2), dtype=np.int64))
        with pytest.raises(ValueError):
            run_chain(empty, AlphaPrior(tau=1.0), ChainConfig(
                iterations=10, burn_in=1, thin=1))
        with pytest.raises(ValueError):
            run_chain_homogeneous(empty, AlphaPrior(tau=1.0), ChainConfig(
                iterations=10, burn_in=1, thin=1))

    def test_exchangeable_posterior_on_symmetric_data(self):
        counts = CountMatrix.from_array([[6, 6, 6], [4, 4, 4], [9, 9, 9]])
        prior = AlphaPrior.for_categories(3)
        cfg = ChainConfig(iterations=9000, burn_in=1000, thin=8, seed=31,
                          pig_config=FAST_PIG)
        samples = run_chain(counts, prior, cfg)
        means = samples.draws.mean(axis=0)
        mcses = [chain_mcse(samples.draws[:, j]) for j in range(3)]
        for i in range(3):
            for j in range(i + 1, 3):
                tol = 3.0 * float(np.hypot(mcses[i], mcses[j]))
                assert abs(means[i] - means[j]) <= tol

    def test_label_equivariance_under_permutation(self):
        counts = CountMatrix.from_array([[9, 2, 5], [1, 7, 3], [6, 6, 1]])
        prior = AlphaPrior.for_categories(3)
        cfg = ChainConfig(iterations=9000, burn_in=1000, thin=8, seed=17,
                          pig_config=FAST_PIG)
        order = [2, 0, 1]
        base = run_chain(counts, prior, cfg)
        perm = run_chain(counts.permuted_categories(order), prior, cfg)
        for new_pos, old_pos in enumerate(order):
            a = base.draws[:, old_pos]
            b = perm.draws[:, new_pos]
            tol = 3.0 * float(np.hypot(chain_mcse(a), chain_mcse(b)))
            assert abs(a.mean() - b.mean()) <= tol


class TestAgainstQuadrature:
    def test_full_chain_matches_2d_oracle(self):
        counts = CountMatrix.from_array([[8, 3], [5, 6], [11, 2], [4, 9], [7, 5]])
        prior = AlphaPrior.for_categories(2)
        grid = np.geomspace(5e-5, 12.0, 1600)
        dens = quadrature_posterior_k2(counts, prior, grid)
        mean_1 = np.trapezoid(np.trapezoid(dens * grid[:, None], grid, axis=1), grid)
        mean_2 = np.trapezoid(grid * np.trapezoid(dens, grid, axis=0), grid)
        cfg = ChainConfig(iterations=16000, burn_in=1000, thin=15, seed=3,
                          pig_config=FAST_PIG)
        samples = run_chain(counts, prior, cfg)
        for j, truth in enumerate((mean_1, mean_2)):
            err = abs(samples.draws[:, j].mean() - truth)
            assert err <= 3.0 * chain_mcse(samples.draws[:, j])

    def test_homogeneous_m1_example(self):
        counts = CountMatrix.from_array([[3, 3]])
        prior = AlphaPrior(tau=1.0)
        grid = homogeneous_posterior_grid(counts, prior)
        dens = quadrature_posterior(counts, prior, grid)
        truth, _ = grid_mean_sd(grid, dens)
        cfg = ChainConfig(iterations=11000, burn_in=1000, thin=10, seed=2,
                          pig_config=FAST_PIG)
        samples = run_chain_homogeneous(counts, prior, cfg)
        draws = samples.draws[:, 0]
        assert abs(draws.mean() - truth) <= 3.0 * chain_mcse(draws)

    def test_homogeneous_handles_zero_counts_exactly(self):
        counts = CountMatrix.from_array([[4, 0], [0, 5], [3, 2]])
        prior = AlphaPrior(tau=1.0)
        grid = homogeneous_posterior_grid(counts, prior)
        dens = quadrature_posterior(counts, prior, grid)
        truth, _ = grid_mean_sd(grid, dens)
        cfg = ChainConfig(iterations=16000, burn_in=1000, thin=15, seed=4,
                          pig_config=FAST_PIG)
        samples = run_chain_homogeneous(counts, prior, cfg)
        draws = samples.draws[:, 0]
        assert abs(draws.mean() - truth) <= 3.0 * chain_mcse(draws)

    def test_cross_sampler_consistency_through_oracles(self):
        # The shared-alpha and per-category models are different models, so
        # their posteriors need not coincide; consistency means each sampler
        # reproduces its own exact posterior, and the sampler gap matches
        # the quadrature gap.
        counts = CountMatrix.from_array([[8, 8]] * 6)
        prior = AlphaPrior(tau=1.0)

        grid = homogeneous_posterior_grid(counts, prior)
        homog_truth, _ = grid_mean_sd(grid, quadrature_posterior(
            counts, prior, grid))
        grid2 = np.geomspace(2e-4, 25.0, 1800)
        dens2 = quadrature_posterior_k2(counts, prior, grid2)
        full_truth = np.trapezoid(np.trapezoid(
            dens2 * grid2[:, None], grid2, axis=1), grid2)

        cfg = ChainConfig(iterations=13000, burn_in=1000, thin=12, seed=5,
                          pig_config=FAST_PIG)
        homog = run_chain_homogeneous(counts, prior, cfg).draws[:, 0]
        full = run_chain(counts, prior, cfg)
        full_avg = full.draws.mean(axis=1)

        assert abs(homog.mean() - homog_truth) <= 3.0 * chain_mcse(homog)
        assert abs(full_avg.mean() - full_truth) <= 3.0 * chain_mcse(full_avg)
        gap = homog.mean() - full_avg.mean()
        truth_gap = homog_truth - full_truth
        tol = 3.0 * float(np.hypot(chain_mcse(homog), chain_mcse(full_avg)))
        assert abs(gap - truth_gap) <= tol


class TestQuadrature:
    def test_normalization(self):
        counts = CountMatrix.from_array([[5, 1], [2, 2]])
        prior = AlphaPrior(tau=1.0)
        grid = homogeneous_posterior_grid(counts, prior)
        dens = quadrature_posterior(counts, prior, grid)
        assert np.trapezoid(dens, grid) == pytest.approx(1.0, abs=1e-8)

    def test_flat_likelihood_returns_prior(self):
        empty = CountMatrix.from_array(np.zeros((0, 2), dtype=np.int64))
        prior = AlphaPrior(tau=0.8)
        grid = homogeneous_posterior_grid(empty, prior)
        dens = quadrature_posterior(empty, prior, grid)
        mean, _ = grid_mean_sd(grid, dens)
        assert mean == pytest.approx(np.sqrt(2 / np.pi) * 0.8, rel=1e-4)

    def test_mode_matches_golden_section(self):
        counts = CountMatrix.from_array([[3, 3]])
        prior = AlphaPrior(tau=1.0)
        grid = homogeneous_posterior_grid(counts, prior)
        dens = quadrature_posterior(counts, prior, grid)
        i = int(np.argmax(dens))

        def neg_log_post(a):
            return -(marginal_log_likelihood([3, 3], np.array([a, a]))
                     - 0.5 * a * a)

        res = minimize_scalar(neg_log_post, bracket=(0.2, 1.0, 5.0),
                              method="golden")
        step = grid[min(i + 1, grid.size - 1)] - grid[max(i - 1, 0)]
        assert abs(grid[i] - res.x) <= step

    def test_coarse_grid_refused(self):
        counts = CountMatrix.from_array([[40, 2], [3, 50]])
        prior = AlphaPrior(tau=1.0)
        with pytest.raises(ValueError, match="too coarse"):
            quadrature_posterior(counts, prior, np.linspace(0.01, 30.0, 30))

    def test_heavy_endpoint_refused(self):
        counts = CountMatrix.from_array([[3, 3]])
        prior = AlphaPrior(tau=1.0)
        with pytest.raises(ValueError, match="endpoint"):
            quadrature_posterior(counts, prior, np.geomspace(0.01, 1.2, 4000))

    def test_grid_validation(self):
        counts = CountMatrix.from_array([[3, 3]])
        prior = AlphaPrior(tau=1.0)
        with pytest.raises(ValueError):
            quadrature_posterior(counts, prior, np.array([-1.0, 0.5, 1.0]))
        with pytest.raises(ValueError):
            quadrature_posterior(counts, prior, np.array([0.5, 0.5, 1.0]))

    def test_cdf_monotone(self):
        counts = CountMatrix.from_array([[3, 3]])
        prior = AlphaPrior(tau=1.0)
        grid = homogeneous_posterior_grid(counts, prior)
        cdf = grid_cdf(grid, quadrature_posterior(counts, prior, grid))
        assert cdf[0] == 0.0 and cdf[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(cdf) >= 0.0)


class TestPosteriorPredictive:
    def _samples(self, draws):
        draws = np.asarray(draws, dtype=float)
        return PosteriorSamples(draws, [f"alpha_{j+1}" for j in
                                        range(draws.shape[1])],
                                np.arange(1, draws.shape[0] + 1), meta={})

    def test_rows_are_simplex(self):
        samples = self._samples(make_rng(1).uniform(0.2, 3.0, size=(50, 4)))
        sims = posterior_predictive(samples, 3, make_rng(2))
        assert sims.shape == (150, 4)
        assert np.max(np.abs(sims.sum(axis=1) - 1.0)) <= 1e-10

    def test_unit_concentration_gives_uniform_means(self):
        samples = self._samples(np.ones((400, 3)))
        sims = posterior_predictive(samples, 50, make_rng(3))
        se = sims[:, 0].std(ddof=1) / np.sqrt(sims.shape[0])
        assert abs(sims[:, 0].mean() - 1 / 3) <= 4 * se

    def test_count_contract(self):
        samples = self._samples(np.ones((7, 2)) * 1.5)
        assert posterior_predictive(samples, 9, make_rng(4)).shape == (63, 2)

    def test_refuses_empty(self):
        with pytest.raises(ValueError):
            posterior_predictive(self._samples(np.ones((1, 2))), 0, make_rng(0))


class TestStateValidation:
    def test_bad_state_raises(self):
        state = DirichletChainState(
            alpha=np.array([1.0, -0.5]),
            log_p=np.log(np.array([[0.5, 0.5]])),
            w=np.array([[1.0, 1.0]]),
            eta=np.array([1.0]))
        with pytest.raises(ValueError):
            state.validate()

    def test_simplex_violation_detected(self):
        state = DirichletChainState(
            alpha=np.array([1.0, 0.5]),
            log_p=np.log(np.array([[0.6, 0.6]])),
            w=np.array([[1.0, 1.0]]),
            eta=np.array([1.0]))
        with pytest.raises(ValueError):
            state.validate()

import numpy as np
import pytest

from hullspace.config import LATENT_DIM, SurrogateConfig
from hullspace.surrogate import (
    ConditioningError,
    GPRModel,
    HoldoutReport,
    Hyperparameters,
    fit,
    load_model,
    save_model,
    train_surrogate_pipeline,
)


def dense_gp_oracle(train_x, train_y, test_x, length_scales, signal_std, noise_std):
    """Straight textbook GP posterior via a dense solve; no Cholesky, no caching."""
    train_x = np.atleast_2d(train_x)
    test_x = np.atleast_2d(test_x)
    mean_y = np.mean(train_y)
    std_y = np.std(train_y) if np.std(train_y) > 0 else 1.0
    y = (np.asarray(train_y) - mean_y) / std_y

    def k(a, b):
        sq = np.sum(((a[:, None, :] - b[None, :, :]) / length_scales) ** 2, axis=-1)
        return signal_std**2 * np.exp(-0.5 * sq)

    gram = k(train_x, train_x) + noise_std**2 * np.eye(len(y))
    k_star = k(test_x, train_x)
    solve = np.linalg.solve(gram, y)
    mean = k_star @ solve * std_y + mean_y
    var = signal_std**2 - np.sum(k_star * np.linalg.solve(gram, k_star.T).T, axis=1)
    return mean, np.maximum(var, 0.0) * std_y**2


def toy_inputs(n, d=LATENT_DIM, seed=0):
    return np.random.default_rng(seed).uniform(size=(n, d))


HYPER = Hyperparameters(np.full(LATENT_DIM, 0.8), 1.0, 1e-4)


class TestFitAndPredict:
    def test_two_point_interpolation(self):
        x = toy_inputs(2)
        y = np.array([1.0, 3.0])
        model = fit(x, y, hyper=Hyperparameters(np.full(LATENT_DIM, 1.0), 1.0, 1e-8))
        for xi, yi in zip(x, y):
            assert model.predict(xi).mean == pytest.approx(yi, abs=1e-6)

    def test_constant_targets(self):
        x = toy_inputs(20)
        model = fit(x, np.full(20, 2.5), config=SurrogateConfig(hyper_subset=20))
        probe = toy_inputs(5, seed=9)
        means, _ = model.predict_batch(probe)
        assert np.allclose(means, 2.5, atol=1e-6)

    def test_dense_solve_oracle_agreement(self):
        # five 1-D-style points embedded in the latent space
        x = np.zeros((5, LATENT_DIM))
        x[:, 0] = [0.0, 0.2, 0.45, 0.7, 1.0]
        y = np.array([0.5, 0.1, -0.3, 0.4, 0.9])
        model = fit(x, y, hyper=HYPER)
        probe = np.zeros((4, LATENT_DIM))
        probe[:, 0] = [0.1, 0.33, 0.6, 0.95]
        mean, var = model.predict_batch(probe)
        oracle_mean, oracle_var = dense_gp_oracle(
            x, y, probe, HYPER.length_scales, HYPER.signal_std, HYPER.noise_std)
        assert np.allclose(mean, oracle_mean, atol=1e-9)
        assert np.allclose(var, oracle_var, atol=1e-9)

    def test_training_point_mean_recovered(self):
        x = toy_inputs(30, seed=3)
        y = np.sin(3 * x[:, 0]) + x[:, 1]
        model = fit(x, y, hyper=Hyperparameters(np.full(LATENT_DIM, 0.7), 1.0, 1e-8))
        means, _ = model.predict_batch(x)
        assert np.allclose(means, y, atol=1e-6)

    def test_far_field_reverts_to_prior(self):
        x = 0.01 * toy_inputs(10, seed=4)
        y = 2.0 + np.random.default_rng(4).normal(size=10)
        hyper = Hyperparameters(np.full(LATENT_DIM, 0.05), 1.0, 1e-4)
        model = fit(x, y, hyper=hyper)
        far = np.full((1, LATENT_DIM), 0.9)  # hundreds of length scales away
        mean, var = model.predict_batch(far)
        assert mean[0] == pytest.approx(model.target_mean, rel=1e-3)
        assert var[0] == pytest.approx(hyper.signal_std**2 * model.target_scale**2,
                                       rel=1e-3)

    def test_batch_equals_loop(self):
        x = toy_inputs(40, seed=5)
        y = x @ np.linspace(0.1, 1, LATENT_DIM)
        model = fit(x, y, hyper=HYPER)
        probe = toy_inputs(100, seed=6)
        batch_mean, batch_var = model.predict_batch(probe)
        for i in range(100):
            single = model.predict(probe[i])
            # BLAS blocking differs between 1-column and 100-column solves
            assert single.mean == pytest.approx(batch_mean[i], rel=1e-12)
            assert single.variance == pytest.approx(batch_var[i], rel=1e-12, abs=1e-14)

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            fit(toy_inputs(1), np.array([1.0]))

    def test_duplicate_inputs_zero_noise_conditioning_error(self):
        x = np.vstack([toy_inputs(3, seed=7)] * 4)
        y = np.arange(12.0)
        with pytest.raises(ConditioningError, match="distance"):
            GPRModel(x, y, Hyperparameters(np.full(LATENT_DIM, 1.0), 1.0, 0.0),
                     jitter_ladder=())


class TestPosteriorProperties:
    def test_variance_at_training_inputs_bounded_by_noise(self):
        x = toy_inputs(25, seed=8)
        y = np.cos(4 * x[:, 2])
        hyper = Hyperparameters(np.full(LATENT_DIM, 0.6), 1.0, 0.05)
        model = fit(x, y, hyper=hyper)
        _, var = model.predict_batch(x)
        bound = hyper.noise_std**2 * model.target_scale**2
        assert np.all(var <= bound + 1e-10)

    def test_permutation_invariance(self):
        x = toy_inputs(30, seed=10)
        y = x[:, 0] ** 2 + 0.3 * x[:, 5]
        perm = np.random.default_rng(11).permutation(30)
        a = fit(x, y, hyper=HYPER)
        b = fit(x[perm], y[perm], hyper=HYPER)
        probe = toy_inputs(20, seed=12)
        ma, va = a.predict_batch(probe)
        mb, vb = b.predict_batch(probe)
        assert np.allclose(ma, mb, atol=1e-9)
        assert np.allclose(va, vb, atol=1e-9)

    def test_adding_data_never_raises_variance(self):
        x = toy_inputs(20, seed=13)
        y = np.sin(x[:, 0] * 5)
        extra_x = toy_inputs(5, seed=14)
        extra_y = np.sin(extra_x[:, 0] * 5)
        small = fit(x, y, hyper=HYPER)
        big = fit(np.vstack([x, extra_x]), np.concatenate([y, extra_y]), hyper=HYPER)
        probe = toy_inputs(50, seed=15)
        _, var_small = small.predict_batch(probe)
        _, var_big = big.predict_batch(probe)
        # compare in standardized units: scaling differs between the fits
        assert np.all(var_big / big.target_scale**2
                      <= var_small / small.target_scale**2 + 1e-8)


class TestPipeline:
    def test_smoke_and_report(self):
        model, report = train_surrogate_pipeline(50, seed=1)
        assert isinstance(report, HoldoutReport)
        assert report.n_train + report.n_holdout <= 50
        assert report.rmse >= 0.0
        header, row = report.to_csv().splitlines()
        assert header == "n_train,n_holdout,rmse,r2"

    def test_deterministic_given_seed(self):
        _, a = train_surrogate_pipeline(120, seed=2)
        _, b = train_surrogate_pipeline(120, seed=2)
        assert a.rmse == b.rmse
        assert a.r2 == b.r2

    def test_learning_curve_improves(self):
        # median over seeds: more data should not hurt holdout accuracy
        small = np.median([train_surrogate_pipeline(100, seed=s)[1].rmse
                           for s in range(5)])
        large = np.median([train_surrogate_pipeline(400, seed=s)[1].rmse
                           for s in range(5)])
        assert large <= small

    def test_minimum_sample_count(self):
        with pytest.raises(ValueError):
            train_surrogate_pipeline(10, seed=1)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        x = toy_inputs(25, seed=16)
        y = x[:, 3] * 2 - 1
        model = fit(x, y, hyper=HYPER)
        path = tmp_path / "model.npz"
        save_model(model, path)
        loaded = load_model(path)
        probe = toy_inputs(10, seed=17)
        m1, v1 = model.predict_batch(probe)
        m2, v2 = loaded.predict_batch(probe)
        assert np.array_equal(m1, m2)
        assert np.array_equal(v1, v2)

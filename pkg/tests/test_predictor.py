import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latentwatch import predictor, seqio
from latentwatch.predictor import GRUParams, PredictorConfig

from oracles import finite_difference_grad, grad_rel_error, gru_forward_stepwise


def small_config(**kw):
    defaults = dict(latent_dim=6, input_dim=6, hidden_dim=8, num_layers=2,
                    lookback=5, lam=0.5, learning_rate=0.001, seed=0)
    defaults.update(kw)
    return PredictorConfig(**defaults)


def random_instance(seed, cfg=None):
    cfg = cfg or small_config(seed=seed)
    rng = np.random.default_rng(seed + 1000)
    params = GRUParams.init(cfg)
    ctx = rng.normal(size=(cfg.lookback, cfg.input_dim))
    z_t = rng.normal(size=cfg.latent_dim)
    z_prev = ctx[-1, :cfg.latent_dim].copy()
    return cfg, params, ctx, z_t, z_prev


class TestPredict:
    def test_zero_params_residual_identity(self):
        cfg = small_config()
        params = GRUParams.zeros(cfg)
        rng = np.random.default_rng(3)
        ctx = rng.normal(size=(cfg.lookback, cfg.input_dim))
        z_prev = rng.normal(size=cfg.latent_dim)
        assert np.array_equal(predictor.predict(params, ctx, z_prev), z_prev)

    def test_deterministic(self):
        _, params, ctx, _, z_prev = random_instance(7)
        a = predictor.predict(params, ctx, z_prev)
        b = predictor.predict(params, ctx, z_prev)
        assert np.array_equal(a, b)

    def test_matches_stepwise_oracle(self):
        for seed in range(5):
            _, params, ctx, _, z_prev = random_instance(seed)
            got = predictor.predict(params, ctx, z_prev)
            want = gru_forward_stepwise(params, ctx, z_prev)
            assert np.max(np.abs(got - want)) < 1e-10

    def test_dim_mismatch_rejected(self):
        cfg, params, ctx, _, z_prev = random_instance(1)
        with pytest.raises(ValueError):
            predictor.predict(params, ctx[:, :-1], z_prev)
        with pytest.raises(ValueError):
            predictor.predict(params, ctx[:-1], z_prev)


class TestSurprise:
    def test_perfect_prediction(self):
        z = np.array([1.0, 2.0, 3.0])
        assert predictor.surprise(z, z, 0.5) == 0.0

    def test_orthonormal_vectors(self):
        z = np.array([1.0, 0.0])
        z_hat = np.array([0.0, 1.0])
        assert predictor.surprise(z, z_hat, 0.5) == pytest.approx(2.5, abs=1e-12)

    def test_scaled_prediction(self):
        z = np.array([0.0, 1.0, 0.0])
        assert predictor.surprise(z, 2 * z, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vector_convention(self):
        z = np.zeros(3)
        z_hat = np.array([1.0, 0.0, 0.0])
        # zero norm: no directional penalty, only the squared error remains
        assert predictor.surprise(z, z_hat, 0.5) == pytest.approx(1.0)

    @given(st.integers(0, 10_000), st.floats(0.0, 2.0))
    @settings(max_examples=100, deadline=None)
    def test_non_negative(self, seed, lam):
        rng = np.random.default_rng(seed)
        z = rng.normal(size=4) * rng.choice([0.0, 1.0, 10.0])
        z_hat = rng.normal(size=4)
        assert predictor.surprise(z, z_hat, lam) >= 0.0


class TestGradients:
    def test_matches_finite_differences(self):
        cfg, params, ctx, z_t, z_prev = random_instance(11)
        _, grads = predictor.loss_and_grad(params, ctx, z_t, z_prev)
        analytic = grads.flatten()

        def loss_of(flat):
            p = params.copy()
            p.load_flat(flat)
            l, _ = predictor.loss_and_grad(p, ctx, z_t, z_prev)
            return l

        numeric = finite_difference_grad(loss_of, params.flatten())
        assert grad_rel_error(analytic, numeric) < 1e-4


class TestOnlineStep:
    def test_zero_eta_is_noop(self):
        cfg, params, ctx, z_t, z_prev = random_instance(13)
        before = params.flatten().copy()
        rec = predictor.online_step(params, ctx, z_t, z_prev, eta=0.0)
        assert np.array_equal(params.flatten(), before)
        assert not rec.update_applied
        plain = predictor.surprise(z_t, predictor.predict(params, ctx, z_prev),
                                   cfg.lam)
        assert rec.surprise == plain

    def test_descent_on_fixed_sample(self):
        cfg, params, ctx, z_t, z_prev = random_instance(17)
        scores = [predictor.online_step(params, ctx, z_t, z_prev, eta=1e-3).surprise
                  for _ in range(50)]
        assert all(b <= a + 1e-12 for a, b in zip(scores, scores[1:]))

    def test_score_uses_pre_update_params(self):
        cfg, params, ctx, z_t, z_prev = random_instance(19)
        snapshot = params.copy()
        rec = predictor.online_step(params, ctx, z_t, z_prev, eta=0.05)
        pre = predictor.surprise(z_t, predictor.predict(snapshot, ctx, z_prev),
                                 cfg.lam)
        assert rec.surprise == pre
        assert rec.update_applied
        assert not np.array_equal(params.flatten(), snapshot.flatten())


def linear_world(seed=0, t=220, d=4, fps=30.0):
    """Latents follow z_t = z_{t-1} + A m_{t-1}: learnable from motion input."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, 2))
    m = 0.02 * np.sin(np.linspace(0, 8 * np.pi, t))[:, None] * np.ones((t, 2))
    z = np.zeros((t, d))
    for i in range(1, t):
        z[i] = z[i - 1] + a @ m[i - 1]
    return seqio.LatentSequence(fps, z, m)


class TestPretrain:
    def test_epoch_surprise_decreases_on_learnable_world(self):
        seq = linear_world()
        cfg = PredictorConfig.compensated(4, hidden_dim=8, num_layers=1,
                                          lookback=5, learning_rate=0.01, seed=2)
        params = GRUParams.init(cfg)
        means = []
        for _ in range(3):
            trace, _ = predictor.score_sequence(params, seq)
            means.append(np.nanmean(trace))
        assert means[1] < means[0] and means[2] < means[1]

    def test_zero_epochs_is_noop(self):
        seq = linear_world()
        cfg = PredictorConfig.compensated(4, hidden_dim=8, lookback=5, seed=3)
        params = GRUParams.init(cfg)
        before = params.flatten().copy()
        predictor.pretrain(params, seq, epochs=0)
        assert np.array_equal(params.flatten(), before)

    def test_deterministic_given_seed(self):
        seq = linear_world()
        cfg = PredictorConfig.compensated(4, hidden_dim=8, lookback=5, seed=4)
        p1 = predictor.pretrain(GRUParams.init(cfg), seq, epochs=1)
        p2 = predictor.pretrain(GRUParams.init(cfg), seq, epochs=1)
        assert np.array_equal(p1.flatten(), p2.flatten())

    def test_too_short_rejected(self):
        seq = linear_world(t=6)
        cfg = PredictorConfig.compensated(4, hidden_dim=8, lookback=5, seed=4)
        with pytest.raises(ValueError):
            predictor.pretrain(GRUParams.init(cfg), seq, epochs=1)


class TestCausality:
    def test_scores_ignore_future_frames(self):
        seq = linear_world(seed=5)
        cfg = PredictorConfig.compensated(4, hidden_dim=8, lookback=5, seed=5)
        trace, _ = predictor.score_sequence(GRUParams.init(cfg), seq)
        t_check = 100
        mutated = seqio.LatentSequence(
            seq.fps,
            np.concatenate([seq.values[:t_check + 1],
                            seq.values[t_check + 1:] + 100.0]),
            seq.motion)
        trace2, _ = predictor.score_sequence(GRUParams.init(cfg), mutated)
        assert np.array_equal(trace[:t_check + 1], trace2[:t_check + 1],
                              equal_nan=True)


class TestVariants:
    def test_compensated_requires_motion(self):
        seq = linear_world()
        bare = seqio.LatentSequence(seq.fps, seq.values, None)
        cfg = PredictorConfig.compensated(4, hidden_dim=8, lookback=5, seed=6)
        with pytest.raises(ValueError, match="motion"):
            predictor.score_sequence(GRUParams.init(cfg), bare)

    def test_naive_runs_without_motion(self):
        seq = linear_world()
        bare = seqio.LatentSequence(seq.fps, seq.values, None)
        cfg = PredictorConfig.naive(4, hidden_dim=8, lookback=5, seed=6)
        trace, _ = predictor.score_sequence(GRUParams.init(cfg), bare)
        assert np.all(np.isnan(trace[:5])) and np.all(np.isfinite(trace[5:]))

    def test_input_dim_validation(self):
        with pytest.raises(ValueError):
            PredictorConfig(latent_dim=4, input_dim=5)


class TestCheckpoint:
    def test_roundtrip(self, tmp_path):
        _, params, _, _, _ = random_instance(23)
        path = tmp_path / "pred.ckpt"
        predictor.save_checkpoint(params, path)
        back = predictor.load_checkpoint(path)
        assert back.config == params.config
        assert np.array_equal(back.flatten(), params.flatten())

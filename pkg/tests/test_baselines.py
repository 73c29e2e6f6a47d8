import numpy as np
import pytest

from latentwatch import baselines, predictor, seqio
from latentwatch.predictor import GRUParams, PredictorConfig


class TestDirectDiff:
    def test_static_scene_scores_zero(self):
        z = np.array([1.0, -2.0, 0.5])
        assert baselines.direct_diff_score(z, z, 0.5) == 0.0

    def test_orthonormal_consecutive_latents(self):
        z_prev = np.array([1.0, 0.0])
        z_t = np.array([0.0, 1.0])
        assert baselines.direct_diff_score(z_t, z_prev, 0.5) == pytest.approx(2.5)

    def test_equals_zero_parameter_predictor(self):
        rng = np.random.default_rng(8)
        values = rng.normal(size=(60, 5))
        seq = seqio.LatentSequence(30.0, values)
        cfg = PredictorConfig.naive(5, hidden_dim=4, num_layers=1, lookback=10)
        params = GRUParams.zeros(cfg)
        trace, _ = predictor.score_sequence(params, seq, adapt=False)
        diff = baselines.direct_diff_trace(seq, cfg.lam)
        valid = slice(cfg.lookback, None)
        assert np.allclose(trace[valid], diff[valid], atol=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            baselines.direct_diff_score(np.ones(3), np.ones(4), 0.5)


class TestUniformSchedule:
    def test_sixty_second_stream(self):
        out = baselines.uniform_schedule(60.0, 12.0, 30.0)
        assert [ev.time_s for ev in out] == [12.0, 24.0, 36.0, 48.0, 60.0]
        assert [ev.frame_index for ev in out] == [360, 720, 1080, 1440, 1800]
        assert all(ev.source == "uniform" for ev in out)

    def test_interval_longer_than_stream(self):
        assert baselines.uniform_schedule(10.0, 12.0, 30.0) == []

    def test_exact_spacing(self):
        out = baselines.uniform_schedule(100.0, 7.5, 25.0)
        gaps = np.diff([ev.time_s for ev in out])
        assert np.allclose(gaps, 7.5)

    def test_long_mission_count(self):
        # 178.2 minutes at dt=12 s
        out = baselines.uniform_schedule(178.2 * 60.0, 12.0, 30.0)
        assert len(out) == 891

    def test_rejects_bad_interval(self):
        with pytest.raises(ValueError):
            baselines.uniform_schedule(60.0, 0.0, 30.0)

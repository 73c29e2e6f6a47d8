import math

import numpy as np
import pytest

from latentwatch import extractor
from latentwatch.extractor import ExtractorConfig, detect_triggers, smooth_causal

from oracles import extract_triggers_offline


def config(**kw):
    defaults = dict(fps=30.0, sigma=2.0, window_s=10.0, alpha=2.5,
                    tau_min=0.005, warmup=200, refractory_s=0.5)
    defaults.update(kw)
    return ExtractorConfig(**defaults)


def spike_trace(seed=3, n=800, spike_at=400, height=0.2):
    rng = np.random.default_rng(seed)
    trace = 0.01 + 0.001 * rng.normal(size=n)
    trace[spike_at] += height
    return np.abs(trace)


class TestSmoothing:
    def test_constant_trace(self):
        out = smooth_causal(np.full(50, 3.25), sigma=2.0)
        assert np.allclose(out, 3.25, atol=1e-12)

    def test_boundary_first_sample(self):
        raw = np.array([7.0, 1.0, 1.0])
        out = smooth_causal(raw, sigma=2.0)
        assert out[0] == 7.0

    def test_impulse_matches_hand_kernel(self):
        assert extractor.kernel_radius(2.0) == 6
        n = 30
        raw = np.zeros(n)
        raw[10] = 1.0
        out = smooth_causal(raw, sigma=2.0)
        weights = [math.exp(-(k * k) / 8.0) for k in range(7)]
        for t in range(10, 17):
            k = t - 10
            expected = weights[k] / sum(weights)  # t >= radius: full kernel
            assert abs(out[t] - expected) < 1e-12

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            smooth_causal(np.ones(5), sigma=0.0)


class TestAdaptiveThreshold:
    def test_constant_trace_zero_variance(self):
        cfg = config(warmup=5, tau_min=0.005)
        smoothed = np.full(40, 0.3)
        assert extractor.adaptive_threshold(smoothed, 20, cfg) == pytest.approx(0.3)
        # floor applies when the trace sits below tau_min
        low = np.full(40, 0.001)
        assert extractor.adaptive_threshold(low, 20, cfg) == pytest.approx(0.005)

    def test_alpha_zero_is_mean_only(self):
        cfg = config(warmup=5, alpha=0.0, tau_min=0.0)
        rng = np.random.default_rng(1)
        smoothed = rng.uniform(1, 2, size=60)
        t = 40
        lo = max(6, t - cfg.window_samples)
        assert extractor.adaptive_threshold(smoothed, t, cfg) == pytest.approx(
            smoothed[lo:t + 1].mean())

    def test_hand_statistics_five_samples(self):
        # window of exactly (1,2,3,4,5): mu=3, population std=sqrt(2)
        cfg = config(fps=1.0, window_s=4.0, alpha=1.0, warmup=0, tau_min=0.0)
        smoothed = np.array([99.0, 1.0, 2.0, 3.0, 4.0, 5.0])
        tau = extractor.adaptive_threshold(smoothed, 5, cfg)
        assert tau == pytest.approx(3.0 + math.sqrt(2.0), abs=1e-12)

    def test_warmup_rejected(self):
        cfg = config(warmup=10)
        with pytest.raises(ValueError):
            extractor.adaptive_threshold(np.ones(40), 10, cfg)


class TestDetectTriggers:
    def test_monotone_trace_has_no_triggers(self):
        cfg = config(warmup=10, tau_min=0.0)
        trace = np.linspace(0.0, 1.0, 200)
        assert detect_triggers(trace, cfg) == []

    def test_refractory_keeps_first_of_close_pair(self):
        cfg = config(warmup=10, sigma=0.5, refractory_s=0.5)
        n = 200
        trace = np.full(n, 0.01)
        trace[100] = 1.0
        trace[106] = 0.9  # 0.2 s later at 30 fps
        out = detect_triggers(trace, cfg)
        assert len(out) == 1
        assert abs(out[0].frame_index - 100) <= extractor.kernel_radius(0.5)

    def test_far_pair_keeps_both(self):
        cfg = config(warmup=10, sigma=0.5, refractory_s=0.5)
        trace = np.full(400, 0.01)
        trace[100] = 1.0
        trace[200] = 0.9
        out = detect_triggers(trace, cfg)
        assert len(out) == 2
        assert out[1].time_s - out[0].time_s >= 0.5

    def test_single_spike_fixture_matches_bruteforce(self):
        cfg = config()
        trace = spike_trace()
        out = detect_triggers(trace, cfg)
        assert len(out) == 1
        assert abs(out[0].frame_index - 400) <= extractor.kernel_radius(cfg.sigma)
        assert [ev.frame_index for ev in out] == extract_triggers_offline(trace, cfg)

    def test_plateau_triggers_at_first_sample(self):
        cfg = config(warmup=10, sigma=0.5, tau_min=0.0)
        trace = np.full(200, 0.01)
        trace[100:104] = 1.0
        out = detect_triggers(trace, cfg)
        oracle = extract_triggers_offline(trace, cfg)
        assert [ev.frame_index for ev in out] == oracle
        assert len(out) == 1

    def test_trigger_fields(self):
        cfg = config()
        out = detect_triggers(spike_trace(), cfg, source="direct_diff")
        ev = out[0]
        assert ev.source == "direct_diff"
        assert ev.time_s == ev.frame_index / cfg.fps
        assert ev.score > ev.threshold > cfg.tau_min

    def test_short_trace_rejected(self):
        with pytest.raises(ValueError):
            detect_triggers(np.ones(100), config(warmup=200))


class TestStreamingEqualsOffline:
    @pytest.mark.parametrize("seed", range(12))
    def test_fuzzed_traces(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(300, 800))
        warmup = int(rng.integers(20, 120))
        trace = np.abs(rng.normal(0.02, 0.01, size=n))
        for _ in range(rng.integers(1, 6)):
            trace[rng.integers(warmup, n)] += rng.uniform(0.1, 1.0)
        cfg = config(warmup=warmup,
                     sigma=float(rng.uniform(0.5, 4.0)),
                     window_s=float(rng.uniform(2.0, 15.0)),
                     alpha=float(rng.uniform(0.5, 4.0)),
                     refractory_s=float(rng.uniform(0.0, 1.0)))
        got = [ev.frame_index for ev in detect_triggers(trace, cfg)]
        assert got == extract_triggers_offline(trace, cfg)


class TestCausality:
    def test_future_mutation_cannot_change_decided_triggers(self):
        cfg = config()
        trace = spike_trace(seed=3)
        base = detect_triggers(trace, cfg)
        t_cut = 500
        mutated = trace.copy()
        mutated[t_cut + 2:] += 10.0
        # triggers at frames <= t_cut are decided by frame t_cut+1
        changed = detect_triggers(mutated, cfg)
        base_frames = [ev.frame_index for ev in base if ev.frame_index <= t_cut]
        changed_frames = [ev.frame_index for ev in changed
                          if ev.frame_index <= t_cut]
        assert base_frames == changed_frames

    def test_smoothed_and_tau_ignore_future(self):
        cfg = config()
        trace = spike_trace(seed=4)
        sm = smooth_causal(trace, cfg.sigma)
        tau = extractor.threshold_series(sm, cfg)
        mutated = trace.copy()
        mutated[601:] = 50.0
        sm2 = smooth_causal(mutated, cfg.sigma)
        tau2 = extractor.threshold_series(sm2, cfg)
        assert np.array_equal(sm[:601], sm2[:601])
        assert np.array_equal(tau[:601], tau2[:601], equal_nan=True)


class TestLogsAndDumps:
    def test_trigger_log_roundtrip(self, tmp_path):
        cfg = config()
        out = detect_triggers(spike_trace(), cfg)
        path = tmp_path / "triggers.log"
        extractor.write_trigger_log(out, path)
        back = extractor.read_trigger_log(path)
        assert len(back) == len(out)
        assert back[0].frame_index == out[0].frame_index
        assert back[0].score == pytest.approx(out[0].score)

    def test_trace_csv_columns(self, tmp_path):
        cfg = config()
        path = tmp_path / "trace.csv"
        extractor.write_trace_csv(spike_trace(), cfg, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,raw,smoothed,tau"
        assert len(lines) == 801


class TestConfigDefaults:
    def test_operating_point(self):
        cfg = ExtractorConfig(fps=30.0)
        assert (cfg.sigma, cfg.window_s, cfg.alpha, cfg.tau_min,
                cfg.warmup, cfg.refractory_s) == (2.0, 10.0, 2.5, 0.005, 200, 0.5)

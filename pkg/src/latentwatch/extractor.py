"""Causal trigger extraction from a raw surprise trace.

Pipeline: one-sided Gaussian smoothing, adaptive threshold over a trailing
window, causal local-maximum test with one frame of lookahead, then greedy
left-to-right refractory filtering. The streaming detector decides frame t
when frame t+1 arrives.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

__all__ = [
    "ExtractorConfig", "TriggerEvent", "StreamingDetector",
    "smooth_causal", "kernel_radius", "adaptive_threshold",
    "threshold_series", "detect_triggers", "write_trigger_log",
    "read_trigger_log", "write_trace_csv",
]


@dataclass(frozen=True)
class ExtractorConfig:
    """Extraction policy; defaults are the standard operating point."""

    fps: float
    sigma: float = 2.0
    window_s: float = 10.0
    alpha: float = 2.5
    tau_min: float = 0.005
    warmup: int = 200
    refractory_s: float = 0.5

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.window_s <= 0:
            raise ValueError("window_s must be positive")
        if self.tau_min < 0 or self.warmup < 0 or self.refractory_s < 0:
            raise ValueError("tau_min, warmup, refractory_s must be non-negative")

    @property
    def window_samples(self) -> int:
        return int(round(self.window_s * self.fps))

    def with_alpha(self, alpha: float) -> "ExtractorConfig":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class TriggerEvent:
    """An accepted trigger: the smoothed score exceeded the threshold at a peak."""

    frame_index: int
    time_s: float
    score: float
    threshold: float
    source: str = "compensated"


def kernel_radius(sigma: float) -> int:
    return max(1, int(round(3.0 * sigma)))


def _kernel(sigma: float) -> np.ndarray:
    k = np.arange(kernel_radius(sigma) + 1, dtype=np.float64)
    return np.exp(-(k * k) / (2.0 * sigma * sigma))


def smooth_causal(raw: np.ndarray, sigma: float) -> np.ndarray:
    """One-sided Gaussian smoothing using only current and past samples."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    raw = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(raw)):
        raise ValueError("trace contains non-finite values")
    w = _kernel(sigma)
    num = np.convolve(raw, w)[:raw.size]
    den = np.convolve(np.ones_like(raw), w)[:raw.size]
    return num / den


def adaptive_threshold(smoothed: np.ndarray, t: int, cfg: ExtractorConfig) -> float:
    """Threshold at frame t from trailing statistics; undefined inside warmup."""
    if t <= cfg.warmup:
        raise ValueError(f"threshold undefined at t={t} <= warmup={cfg.warmup}")
    lo = max(cfg.warmup + 1, t - cfg.window_samples)
    window = np.asarray(smoothed[lo:t + 1], dtype=np.float64)
    mu = window.mean()
    s = window.std()  # population convention
    return max(mu + cfg.alpha * s, cfg.tau_min)


def threshold_series(smoothed: np.ndarray, cfg: ExtractorConfig) -> np.ndarray:
    """tau_t for every frame; NaN for t <= warmup."""
    out = np.full(len(smoothed), np.nan)
    for t in range(cfg.warmup + 1, len(smoothed)):
        out[t] = adaptive_threshold(smoothed, t, cfg)
    return out


class StreamingDetector:
    """Single-pass detector with exactly one frame of decision latency.

    Call ``feed`` per raw sample; it returns the trigger decided at the
    previous frame, if any. Threshold statistics are kept as running sums
    over the trailing window, so each feed is O(1) amortized.
    """

    def __init__(self, cfg: ExtractorConfig, source: str = "compensated"):
        self.cfg = cfg
        self.source = source
        self._weights = _kernel(cfg.sigma)
        self._raw = deque(maxlen=self._weights.size)
        self._t = -1
        # last three smoothed values: t-2, t-1, t
        self._sm = deque(maxlen=3)
        self._tau_prev: Optional[float] = None
        self._window = deque()
        self._win_sum = 0.0
        self._win_sumsq = 0.0
        self._last_accept_t: Optional[int] = None

    def _smoothed(self) -> float:
        n = len(self._raw)
        w = self._weights[:n]
        # raw deque is oldest-first; weight 0 belongs to the newest sample
        acc = 0.0
        for wk, s in zip(w, reversed(self._raw)):
            acc += wk * s
        return acc / w.sum()

    def _push_window(self, value: float) -> None:
        cfg = self.cfg
        self._window.append(value)
        self._win_sum += value
        self._win_sumsq += value * value
        # window covers max(warmup+1, t - W_samp) .. t  ->  at most W_samp+1 entries
        while len(self._window) > cfg.window_samples + 1:
            old = self._window.popleft()
            self._win_sum -= old
            self._win_sumsq -= old * old

    def _tau(self) -> float:
        n = len(self._window)
        mu = self._win_sum / n
        var = max(self._win_sumsq / n - mu * mu, 0.0)
        return max(mu + self.cfg.alpha * np.sqrt(var), self.cfg.tau_min)

    def feed(self, raw_value: float) -> Optional[TriggerEvent]:
        if not np.isfinite(raw_value):
            raise ValueError("non-finite raw sample")
        cfg = self.cfg
        self._t += 1
        t = self._t
        self._raw.append(float(raw_value))
        self._sm.append(self._smoothed())

        trigger = None
        if len(self._sm) == 3 and self._tau_prev is not None:
            s_prev2, s_prev, s_now = self._sm
            cand = t - 1
            if (cand > cfg.warmup and s_prev2 < s_prev >= s_now
                    and s_prev > self._tau_prev):
                if (self._last_accept_t is None
                        or (cand - self._last_accept_t) / cfg.fps >= cfg.refractory_s):
                    self._last_accept_t = cand
                    trigger = TriggerEvent(cand, cand / cfg.fps, s_prev,
                                           self._tau_prev, self.source)

        if t > cfg.warmup:
            self._push_window(self._sm[-1])
            self._tau_prev = self._tau()
        else:
            self._tau_prev = None
        return trigger


def detect_triggers(raw: Iterable[float], cfg: ExtractorConfig,
                    source: str = "compensated") -> list[TriggerEvent]:
    """Run the streaming detector over a whole trace."""
    raw = np.asarray(list(raw), dtype=np.float64)
    if raw.size <= cfg.warmup + 2:
        raise ValueError(
            f"trace length {raw.size} too short for warmup {cfg.warmup}")
    det = StreamingDetector(cfg, source)
    triggers = []
    for value in raw:
        ev = det.feed(value)
        if ev is not None:
            triggers.append(ev)
    return triggers


def write_trigger_log(triggers, destination) -> None:
    with open(destination, "w") as fh:
        for ev in triggers:
            fh.write(f"{ev.frame_index}\t{ev.time_s:.6f}\t{ev.score:.9g}"
                     f"\t{ev.threshold:.9g}\t{ev.source}\n")


def read_trigger_log(source) -> list[TriggerEvent]:
    triggers = []
    with open(source) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            frame, time_s, score, tau, tag = line.split("\t")
            triggers.append(TriggerEvent(int(frame), float(time_s),
                                         float(score), float(tau), tag))
    return triggers


def write_trace_csv(raw: np.ndarray, cfg: ExtractorConfig, destination) -> None:
    """Dump t, raw, smoothed, tau columns (tau is nan inside warmup)."""
    smoothed = smooth_causal(raw, cfg.sigma)
    tau = threshold_series(smoothed, cfg)
    with open(destination, "w") as fh:
        fh.write("t,raw,smoothed,tau\n")
        for t in range(len(raw)):
            fh.write(f"{t},{raw[t]:.9g},{smoothed[t]:.9g},{tau[t]:.9g}\n")

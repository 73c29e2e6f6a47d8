"""Evaluation arithmetic: one-to-one peak matching, precision/recall/F1,
consensus rates (SPCR/TCR/DR), false-positive suppression, bandwidth savings,
and latent-energy retention.

Undefined ratios (empty denominators, zero total energy) are returned as
``None``, never silently as zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "MatchConfig", "MatchResult", "ConsensusEvent", "ConsensusSet",
    "TelemetryPolicy", "match_peaks", "precision_recall", "peak_f1",
    "consensus_rates", "fpsr", "bsr", "telemetry_mask", "ler",
]

_INADMISSIBLE = 1e9


@dataclass(frozen=True)
class MatchConfig:
    """One-to-one matching tolerance for trigger/event alignment."""

    tolerance_s: float = 3.0

    def __post_init__(self):
        if self.tolerance_s <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class TelemetryPolicy:
    """Trigger-gated transmission rates: burst around triggers, trickle elsewhere."""

    low_rate_fps: float = 1.0
    high_rate_fps: float = 30.0
    half_window_s: float = 3.0

    def __post_init__(self):
        if self.low_rate_fps < 0 or self.high_rate_fps <= 0 or self.half_window_s < 0:
            raise ValueError("rates and window must be non-negative, high rate positive")
        if self.low_rate_fps > self.high_rate_fps:
            raise ValueError("low rate must not exceed high rate")

    @property
    def low_ratio(self) -> float:
        return self.low_rate_fps / self.high_rate_fps


@dataclass(frozen=True)
class ConsensusEvent:
    """A consensus-validated event: an instant or interval with review phase."""

    start_s: float
    end_s: float
    category: str = "spatial_transition"
    phase: str = "P1"  # P1 (blind consensus) or P2 (confirmed discovery)

    def __post_init__(self):
        if self.end_s < self.start_s:
            raise ValueError("end_s must be >= start_s")
        if self.phase not in ("P1", "P2"):
            raise ValueError("phase must be P1 or P2")


@dataclass(frozen=True)
class ConsensusSet:
    events: tuple[ConsensusEvent, ...]

    @property
    def p1(self) -> list[ConsensusEvent]:
        return [e for e in self.events if e.phase == "P1"]

    @property
    def p2(self) -> list[ConsensusEvent]:
        return [e for e in self.events if e.phase == "P2"]


@dataclass
class MatchResult:
    matched: list[tuple[int, int]]  # (trigger index, event index)
    false_positives: list[int]      # unmatched trigger indices
    misses: list[int]               # unmatched event indices


def _trigger_times(triggers) -> np.ndarray:
    times = [t if isinstance(t, (int, float)) else t.time_s for t in triggers]
    return np.asarray(times, dtype=np.float64)


def _event_intervals(events) -> np.ndarray:
    out = []
    for e in events:
        if isinstance(e, (int, float)):
            out.append((float(e), float(e)))
        else:
            out.append((float(e.start_s), float(e.end_s)))
    return np.asarray(out, dtype=np.float64).reshape(-1, 2)


def _distance(time_s: float, interval: np.ndarray) -> float:
    if time_s < interval[0]:
        return interval[0] - time_s
    if time_s > interval[1]:
        return time_s - interval[1]
    return 0.0


def match_peaks(triggers, events, cfg: MatchConfig = MatchConfig()) -> MatchResult:
    """Exact one-to-one matching inside the tolerance window.

    Maximum cardinality first, then minimum total time offset, via a single
    assignment with a large penalty on inadmissible pairs.
    """
    times = _trigger_times(triggers)
    intervals = _event_intervals(events)
    if times.size == 0 or intervals.shape[0] == 0:
        return MatchResult([], list(range(times.size)),
                           list(range(intervals.shape[0])))
    cost = np.empty((times.size, intervals.shape[0]))
    for i, ts in enumerate(times):
        for j in range(intervals.shape[0]):
            d = _distance(ts, intervals[j])
            cost[i, j] = d if d <= cfg.tolerance_s else _INADMISSIBLE
    rows, cols = linear_sum_assignment(cost)
    matched = [(int(i), int(j)) for i, j in zip(rows, cols)
               if cost[i, j] < _INADMISSIBLE]
    used_t = {i for i, _ in matched}
    used_e = {j for _, j in matched}
    return MatchResult(matched,
                       [i for i in range(times.size) if i not in used_t],
                       [j for j in range(intervals.shape[0]) if j not in used_e])


def precision_recall(result: MatchResult, n_triggers: int,
                     n_events: int) -> tuple[Optional[float], Optional[float]]:
    p = len(result.matched) / n_triggers if n_triggers else None
    r = len(result.matched) / n_events if n_events else None
    return p, r


def peak_f1(precision: float, recall: float) -> float:
    if not (0 <= precision <= 1 and 0 <= recall <= 1):
        raise ValueError("precision and recall must lie in [0, 1]")
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def consensus_rates(triggers, consensus: ConsensusSet,
                    cfg: MatchConfig = MatchConfig()) -> dict:
    """SPCR, TCR (P1 and P1+P2 variants, fixed denominator) and DR, in percent."""
    n_prop = len(triggers)
    p1 = consensus.p1
    both = consensus.p1 + consensus.p2
    m_p1 = match_peaks(triggers, p1, cfg)
    m_both = match_peaks(triggers, both, cfg)
    n_p2_confirmed = len(consensus.p2)

    def pct(num, den):
        return 100.0 * num / den if den else None

    return {
        "spcr_p1": pct(len(m_p1.matched), len(p1)),
        "spcr_p1p2": pct(len(m_both.matched), len(both)),
        "tcr_p1": pct(len(m_p1.matched), n_prop),
        "tcr_p1p2": pct(len(m_both.matched), n_prop),
        "dr": pct(n_p2_confirmed, len(p1)),
    }


def fpsr(n_comp_false: int, n_uncomp_false: int) -> float:
    """Relative false-alarm reduction of the compensated variant, in percent."""
    if n_uncomp_false <= 0:
        raise ValueError("uncompensated false-alarm count must be positive")
    return (1.0 - n_comp_false / n_uncomp_false) * 100.0


def _merged_windows(trigger_times: np.ndarray, duration_s: float,
                    half_window_s: float) -> list[tuple[float, float]]:
    windows = []
    for t in np.sort(trigger_times):
        lo = max(t - half_window_s, 0.0)
        hi = min(t + half_window_s, duration_s)
        if hi <= lo:
            continue
        if windows and lo <= windows[-1][1]:
            windows[-1] = (windows[-1][0], max(windows[-1][1], hi))
        else:
            windows.append((lo, hi))
    return windows


def bsr(triggers, duration_s: float,
        policy: TelemetryPolicy = TelemetryPolicy()) -> float:
    """Bandwidth saved versus continuous high-rate streaming, in percent."""
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    times = _trigger_times(triggers)
    covered = sum(hi - lo for lo, hi in
                  _merged_windows(times, duration_s, policy.half_window_s))
    n_raw = duration_s * policy.high_rate_fps
    n_tx = covered * policy.high_rate_fps + (duration_s - covered) * policy.low_rate_fps
    return (1.0 - n_tx / n_raw) * 100.0


def telemetry_mask(triggers, n_frames: int, fps: float,
                   policy: TelemetryPolicy = TelemetryPolicy()) -> np.ndarray:
    """Per-frame weights: 1 inside trigger windows, the low-rate ratio elsewhere."""
    w = np.full(n_frames, policy.low_ratio)
    duration = n_frames / fps
    for lo, hi in _merged_windows(_trigger_times(triggers), duration,
                                  policy.half_window_s):
        a = int(np.ceil(lo * fps - 1e-9))
        b = int(np.floor(hi * fps + 1e-9))
        w[max(a, 0):min(b + 1, n_frames)] = 1.0
    return w


def ler(latents: np.ndarray, weights: np.ndarray, context: int = 30) -> Optional[float]:
    """Latent-energy retention of a telemetry mask, in percent.

    Energy is the median-centered, non-negative cosine deviation of each
    frame from the mean of its previous ``context`` frames; frames without
    full context carry no energy. Returns None when total energy is zero.
    """
    z = np.asarray(latents, dtype=np.float64)
    if z.ndim != 2:
        raise ValueError("latents must be (T, D)")
    t_total = z.shape[0]
    if t_total <= context:
        raise ValueError(f"sequence length {t_total} must exceed context {context}")
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (t_total,):
        raise ValueError("weights must have one entry per frame")

    # rolling mean of the previous `context` frames via prefix sums
    csum = np.cumsum(z, axis=0)
    mu = np.empty_like(z[context:])
    mu[0] = csum[context - 1] / context
    mu[1:] = (csum[context:-1] - csum[:t_total - context - 1]) / context
    zt = z[context:]
    nz = np.linalg.norm(zt, axis=1)
    nm = np.linalg.norm(mu, axis=1)
    dots = np.einsum("ij,ij->i", zt, mu)
    delta = np.zeros(t_total)
    ok = (nz > 0) & (nm > 0)
    delta[context:][ok] = 1.0 - dots[ok] / (nz[ok] * nm[ok])
    med = np.median(delta[context:])
    energy = np.maximum(delta - med, 0.0)
    energy[:context] = 0.0
    total = energy.sum()
    if total == 0.0:
        return None
    return float((w * energy).sum() / total * 100.0)

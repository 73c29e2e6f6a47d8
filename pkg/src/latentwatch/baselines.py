"""Comparison scorers and policies: non-predictive latent difference and
uniform periodic sampling. The naive (uncompensated) surprise baseline is the
predictor itself configured without the motion channel."""

from __future__ import annotations

import numpy as np

from .extractor import TriggerEvent
from .predictor import surprise

__all__ = ["direct_diff_score", "direct_diff_trace", "uniform_schedule"]


def direct_diff_score(z_t: np.ndarray, z_prev: np.ndarray, lam: float) -> float:
    """Hybrid score with 'no change' as the prediction (z_hat := z_prev)."""
    return surprise(z_t, z_prev, lam)


def direct_diff_trace(seq, lam: float) -> np.ndarray:
    """Frame-to-frame score trace; frame 0 has no predecessor and is NaN."""
    trace = np.full(len(seq), np.nan)
    for t in range(1, len(seq)):
        trace[t] = direct_diff_score(seq.values[t], seq.values[t - 1], lam)
    return trace


def uniform_schedule(duration_s: float, dt_s: float, fps: float) -> list[TriggerEvent]:
    """Content-agnostic triggers at dt, 2*dt, ... <= duration_s."""
    if dt_s <= 0:
        raise ValueError("dt_s must be positive")
    triggers = []
    k = 1
    # tolerate float accumulation at the exact endpoint
    while k * dt_s <= duration_s * (1.0 + 1e-12):
        time_s = k * dt_s
        triggers.append(TriggerEvent(int(round(time_s * fps)), time_s,
                                     float("nan"), float("nan"), "uniform"))
        k += 1
    return triggers

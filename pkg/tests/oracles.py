"""Independent reference implementations used only to check the package.

Each function here is a deliberately literal, loop-based transcription of the
defining formulas, kept free of any code shared with the implementation.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def pool_double_loop(values: np.ndarray) -> np.ndarray:
    """Channel-wise spatial average by explicit double loop."""
    h, w, d = values.shape
    out = np.zeros(d)
    for i in range(h):
        for j in range(w):
            out += values[i, j]
    return out / (h * w)


def gru_forward_stepwise(params, ctx: np.ndarray, z_prev: np.ndarray) -> np.ndarray:
    """Gate-by-gate scalar-free GRU evaluation, independent of the package's
    stacked-matrix forward pass. Gate order (reset, update, candidate)."""
    h_dim = params.config.hidden_dim
    x_seq = [np.array(row, dtype=np.float64) for row in ctx]
    for lay in params.layers:
        wxr, wxz, wxn = (lay["wx"][:h_dim], lay["wx"][h_dim:2 * h_dim],
                         lay["wx"][2 * h_dim:])
        whr, whz, whn = (lay["wh"][:h_dim], lay["wh"][h_dim:2 * h_dim],
                         lay["wh"][2 * h_dim:])
        bxr, bxz, bxn = (lay["bx"][:h_dim], lay["bx"][h_dim:2 * h_dim],
                         lay["bx"][2 * h_dim:])
        bhr, bhz, bhn = (lay["bh"][:h_dim], lay["bh"][h_dim:2 * h_dim],
                         lay["bh"][2 * h_dim:])
        h = np.zeros(h_dim)
        outputs = []
        for x in x_seq:
            r = 1.0 / (1.0 + np.exp(-(wxr @ x + bxr + whr @ h + bhr)))
            u = 1.0 / (1.0 + np.exp(-(wxz @ x + bxz + whz @ h + bhz)))
            n = np.tanh(wxn @ x + bxn + r * (whn @ h + bhn))
            h = (1.0 - u) * n + u * h
            outputs.append(h)
        x_seq = outputs
    return z_prev + params.w_out @ x_seq[-1] + params.b_out


def finite_difference_grad(f, x0: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function of a flat vector."""
    grad = np.empty_like(x0)
    for i in range(x0.size):
        xp = x0.copy()
        xp[i] += h
        xm = x0.copy()
        xm[i] -= h
        grad[i] = (f(xp) - f(xm)) / (2.0 * h)
    return grad


def grad_rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Worst-case per-component relative error with a scale-aware floor.

    Components far below the gradient's dominant magnitude cannot be resolved
    by central differences (roundoff ~ eps * loss / step), so the denominator
    is floored at 1e-3 of the largest analytic component.
    """
    floor = max(1e-3 * np.max(np.abs(analytic)), 1e-8)
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


def extract_triggers_offline(raw: np.ndarray, cfg) -> list[int]:
    """Whole-trace transcription of the smoothing/threshold/peak/refractory
    rules; returns accepted trigger frame indices."""
    raw = np.asarray(raw, dtype=np.float64)
    n = raw.size
    sigma = cfg.sigma
    radius = max(1, int(round(3.0 * sigma)))

    smoothed = np.empty(n)
    for t in range(n):
        num = den = 0.0
        for k in range(0, min(t, radius) + 1):
            w = math.exp(-(k * k) / (2.0 * sigma * sigma))
            num += w * raw[t - k]
            den += w
        smoothed[t] = num / den

    w_samp = int(round(cfg.window_s * cfg.fps))
    tau = np.full(n, np.nan)
    for t in range(cfg.warmup + 1, n):
        lo = max(cfg.warmup + 1, t - w_samp)
        window = smoothed[lo:t + 1]
        mu = window.mean()
        s = math.sqrt(((window - mu) ** 2).mean())
        tau[t] = max(mu + cfg.alpha * s, cfg.tau_min)

    peaks = []
    for t in range(1, n - 1):
        if (t > cfg.warmup and smoothed[t - 1] < smoothed[t] >= smoothed[t + 1]
                and smoothed[t] > tau[t]):
            peaks.append(t)

    accepted = []
    for t in peaks:
        if not accepted or (t - accepted[-1]) / cfg.fps >= cfg.refractory_s:
            accepted.append(t)
    return accepted


def max_matching_brute_force(trigger_times, events, tolerance_s: float) -> int:
    """Maximum-cardinality one-to-one matching by exhaustive search.

    ``events`` are (start, end) interval tuples; admissible when the trigger
    lies within the interval widened by the tolerance.
    """
    admissible = []
    for ts in trigger_times:
        row = []
        for j, (lo, hi) in enumerate(events):
            if lo - tolerance_s <= ts <= hi + tolerance_s:
                row.append(j)
        admissible.append(row)

    best = 0
    n = len(trigger_times)

    def recurse(i: int, used: set, count: int):
        nonlocal best
        if count + (n - i) <= best:
            return
        if i == n:
            best = max(best, count)
            return
        recurse(i + 1, used, count)
        for j in admissible[i]:
            if j not in used:
                used.add(j)
                recurse(i + 1, used, count + 1)
                used.remove(j)

    recurse(0, set(), 0)
    return best


def ler_literal(z: np.ndarray, weights: np.ndarray, context: int) -> float | None:
    """Loop-based transcription of the latent-energy retention definition."""
    t_total = len(z)
    deltas = {}
    for t in range(context, t_total):
        mu = sum(z[k] for k in range(t - context, t)) / context
        nz = math.sqrt(float(z[t] @ z[t]))
        nm = math.sqrt(float(mu @ mu))
        if nz == 0.0 or nm == 0.0:
            deltas[t] = 0.0
        else:
            deltas[t] = 1.0 - float(z[t] @ mu) / (nz * nm)
    med = float(np.median(list(deltas.values())))
    energy = {t: max(d - med, 0.0) for t, d in deltas.items()}
    total = sum(energy.values())
    if total == 0.0:
        return None
    captured = sum(weights[t] * e for t, e in energy.items())
    return captured / total * 100.0

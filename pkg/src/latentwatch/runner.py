"""Replay and sweep harness: runs any scorer through the extractor, computes
the metric row, and emits deterministic CSV/SVG reports with the full manifest
embedded for reproducibility."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import baselines, metrics, predictor, seqio
from .extractor import (ExtractorConfig, detect_triggers, kernel_radius,
                        write_trace_csv, write_trigger_log)

__all__ = ["RunManifest", "MethodResult", "run_replay", "alpha_sweep",
           "compute_trace", "write_frontier_svg"]

SCORE_METHODS = ("compensated", "naive", "direct_diff")
ALL_METHODS = SCORE_METHODS + ("uniform",)
DEFAULT_ALPHA_GRID = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)

METRIC_COLUMNS = ("method", "alpha", "n_triggers", "bsr", "f1", "precision",
                  "recall", "spcr_p1", "tcr_p1", "ler")


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one replay or sweep."""

    latents: str
    method: str = "compensated"
    labels: Optional[str] = None
    checkpoint: Optional[str] = None
    out_dir: str = "out"
    seed: int = 0
    # predictor
    hidden_dim: int = 256
    num_layers: int = 2
    lookback: int = 50
    lam: float = 0.5
    learning_rate: float = 0.001
    pretrain_epochs: int = 0
    # extractor
    sigma: float = 2.0
    window_s: float = 10.0
    alpha: float = 2.5
    tau_min: float = 0.005
    warmup: int = 200
    refractory_s: float = 0.5
    # evaluation
    tolerance_s: float = 3.0
    ler_context: int = 30
    low_rate_fps: float = 1.0
    high_rate_fps: float = 30.0
    half_window_s: float = 3.0
    # sweep / uniform policy
    alphas: tuple[float, ...] = DEFAULT_ALPHA_GRID
    uniform_dt_s: float = 12.0

    def __post_init__(self):
        if self.method not in ALL_METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.alphas:
            raise ValueError("alpha list must be non-empty")

    def extractor_config(self, fps: float) -> ExtractorConfig:
        return ExtractorConfig(fps=fps, sigma=self.sigma, window_s=self.window_s,
                               alpha=self.alpha, tau_min=self.tau_min,
                               warmup=self.warmup, refractory_s=self.refractory_s)

    def predictor_config(self, latent_dim: int, method: str) -> predictor.PredictorConfig:
        if method == "compensated":
            input_dim = latent_dim + 2
        elif method == "naive":
            input_dim = latent_dim
        else:
            raise ValueError(f"method {method!r} has no predictor")
        return predictor.PredictorConfig(
            latent_dim=latent_dim, input_dim=input_dim, hidden_dim=self.hidden_dim,
            num_layers=self.num_layers, lookback=self.lookback, lam=self.lam,
            learning_rate=self.learning_rate, seed=self.seed)

    def match_config(self) -> metrics.MatchConfig:
        return metrics.MatchConfig(self.tolerance_s)

    def telemetry_policy(self) -> metrics.TelemetryPolicy:
        return metrics.TelemetryPolicy(self.low_rate_fps, self.high_rate_fps,
                                       self.half_window_s)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        data = json.loads(text)
        if "alphas" in data:
            data["alphas"] = tuple(data["alphas"])
        return cls(**data)


def compute_trace(manifest: RunManifest, seq: seqio.LatentSequence,
                  method: str) -> np.ndarray:
    """Raw surprise trace for one score method; the warmup head is zero-filled.

    Requires warmup >= lookback + smoothing radius so the fill can never
    influence any post-warmup statistic.
    """
    if method not in SCORE_METHODS:
        raise ValueError(f"{method!r} is not a score method")
    need = kernel_radius(manifest.sigma) + (
        manifest.lookback if method != "direct_diff" else 1)
    if manifest.warmup < need:
        raise ValueError(f"warmup {manifest.warmup} must be >= {need} "
                         "(lookback plus smoothing radius)")
    if method == "direct_diff":
        trace = baselines.direct_diff_trace(seq, manifest.lam)
    else:
        cfg = manifest.predictor_config(seq.dim, method)
        if manifest.checkpoint:
            params = predictor.load_checkpoint(manifest.checkpoint)
            if params.config.input_dim != cfg.input_dim:
                raise ValueError("checkpoint input_dim does not match method")
        else:
            params = predictor.GRUParams.init(cfg)
        if manifest.pretrain_epochs > 0:
            predictor.pretrain(params, seq, manifest.pretrain_epochs)
        trace, _ = predictor.score_sequence(params, seq)
    return np.nan_to_num(trace, nan=0.0)


@dataclass
class MethodResult:
    method: str
    alpha: Optional[float]
    triggers: list
    row: dict


def evaluate_triggers(manifest: RunManifest, seq: seqio.LatentSequence,
                      triggers, method: str, alpha: Optional[float],
                      labels) -> MethodResult:
    """Assemble one metrics row; label-dependent entries stay None without labels."""
    policy = manifest.telemetry_policy()
    duration = seq.duration_s
    row = {
        "method": method,
        "alpha": alpha,
        "n_triggers": len(triggers),
        "bsr": metrics.bsr(triggers, duration, policy),
        "f1": None, "precision": None, "recall": None,
        "spcr_p1": None, "tcr_p1": None,
    }
    if labels:
        match = metrics.match_peaks(triggers, labels, manifest.match_config())
        p, r = metrics.precision_recall(match, len(triggers), len(labels))
        if p is not None and r is not None:
            row["f1"] = metrics.peak_f1(p, r)
        row["precision"], row["recall"] = p, r
        consensus = metrics.ConsensusSet(tuple(
            metrics.ConsensusEvent(lab.start_s, lab.end_s, lab.category, "P1")
            for lab in labels))
        rates = metrics.consensus_rates(triggers, consensus, manifest.match_config())
        row["spcr_p1"] = rates["spcr_p1"]
        row["tcr_p1"] = rates["tcr_p1"]
    mask = metrics.telemetry_mask(triggers, len(seq), seq.fps, policy)
    row["ler"] = metrics.ler(seq.values, mask, manifest.ler_context)
    return MethodResult(method, alpha, list(triggers), row)


def _run_method(manifest: RunManifest, seq, labels, method: str,
                alpha: float, trace: Optional[np.ndarray]) -> MethodResult:
    if method == "uniform":
        triggers = baselines.uniform_schedule(seq.duration_s,
                                              manifest.uniform_dt_s, seq.fps)
        return evaluate_triggers(manifest, seq, triggers, method, None, labels)
    cfg = manifest.extractor_config(seq.fps).with_alpha(alpha)
    triggers = detect_triggers(trace, cfg, source=method)
    return evaluate_triggers(manifest, seq, triggers, method, alpha, labels)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_metrics_csv(manifest: RunManifest, rows: Sequence[dict],
                      destination) -> None:
    header_keys = ("tolerance_s", "ler_context", "low_rate_fps", "high_rate_fps",
                   "half_window_s", "sigma", "window_s", "tau_min", "warmup",
                   "refractory_s", "seed")
    with open(destination, "w") as fh:
        for key in header_keys:
            fh.write(f"# {key}={getattr(manifest, key)}\n")
        fh.write(",".join(METRIC_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(row.get(c)) for c in METRIC_COLUMNS) + "\n")


def run_replay(manifest: RunManifest) -> MethodResult:
    """Replay one method at the manifest's alpha; writes the full report set."""
    seq = seqio.read_sequence(manifest.latents)
    labels = seqio.read_labels(manifest.labels) if manifest.labels else None
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    trace = None
    if manifest.method in SCORE_METHODS:
        trace = compute_trace(manifest, seq, manifest.method)
        write_trace_csv(trace, manifest.extractor_config(seq.fps), out / "trace.csv")
    result = _run_method(manifest, seq, labels, manifest.method,
                         manifest.alpha, trace)
    write_trigger_log(result.triggers, out / "triggers.log")
    write_metrics_csv(manifest, [result.row], out / "metrics.csv")
    (out / "manifest.json").write_text(manifest.to_json())
    return result


def _matched_uniform_dt(duration_s: float, n_triggers: int) -> float:
    return duration_s / n_triggers if n_triggers > 0 else duration_s


def alpha_sweep(manifest: RunManifest,
                methods: Sequence[str] = ALL_METHODS) -> list[MethodResult]:
    """One row per (method, alpha); uniform rows use budget-matched intervals.

    Each uniform row's interval is chosen so its trigger count matches the
    compensated (or first score) method's count at the same alpha.
    """
    seq = seqio.read_sequence(manifest.latents)
    labels = seqio.read_labels(manifest.labels) if manifest.labels else None
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    score_methods = [m for m in methods if m in SCORE_METHODS]
    traces = {m: compute_trace(manifest, seq, m) for m in score_methods}
    results: list[MethodResult] = []
    counts_by_alpha: dict[float, int] = {}
    for method in score_methods:
        for alpha in manifest.alphas:
            res = _run_method(manifest, seq, labels, method, alpha, traces[method])
            if method == score_methods[0]:
                counts_by_alpha[alpha] = len(res.triggers)
            results.append(res)
    if "uniform" in methods:
        for alpha in manifest.alphas:
            dt = _matched_uniform_dt(seq.duration_s,
                                     counts_by_alpha.get(alpha, 0))
            triggers = baselines.uniform_schedule(seq.duration_s, dt, seq.fps)
            res = evaluate_triggers(manifest, seq, triggers, "uniform", alpha, labels)
            results.append(res)
    write_metrics_csv(manifest, [r.row for r in results], out / "sweep.csv")
    write_frontier_svg([r.row for r in results], out / "frontier.svg")
    (out / "manifest.json").write_text(manifest.to_json())
    return results


_SVG_COLORS = {"compensated": "#d62728", "naive": "#1f77b4",
               "direct_diff": "#2ca02c", "uniform": "#7f7f7f"}


def write_frontier_svg(rows: Sequence[dict], destination,
                       x_key: str = "bsr", y_key: str = "f1") -> None:
    """Deterministic hand-rolled scatter of quality versus bandwidth saving."""
    width, height, margin = 480, 360, 45
    pts = [(r["method"], r[x_key], r[y_key]) for r in rows
           if r.get(x_key) is not None and r.get(y_key) is not None]
    xs = [p[1] for p in pts] or [0.0, 1.0]
    ys = [p[2] for p in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    xr = (x1 - x0) or 1.0
    yr = (y1 - y0) or 1.0

    def sx(x):
        return margin + (x - x0) / xr * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y0) / yr * (height - 2 * margin)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
             f'y2="{height - margin}" stroke="black"/>',
             f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
             f'y2="{height - margin}" stroke="black"/>',
             f'<text x="{width // 2}" y="{height - 8}" font-size="12" '
             f'text-anchor="middle">{x_key}</text>',
             f'<text x="12" y="{height // 2}" font-size="12" text-anchor="middle" '
             f'transform="rotate(-90 12 {height // 2})">{y_key}</text>']
    by_method: dict[str, list] = {}
    for method, x, y in pts:
        by_method.setdefault(method, []).append((x, y))
    for method, series in by_method.items():
        color = _SVG_COLORS.get(method, "#000000")
        series.sort()
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in series)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                     f'stroke-width="1"/>')
        for x, y in series:
            parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" '
                         f'fill="{color}"><title>{method}</title></circle>')
    parts.append("</svg>")
    Path(destination).write_text("\n".join(parts) + "\n")

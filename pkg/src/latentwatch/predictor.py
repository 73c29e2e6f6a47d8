"""Recurrent latent predictor: residual GRU forward pass, hybrid surprise,
analytic backpropagation through the lookback window, online SGD adaptation,
and offline pretraining.

The predictor re-unrolls from a zero hidden state over each lookback window;
no recurrent state is carried between steps. All math is float64. Gate order
inside stacked matrices is (reset, update, candidate).

Checkpoint layout: header line "LWCKPT1 <json config>", then the flattened
float64 parameter vector (see ``GRUParams.flatten`` for the order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Optional

import numpy as np

__all__ = [
    "PredictorConfig", "GRUParams", "StepRecord",
    "predict", "surprise", "online_step", "pretrain",
    "score_sequence", "loss_and_grad",
    "save_checkpoint", "load_checkpoint",
]


@dataclass(frozen=True)
class PredictorConfig:
    """Shapes and learning hyperparameters for one predictor instance.

    ``input_dim`` is ``latent_dim`` for the naive variant and
    ``latent_dim + 2`` for the motion-conditioned one.
    """

    latent_dim: int
    input_dim: int
    hidden_dim: int = 256
    num_layers: int = 2
    lookback: int = 50
    lam: float = 0.5
    learning_rate: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.latent_dim < 1 or self.hidden_dim < 1 or self.num_layers < 1:
            raise ValueError("dimensions must be positive")
        if self.lookback < 1:
            raise ValueError("lookback must be positive")
        if self.input_dim not in (self.latent_dim, self.latent_dim + 2):
            raise ValueError(
                f"input_dim must be latent_dim or latent_dim+2, got {self.input_dim}")
        if self.lam < 0 or self.learning_rate < 0:
            raise ValueError("lam and learning_rate must be non-negative")

    @property
    def uses_motion(self) -> bool:
        return self.input_dim == self.latent_dim + 2

    @classmethod
    def naive(cls, latent_dim: int, **kw) -> "PredictorConfig":
        return cls(latent_dim=latent_dim, input_dim=latent_dim, **kw)

    @classmethod
    def compensated(cls, latent_dim: int, **kw) -> "PredictorConfig":
        return cls(latent_dim=latent_dim, input_dim=latent_dim + 2, **kw)


class GRUParams:
    """Per-layer gate matrices plus the hidden->latent output projection.

    Layer ``l`` holds ``wx[l]`` (3H, in_l), ``wh[l]`` (3H, H), ``bx[l]`` (3H,),
    ``bh[l]`` (3H,) with in_0 = input_dim and in_l = hidden_dim for l > 0.
    """

    def __init__(self, config: PredictorConfig, layers, w_out, b_out):
        self.config = config
        self.layers = layers
        self.w_out = w_out
        self.b_out = b_out

    @classmethod
    def init(cls, config: PredictorConfig) -> "GRUParams":
        """Seeded uniform [-1/sqrt(H), 1/sqrt(H)] weights, zero biases."""
        rng = np.random.default_rng(config.seed)
        h = config.hidden_dim
        bound = 1.0 / np.sqrt(h)
        layers = []
        in_dim = config.input_dim
        for _ in range(config.num_layers):
            layers.append({
                "wx": rng.uniform(-bound, bound, (3 * h, in_dim)),
                "wh": rng.uniform(-bound, bound, (3 * h, h)),
                "bx": np.zeros(3 * h),
                "bh": np.zeros(3 * h),
            })
            in_dim = h
        w_out = rng.uniform(-bound, bound, (config.latent_dim, h))
        b_out = np.zeros(config.latent_dim)
        return cls(config, layers, w_out, b_out)

    @classmethod
    def zeros(cls, config: PredictorConfig) -> "GRUParams":
        h = config.hidden_dim
        layers = []
        in_dim = config.input_dim
        for _ in range(config.num_layers):
            layers.append({
                "wx": np.zeros((3 * h, in_dim)),
                "wh": np.zeros((3 * h, h)),
                "bx": np.zeros(3 * h),
                "bh": np.zeros(3 * h),
            })
            in_dim = h
        return cls(config, layers, np.zeros((config.latent_dim, h)),
                   np.zeros(config.latent_dim))

    def copy(self) -> "GRUParams":
        layers = [{k: v.copy() for k, v in lay.items()} for lay in self.layers]
        return GRUParams(self.config, layers, self.w_out.copy(), self.b_out.copy())

    def flatten(self) -> np.ndarray:
        """Concatenate wx, wh, bx, bh per layer in order, then w_out, b_out."""
        parts = []
        for lay in self.layers:
            parts += [lay["wx"].ravel(), lay["wh"].ravel(),
                      lay["bx"], lay["bh"]]
        parts += [self.w_out.ravel(), self.b_out]
        return np.concatenate(parts)

    def load_flat(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        off = 0
        for lay in self.layers:
            for key in ("wx", "wh", "bx", "bh"):
                n = lay[key].size
                lay[key] = flat[off:off + n].reshape(lay[key].shape).copy()
                off += n
        n = self.w_out.size
        self.w_out = flat[off:off + n].reshape(self.w_out.shape).copy()
        off += n
        self.b_out = flat[off:off + self.b_out.size].copy()
        off += self.b_out.size
        if off != flat.size:
            raise ValueError(f"flat vector has {flat.size} values, expected {off}")

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(lay[k])) for lay in self.layers for k in lay) \
            and np.all(np.isfinite(self.w_out)) and np.all(np.isfinite(self.b_out))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _check_ctx(params: GRUParams, ctx: np.ndarray) -> np.ndarray:
    cfg = params.config
    ctx = np.asarray(ctx, dtype=np.float64)
    if ctx.shape != (cfg.lookback, cfg.input_dim):
        raise ValueError(
            f"context must be ({cfg.lookback}, {cfg.input_dim}), got {ctx.shape}")
    if not np.all(np.isfinite(ctx)):
        raise ValueError("context contains non-finite values")
    return ctx


def _forward(params: GRUParams, ctx: np.ndarray, need_cache: bool):
    """Unroll the stacked GRU over the window; returns (delta_z, cache)."""
    cfg = params.config
    h_dim = cfg.hidden_dim
    steps = ctx.shape[0]
    cache = [] if need_cache else None
    x_seq = ctx
    for lay in params.layers:
        h = np.zeros(h_dim)
        out_seq = np.empty((steps, h_dim))
        lay_cache = [] if need_cache else None
        for t in range(steps):
            x = x_seq[t]
            a = lay["wx"] @ x + lay["bx"]
            b = lay["wh"] @ h + lay["bh"]
            r = _sigmoid(a[:h_dim] + b[:h_dim])
            zg = _sigmoid(a[h_dim:2 * h_dim] + b[h_dim:2 * h_dim])
            bn = b[2 * h_dim:]
            n = np.tanh(a[2 * h_dim:] + r * bn)
            h_new = (1.0 - zg) * n + zg * h
            if need_cache:
                lay_cache.append((x, h, r, zg, n, bn))
            h = h_new
            out_seq[t] = h
        if need_cache:
            cache.append(lay_cache)
        x_seq = out_seq
    delta = params.w_out @ x_seq[-1] + params.b_out
    if not np.all(np.isfinite(delta)):
        raise FloatingPointError("non-finite predictor output")
    return delta, cache, x_seq[-1]


def predict(params: GRUParams, ctx: np.ndarray, z_prev: np.ndarray) -> np.ndarray:
    """One-step residual prediction: z_prev plus the projected final hidden state."""
    ctx = _check_ctx(params, ctx)
    z_prev = np.asarray(z_prev, dtype=np.float64)
    if z_prev.shape != (params.config.latent_dim,):
        raise ValueError("z_prev dim mismatch")
    delta, _, _ = _forward(params, ctx, need_cache=False)
    return z_prev + delta


def _cosine(z: np.ndarray, z_hat: np.ndarray) -> float:
    nz = np.linalg.norm(z)
    nh = np.linalg.norm(z_hat)
    if nz == 0.0 or nh == 0.0:
        return 1.0  # zero-norm convention: no directional penalty
    return float(z @ z_hat / (nz * nh))


def surprise(z: np.ndarray, z_hat: np.ndarray, lam: float) -> float:
    """Hybrid mismatch: squared L2 error plus lam * (1 - cosine similarity)."""
    z = np.asarray(z, dtype=np.float64)
    z_hat = np.asarray(z_hat, dtype=np.float64)
    if z.shape != z_hat.shape:
        raise ValueError("dim mismatch between observed and predicted state")
    if lam < 0:
        raise ValueError("lam must be non-negative")
    err = z - z_hat
    return float(err @ err + lam * (1.0 - _cosine(z, z_hat)))


def _surprise_grad_zhat(z: np.ndarray, z_hat: np.ndarray, lam: float) -> np.ndarray:
    """d surprise / d z_hat; zero directional term at a zero-norm vector."""
    grad = 2.0 * (z_hat - z)
    nz = np.linalg.norm(z)
    nh = np.linalg.norm(z_hat)
    if lam > 0 and nz > 0 and nh > 0:
        cos = float(z @ z_hat / (nz * nh))
        dcos = z / (nz * nh) - cos * z_hat / (nh * nh)
        grad -= lam * dcos
    return grad


def loss_and_grad(params: GRUParams, ctx: np.ndarray, z_t: np.ndarray,
                  z_prev: np.ndarray):
    """Surprise at z_t plus its gradient w.r.t. every parameter.

    Gradients flow through the full unrolled window and the output projection;
    context vectors are constants.
    """
    cfg = params.config
    ctx = _check_ctx(params, ctx)
    z_t = np.asarray(z_t, dtype=np.float64)
    z_prev = np.asarray(z_prev, dtype=np.float64)
    delta, cache, h_last = _forward(params, ctx, need_cache=True)
    z_hat = z_prev + delta
    loss = surprise(z_t, z_hat, cfg.lam)

    d_delta = _surprise_grad_zhat(z_t, z_hat, cfg.lam)
    grads = GRUParams.zeros(cfg)
    grads.w_out = np.outer(d_delta, h_last)
    grads.b_out = d_delta.copy()

    h_dim = cfg.hidden_dim
    steps = ctx.shape[0]
    # dh_time[l]: gradient flowing into layer l's hidden state at the current step
    dh_time = [np.zeros(h_dim) for _ in range(cfg.num_layers)]
    dh_time[-1] = params.w_out.T @ d_delta
    dx_below = np.zeros(0)
    for t in range(steps - 1, -1, -1):
        dx_prev_layer = None
        for l in range(cfg.num_layers - 1, -1, -1):
            lay = params.layers[l]
            g = grads.layers[l]
            x, h_prev, r, zg, n, bn = cache[l][t]
            dh = dh_time[l]
            if dx_prev_layer is not None:
                dh = dh + dx_prev_layer
            dzg = dh * (h_prev - n)
            dn = dh * (1.0 - zg)
            dh_prev = dh * zg
            dan = dn * (1.0 - n * n)
            dr = dan * bn
            dbn = dan * r
            dar = dr * r * (1.0 - r)
            daz = dzg * zg * (1.0 - zg)
            da = np.concatenate([dar, daz, dan])
            db = np.concatenate([dar, daz, dbn])
            g["wx"] += np.outer(da, x)
            g["bx"] += da
            g["wh"] += np.outer(db, h_prev)
            g["bh"] += db
            dh_prev = dh_prev + lay["wh"].T @ db
            dx_prev_layer = lay["wx"].T @ da if l > 0 else None
            dh_time[l] = dh_prev
    return loss, grads


@dataclass(frozen=True)
class StepRecord:
    """Outcome of one online step: score under the pre-update parameters."""

    surprise: float
    update_applied: bool


def online_step(params: GRUParams, ctx: np.ndarray, z_t: np.ndarray,
                z_prev: np.ndarray, eta: Optional[float] = None) -> StepRecord:
    """Score with the current parameters, then take one SGD step in place.

    A non-finite gradient skips the update and flags the record.
    """
    cfg = params.config
    if eta is None:
        eta = cfg.learning_rate
    if eta < 0:
        raise ValueError("eta must be non-negative")
    if eta == 0.0:
        z_hat = predict(params, ctx, z_prev)
        return StepRecord(surprise(np.asarray(z_t, dtype=np.float64), z_hat, cfg.lam),
                          False)
    loss, grads = loss_and_grad(params, ctx, z_t, z_prev)
    flat = grads.flatten()
    if not np.all(np.isfinite(flat)):
        return StepRecord(loss, False)
    params.load_flat(params.flatten() - eta * flat)
    return StepRecord(loss, True)


def _context_inputs(values: np.ndarray, motion: Optional[np.ndarray],
                    uses_motion: bool) -> np.ndarray:
    if not uses_motion:
        return values
    if motion is None:
        raise ValueError("compensated variant requires a motion track")
    return np.concatenate([values, motion], axis=1)


def pretrain(params: GRUParams, seq, epochs: int, eta: Optional[float] = None) -> GRUParams:
    """Causal sweep(s) over a sequence, applying online_step at each valid t."""
    cfg = params.config
    lb = cfg.lookback
    if len(seq) <= lb + 1:
        raise ValueError(f"sequence length {len(seq)} too short for lookback {lb}")
    inputs = _context_inputs(seq.values, seq.motion, cfg.uses_motion)
    for _ in range(epochs):
        for t in range(lb, len(seq)):
            online_step(params, inputs[t - lb:t], seq.values[t],
                        seq.values[t - 1], eta)
    return params


def score_sequence(params: GRUParams, seq, adapt: bool = True,
                   eta: Optional[float] = None):
    """Replay a sequence, emitting the online surprise trace.

    Returns (trace, applied) where ``trace[t]`` is NaN for the first
    ``lookback`` frames (no prediction exists there) and ``applied[t]``
    flags whether the step's weight update was applied.
    """
    cfg = params.config
    lb = cfg.lookback
    if len(seq) <= lb:
        raise ValueError(f"sequence length {len(seq)} too short for lookback {lb}")
    inputs = _context_inputs(seq.values, seq.motion, cfg.uses_motion)
    trace = np.full(len(seq), np.nan)
    applied = np.zeros(len(seq), dtype=bool)
    if not adapt:
        eta = 0.0
    for t in range(lb, len(seq)):
        rec = online_step(params, inputs[t - lb:t], seq.values[t],
                          seq.values[t - 1], eta)
        trace[t] = rec.surprise
        applied[t] = rec.update_applied
    return trace, applied


def save_checkpoint(params: GRUParams, destination) -> None:
    cfg_json = json.dumps(asdict(params.config), sort_keys=True)
    with Path(destination).open("wb") as fh:
        fh.write(b"LWCKPT1 " + cfg_json.encode() + b"\n")
        fh.write(params.flatten().astype("<f8").tobytes())


def load_checkpoint(source) -> GRUParams:
    data = Path(source).read_bytes()
    nl = data.index(b"\n")
    header = data[:nl].decode()
    if not header.startswith("LWCKPT1 "):
        raise ValueError(f"{source}: not a predictor checkpoint")
    cfg = PredictorConfig(**json.loads(header[len("LWCKPT1 "):]))
    params = GRUParams.zeros(cfg)
    params.load_flat(np.frombuffer(data, dtype="<f8", offset=nl + 1))
    return params

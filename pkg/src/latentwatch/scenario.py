"""Synthetic latent-world generator with known ego-motion coupling and
ground-truth novelty events.

The latent trajectory is

    z_t = background_t + A @ m_t + sum of event kernels + noise_t

where the background is a mean-reverting random walk, m_t follows scheduled
maneuver profiles (smooth raised-cosine ramps), and A is a per-seed coupling
map. Sustained "transition" events jump and decay toward a new baseline;
"transient" events are symmetric pulses. Everything is deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .seqio import EventLabel, LatentSequence

__all__ = ["Maneuver", "EventSpec", "ScenarioConfig", "generate",
           "event_free", "coupling_map", "write_config", "read_config"]


@dataclass(frozen=True)
class Maneuver:
    """A scheduled vehicle motion: ramps smoothly up and back down."""

    start_s: float
    end_s: float
    mx: float
    my: float

    def __post_init__(self):
        if self.start_s < 0 or self.end_s <= self.start_s:
            raise ValueError("need 0 <= start_s < end_s")


@dataclass(frozen=True)
class EventSpec:
    """An injected novelty event in latent space."""

    time_s: float
    magnitude: float
    decay_s: float = 2.0
    kind: str = "transition"  # transition (sustained) or transient (pulse)
    category: str = "spatial_transition"

    def __post_init__(self):
        if self.time_s < 0 or self.magnitude < 0 or self.decay_s <= 0:
            raise ValueError("bad event spec")
        if self.kind not in ("transition", "transient"):
            raise ValueError(f"unknown event kind {self.kind!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    dim: int = 16
    num_frames: int = 2000
    fps: float = 30.0
    seed: int = 0
    baseline_scale: float = 1.0     # norm of the static scene component
    drift_rate: float = 0.02        # mean reversion per frame
    drift_scale: float = 0.002      # background walk step scale
    noise_scale: float = 0.01       # per-frame isotropic jitter
    coupling_scale: float = 8.0     # norm scale of the motion coupling map
    motion_lag_frames: int = 0      # latents respond to the command this many frames later
    motion_jitter: float = 0.0      # per-frame command jitter while a maneuver is active
    maneuvers: tuple[Maneuver, ...] = ()
    events: tuple[EventSpec, ...] = ()

    def __post_init__(self):
        if self.dim < 1 or self.num_frames < 2 or self.fps <= 0:
            raise ValueError("bad scenario dimensions")
        duration = self.num_frames / self.fps
        for m in self.maneuvers:
            if m.end_s > duration:
                raise ValueError(f"maneuver ends at {m.end_s}s past duration {duration}s")
        for e in self.events:
            if e.time_s > duration:
                raise ValueError(f"event at {e.time_s}s past duration {duration}s")

    @property
    def duration_s(self) -> float:
        return self.num_frames / self.fps


def coupling_map(cfg: ScenarioConfig) -> np.ndarray:
    """The (D, 2) motion-to-latent coupling; depends only on (seed, dim)."""
    rng = np.random.default_rng([cfg.seed, 0xC0FFEE])
    a = rng.normal(size=(cfg.dim, 2))
    a /= np.linalg.norm(a, axis=0, keepdims=True)
    return a * cfg.coupling_scale


def motion_track(cfg: ScenarioConfig) -> np.ndarray:
    """Scheduled global-motion series (T, 2) with raised-cosine ramps."""
    t = np.arange(cfg.num_frames) / cfg.fps
    m = np.zeros((cfg.num_frames, 2))
    any_active = np.zeros(cfg.num_frames, dtype=bool)
    for man in cfg.maneuvers:
        span = man.end_s - man.start_s
        phase = (t - man.start_s) / span
        active = (phase >= 0) & (phase <= 1)
        any_active |= active
        profile = np.zeros_like(t)
        profile[active] = 0.5 * (1.0 - np.cos(2.0 * np.pi * phase[active]))
        m[:, 0] += profile * man.mx
        m[:, 1] += profile * man.my
    if cfg.motion_jitter > 0 and any_active.any():
        rng = np.random.default_rng([cfg.seed, 0x10710])
        m += (cfg.motion_jitter * any_active[:, None]
              * rng.normal(size=(cfg.num_frames, 2)))
    return m


def _event_kernel(cfg: ScenarioConfig, spec: EventSpec,
                  direction: np.ndarray) -> np.ndarray:
    t = np.arange(cfg.num_frames) / cfg.fps
    if spec.kind == "transition":
        # jump, then decay toward a persistent new baseline
        persist = 0.3
        rel = t - spec.time_s
        env = np.where(rel >= 0,
                       persist + (1.0 - persist) * np.exp(-np.maximum(rel, 0) / spec.decay_s),
                       0.0)
    else:
        env = np.exp(-0.5 * ((t - spec.time_s) / spec.decay_s) ** 2)
    return np.outer(env, direction * spec.magnitude)


def _event_label(spec: EventSpec) -> EventLabel:
    if spec.kind == "transition":
        return EventLabel(spec.time_s, spec.time_s + spec.decay_s,
                          spec.category, "scenario")
    return EventLabel(max(spec.time_s - spec.decay_s, 0.0),
                      spec.time_s + spec.decay_s, spec.category, "scenario")


def generate(cfg: ScenarioConfig) -> tuple[LatentSequence, list[EventLabel]]:
    """Produce (latent sequence with motion track, ground-truth labels)."""
    a = coupling_map(cfg)
    m = motion_track(cfg)
    rng = np.random.default_rng([cfg.seed, 0xBA5E])

    base = np.random.default_rng([cfg.seed, 0xBA5E11]).normal(size=cfg.dim)
    base *= cfg.baseline_scale / np.linalg.norm(base)

    background = np.zeros((cfg.num_frames, cfg.dim))
    bg = np.zeros(cfg.dim)
    for t in range(cfg.num_frames):
        bg = (1.0 - cfg.drift_rate) * bg + cfg.drift_scale * rng.normal(size=cfg.dim)
        background[t] = bg

    if cfg.motion_lag_frames > 0:
        lag = cfg.motion_lag_frames
        m_eff = np.vstack([np.zeros((lag, 2)), m[:-lag]])
    else:
        m_eff = m
    z = base + background + m_eff @ a.T
    labels = []
    # event directions drawn from a stream independent of the background walk
    rng_ev = np.random.default_rng([cfg.seed, 0xE7E7])
    for spec in cfg.events:
        direction = rng_ev.normal(size=cfg.dim)
        direction /= np.linalg.norm(direction)
        z += _event_kernel(cfg, spec, direction)
        labels.append(_event_label(spec))
    if cfg.noise_scale > 0:
        z += cfg.noise_scale * rng.normal(size=z.shape)
    return LatentSequence(cfg.fps, z, m), labels


def event_free(cfg: ScenarioConfig) -> ScenarioConfig:
    """Same world (seed, coupling, drift) without injected events; used for
    pretraining footage that is maneuver-rich but event-free."""
    return replace(cfg, events=())


def write_config(cfg: ScenarioConfig, destination) -> None:
    """Plain key-value text; schedules as one line per entry."""
    with open(destination, "w") as fh:
        for key in ("dim", "num_frames", "fps", "seed", "baseline_scale",
                    "drift_rate", "drift_scale", "noise_scale", "coupling_scale",
                    "motion_lag_frames", "motion_jitter"):
            fh.write(f"{key}={getattr(cfg, key)}\n")
        for m in cfg.maneuvers:
            fh.write(f"maneuver={m.start_s},{m.end_s},{m.mx},{m.my}\n")
        for e in cfg.events:
            fh.write(f"event={e.time_s},{e.magnitude},{e.decay_s},{e.kind},{e.category}\n")


def read_config(source) -> ScenarioConfig:
    kw: dict = {"maneuvers": [], "events": []}
    casts = {"dim": int, "num_frames": int, "seed": int}
    for line in open(source):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, value = line.split("=", 1)
        if key == "maneuver":
            s, e, mx, my = value.split(",")
            kw["maneuvers"].append(Maneuver(float(s), float(e), float(mx), float(my)))
        elif key == "event":
            t, mag, dec, kind, cat = value.split(",")
            kw["events"].append(EventSpec(float(t), float(mag), float(dec), kind, cat))
        else:
            kw[key] = casts.get(key, float)(value)
    kw["maneuvers"] = tuple(kw["maneuvers"])
    kw["events"] = tuple(kw["events"])
    return ScenarioConfig(**kw)

"""Global motion cue: dense-flow pooling and context-vector assembly."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seqio import LatentState


@dataclass(frozen=True)
class FlowField:
    """Per-pixel (v_x, v_y) displacements, shape (height, width, 2), in pixels."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3 or v.shape[2] != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"flow field must be (H, W, 2), got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("flow field contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class MotionVector:
    """Scale-invariant global translation (mean flow over width/height)."""

    mx: float
    my: float

    def __post_init__(self):
        if not (np.isfinite(self.mx) and np.isfinite(self.my)):
            raise ValueError("motion vector must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.mx, self.my], dtype=np.float64)


def pool_flow(flow: FlowField) -> MotionVector:
    """Average the flow field and normalize by image width/height."""
    mean = flow.values.mean(axis=(0, 1))
    return MotionVector(mean[0] / flow.width, mean[1] / flow.height)


def make_context_vector(z: LatentState, m: MotionVector | None,
                        use_motion: bool) -> np.ndarray:
    """Build a predictor input: [z, m] for the compensated variant, z otherwise."""
    if not use_motion:
        return np.asarray(z.values, dtype=np.float64)
    if m is None:
        raise ValueError("compensated variant requires a motion vector")
    return np.concatenate([z.values, m.as_array()])

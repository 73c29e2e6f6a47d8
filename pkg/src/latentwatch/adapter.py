"""Video-to-sequence exporter: runs a registered patch encoder and flow
estimator over a video file and writes standard LSEQ1/MSEQ1 outputs plus a
JSON manifest.

Encoders and flow estimators are looked up by identifier in a registry, so
heavyweight pretrained backbones can be plugged in without this module
depending on them. Two lightweight built-ins ("toy-grid" encoder and
"farneback" flow) make the exporter runnable offline.

Requires opencv-python-headless for video decoding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .motion import FlowField, pool_flow
from .seqio import FeatureMap, LatentSequence, pool_feature_map, write_sequence

__all__ = ["ExportJob", "export", "register_encoder", "register_flow",
           "toy_grid_encoder"]

# encoder: resized RGB uint8 frame -> FeatureMap
_ENCODERS: dict[str, Callable[[np.ndarray], FeatureMap]] = {}
# flow: (prev_gray, cur_gray) -> FlowField
_FLOWS: dict[str, Callable[[np.ndarray, np.ndarray], FlowField]] = {}


def register_encoder(name: str, fn) -> None:
    _ENCODERS[name] = fn


def register_flow(name: str, fn) -> None:
    _FLOWS[name] = fn


def toy_grid_encoder(grid: int = 8, dim: int = 24, seed: int = 7):
    """Deterministic stand-in encoder: per-cell color statistics projected to
    ``dim`` channels by a fixed seeded random map."""
    rng = np.random.default_rng(seed)
    proj = rng.normal(size=(dim, 6)) / np.sqrt(6)

    def encode(frame: np.ndarray) -> FeatureMap:
        h, w = frame.shape[:2]
        f = frame.astype(np.float64) / 255.0
        cells = np.empty((grid, grid, 6))
        ys = np.linspace(0, h, grid + 1).astype(int)
        xs = np.linspace(0, w, grid + 1).astype(int)
        for i in range(grid):
            for j in range(grid):
                block = f[ys[i]:ys[i + 1], xs[j]:xs[j + 1]]
                cells[i, j, :3] = block.mean(axis=(0, 1))
                cells[i, j, 3:] = block.std(axis=(0, 1))
        return FeatureMap(cells @ proj.T)

    return encode


def _farneback_flow(prev_gray: np.ndarray, cur_gray: np.ndarray) -> FlowField:
    import cv2
    flow = cv2.calcOpticalFlowFarneback(prev_gray, cur_gray, None,
                                        0.5, 3, 15, 3, 5, 1.2, 0)
    return FlowField(flow.astype(np.float64))


register_encoder("toy-grid", toy_grid_encoder())
register_flow("farneback", _farneback_flow)


@dataclass(frozen=True)
class ExportJob:
    video: str
    latents_out: str
    encoder: str = "toy-grid"
    flow: str = "farneback"
    resize: tuple[int, int] = (512, 512)
    stride: int = 1
    manifest_out: Optional[str] = None

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.encoder not in _ENCODERS:
            raise ValueError(f"unknown encoder {self.encoder!r}")
        if self.flow not in _FLOWS:
            raise ValueError(f"unknown flow estimator {self.flow!r}")


def export(job: ExportJob) -> LatentSequence:
    """Decode, encode, pool, and write; partial files are removed on failure."""
    import cv2

    encode = _ENCODERS[job.encoder]
    flow_fn = _FLOWS[job.flow]
    out_path = Path(job.latents_out)
    try:
        cap = cv2.VideoCapture(str(job.video))
        if not cap.isOpened():
            raise IOError(f"cannot decode video {job.video}")
        fps = cap.get(cv2.CAP_PROP_FPS) or 30.0
        latents, motions = [], []
        prev_gray = None
        index = 0
        while True:
            ok, frame_bgr = cap.read()
            if not ok:
                break
            if index % job.stride != 0:
                index += 1
                continue
            index += 1
            frame = cv2.resize(frame_bgr, job.resize)
            rgb = cv2.cvtColor(frame, cv2.COLOR_BGR2RGB)
            gray = cv2.cvtColor(frame, cv2.COLOR_BGR2GRAY)
            latents.append(pool_feature_map(encode(rgb)).values)
            if prev_gray is None:
                motions.append(np.zeros(2))  # first frame has no predecessor
            else:
                m = pool_flow(flow_fn(prev_gray, gray))
                motions.append(m.as_array())
            prev_gray = gray
        cap.release()
        if not latents:
            raise IOError(f"no decodable frames in {job.video}")
        seq = LatentSequence(fps / job.stride, np.stack(latents),
                             np.stack(motions))
        write_sequence(seq, out_path)
        if job.manifest_out:
            manifest = asdict(job)
            manifest.update(frames=len(seq), dim=seq.dim, fps=seq.fps)
            Path(job.manifest_out).write_text(json.dumps(manifest, indent=2,
                                                         sort_keys=True))
        return seq
    except Exception:
        out_path.unlink(missing_ok=True)
        if job.manifest_out:
            Path(job.manifest_out).unlink(missing_ok=True)
        raise

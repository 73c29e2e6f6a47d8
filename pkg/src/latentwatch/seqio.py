"""Latent sequence data model, feature-map pooling, and binary sequence I/O.

On-disk layout (little-endian throughout):

    LSEQ1 file
        magic   5 bytes  b"LSEQ1"
        fps     float64
        dim     uint32   (D)
        count   uint32   (T)
        values  T*D float32
        optional motion block:
        magic   5 bytes  b"MSEQ1"
        values  T*2 float32

Values are stored as 32-bit floats; in-memory computation is 64-bit.
Labels travel as tab-separated line records, one event per line.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

LSEQ_MAGIC = b"LSEQ1"
MSEQ_MAGIC = b"MSEQ1"
_HEADER = struct.Struct("<dII")

EVENT_CATEGORIES = ("spatial_transition", "environmental", "behavior")


class SequenceFormatError(Exception):
    """Base class for sequence-file format failures."""

    code = "format_error"


class BadMagicError(SequenceFormatError):
    code = "bad_magic"


class LengthMismatchError(SequenceFormatError):
    code = "length_mismatch"


class DimMismatchError(SequenceFormatError):
    code = "dim_mismatch"


@dataclass(frozen=True)
class FeatureMap:
    """Dense patch-token feature map of shape (height, width, dim)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3 or min(v.shape) < 1:
            raise ValueError(f"feature map must be (H', W', D), got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("feature map contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def dim(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class LatentState:
    """Global semantic state vector for one frame."""

    values: np.ndarray
    frame_index: int = 0
    timestamp_s: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("latent state must be a non-empty 1D vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("latent state contains non-finite values")
        if self.frame_index < 0 or self.timestamp_s < 0:
            raise ValueError("frame_index and timestamp_s must be non-negative")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size


def pool_feature_map(fmap: FeatureMap) -> LatentState:
    """Collapse the spatial grid to a single global vector by channel-wise mean."""
    return LatentState(fmap.values.mean(axis=(0, 1)))


class LatentSequence:
    """An fps-stamped sequence of latent states with an optional motion track.

    ``values`` is (T, D); ``motion``, when present, is (T, 2). Frame ``i``
    has frame_index ``i`` and timestamp ``i / fps``.
    """

    def __init__(self, fps: float, values: np.ndarray,
                 motion: Optional[np.ndarray] = None):
        if fps <= 0:
            raise ValueError("fps must be positive")
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"values must be (T, D), got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("sequence contains non-finite values")
        if motion is not None:
            m = np.asarray(motion, dtype=np.float64)
            if m.shape != (v.shape[0], 2):
                raise DimMismatchError(
                    f"motion track shape {m.shape} does not match {v.shape[0]} frames")
            if not np.all(np.isfinite(m)):
                raise ValueError("motion track contains non-finite values")
            motion = m
        self.fps = float(fps)
        self.values = v
        self.motion = motion

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def duration_s(self) -> float:
        return len(self) / self.fps

    def timestamp(self, i: int) -> float:
        return i / self.fps

    def state(self, i: int) -> LatentState:
        return LatentState(self.values[i], frame_index=i, timestamp_s=self.timestamp(i))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatentSequence):
            return NotImplemented
        if self.fps != other.fps or not np.array_equal(self.values, other.values):
            return False
        if (self.motion is None) != (other.motion is None):
            return False
        return self.motion is None or np.array_equal(self.motion, other.motion)


def write_sequence(seq: LatentSequence, destination) -> None:
    """Serialize a sequence to the LSEQ1 (+ optional MSEQ1) binary layout."""
    path = Path(destination)
    t, d = seq.values.shape
    with path.open("wb") as fh:
        fh.write(LSEQ_MAGIC)
        fh.write(_HEADER.pack(seq.fps, d, t))
        fh.write(seq.values.astype("<f4").tobytes())
        if seq.motion is not None:
            fh.write(MSEQ_MAGIC)
            fh.write(seq.motion.astype("<f4").tobytes())


def read_sequence(source, expect_dim: Optional[int] = None) -> LatentSequence:
    """Read an LSEQ1 file; raises a distinct error per corruption mode."""
    data = Path(source).read_bytes()
    if data[:5] != LSEQ_MAGIC:
        raise BadMagicError(f"{source}: bad magic {data[:5]!r}")
    off = 5
    if len(data) < off + _HEADER.size:
        raise LengthMismatchError(f"{source}: truncated header")
    fps, d, t = _HEADER.unpack_from(data, off)
    off += _HEADER.size
    if expect_dim is not None and d != expect_dim:
        raise DimMismatchError(f"{source}: header dim {d}, expected {expect_dim}")
    need = t * d * 4
    if len(data) < off + need:
        raise LengthMismatchError(
            f"{source}: payload holds {len(data) - off} bytes, need {need}")
    values = np.frombuffer(data, dtype="<f4", count=t * d, offset=off)
    values = values.reshape(t, d).astype(np.float64)
    off += need
    motion = None
    if len(data) > off:
        if data[off:off + 5] != MSEQ_MAGIC:
            raise BadMagicError(f"{source}: bad motion-block magic")
        off += 5
        need = t * 2 * 4
        if len(data) < off + need:
            raise LengthMismatchError(f"{source}: truncated motion block")
        motion = np.frombuffer(data, dtype="<f4", count=t * 2, offset=off)
        motion = motion.reshape(t, 2).astype(np.float64)
        off += need
    if len(data) != off:
        raise LengthMismatchError(f"{source}: {len(data) - off} trailing bytes")
    return LatentSequence(fps, values, motion)


@dataclass(frozen=True)
class EventLabel:
    """Ground-truth or reviewer-supplied event interval."""

    start_s: float
    end_s: float
    category: str
    annotator_id: str = "unknown"

    def __post_init__(self):
        if self.start_s < 0 or self.end_s < self.start_s:
            raise ValueError("need 0 <= start_s <= end_s")
        if self.category not in EVENT_CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")

    @property
    def mid_s(self) -> float:
        return 0.5 * (self.start_s + self.end_s)


def write_labels(labels: Sequence[EventLabel], destination) -> None:
    with Path(destination).open("w") as fh:
        for lab in labels:
            fh.write(f"{lab.start_s:.6f}\t{lab.end_s:.6f}\t{lab.category}\t{lab.annotator_id}\n")


def read_labels(source) -> list[EventLabel]:
    labels = []
    for line in Path(source).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        start, end, category, annotator = line.split("\t")
        labels.append(EventLabel(float(start), float(end), category, annotator))
    return labels

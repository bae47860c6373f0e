"""Domain types shared across the pipeline.

A frame set is stored as a ``(T, 256)`` float array; a feature sequence is a
``(L, d)`` float array. Both are validated on construction and never mutated.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

N_FAST = 256
AMPLITUDE_RANGE = (0.0, 100.0)
NOMINAL_FPS = 200.0


class ValidationError(ValueError):
    """Raised when an input violates a data invariant."""


class StateLabel(enum.Enum):
    REST = "Rest"
    MOVE = "Move"

    @classmethod
    def parse(cls, text: str) -> "StateLabel":
        for member in cls:
            if member.value == text:
                return member
        raise ValidationError(f"unknown label {text!r} (expected 'Rest' or 'Move')")

    def __str__(self):
        return self.value


def validate_frame(samples, *, bounded=True, where="frame"):
    """Check one fast-time sweep and return it as a float array."""
    arr = np.asarray(samples, dtype=float)
    if arr.shape != (N_FAST,):
        raise ValidationError(f"{where}: expected {N_FAST} samples, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValidationError(f"{where}: non-finite sample at fast-time index {bad}")
    if bounded:
        lo, hi = AMPLITUDE_RANGE
        outside = (arr < lo) | (arr > hi)
        if outside.any():
            bad = int(np.flatnonzero(outside)[0])
            raise ValidationError(
                f"{where}: sample {arr[bad]!r} at index {bad} outside [{lo:g}, {hi:g}]"
            )
    return arr


def _frozen(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FrameSet:
    """T consecutive radar frames captured for one repetition of a state.

    ``processed`` marks derived sets (e.g. clutter-reduced) whose amplitudes
    may leave the measured [0, 100] range.
    """

    frames: np.ndarray
    fps: float = NOMINAL_FPS
    label: StateLabel | None = None
    id: str = ""
    processed: bool = False

    def __post_init__(self):
        arr = np.asarray(self.frames, dtype=float)
        name = f"frame set {self.id!r}"
        if arr.ndim != 2 or arr.shape[1] != N_FAST:
            raise ValidationError(f"{name}: expected shape (T, {N_FAST}), got {arr.shape}")
        if arr.shape[0] < 1:
            raise ValidationError(f"{name}: needs at least one frame")
        if not np.all(np.isfinite(arr)):
            row, col = np.argwhere(~np.isfinite(arr))[0]
            raise ValidationError(f"{name}: non-finite sample in frame {row}, index {col}")
        if not self.processed:
            lo, hi = AMPLITUDE_RANGE
            outside = (arr < lo) | (arr > hi)
            if outside.any():
                row, col = np.argwhere(outside)[0]
                raise ValidationError(
                    f"{name}: sample {arr[row, col]!r} in frame {row}, index {col} "
                    f"outside [{lo:g}, {hi:g}]"
                )
        if not (np.isfinite(self.fps) and self.fps > 0):
            raise ValidationError(f"{name}: fps must be positive, got {self.fps!r}")
        if self.label is not None and not isinstance(self.label, StateLabel):
            raise ValidationError(f"{name}: label must be a StateLabel, got {self.label!r}")
        object.__setattr__(self, "frames", _frozen(arr))
        object.__setattr__(self, "fps", float(self.fps))

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def __len__(self):
        return self.n_frames

    def __eq__(self, other):
        if not isinstance(other, FrameSet):
            return NotImplemented
        return (
            self.id == other.id
            and self.label == other.label
            and self.fps == other.fps
            and self.processed == other.processed
            and np.array_equal(self.frames, other.frames)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labeled frame sets from one participant (or one simulated scene)."""

    frame_sets: tuple = ()
    participant: str = ""
    seed: int | None = None

    def __post_init__(self):
        sets = tuple(self.frame_sets)
        seen = set()
        for fs in sets:
            if not isinstance(fs, FrameSet):
                raise ValidationError(f"dataset entries must be FrameSet, got {type(fs).__name__}")
            if fs.label is None:
                raise ValidationError(f"frame set {fs.id!r} has no label")
            if not fs.id:
                raise ValidationError("frame set with empty id")
            if fs.id in seen:
                raise ValidationError(f"duplicate frame set id {fs.id!r}")
            seen.add(fs.id)
        object.__setattr__(self, "frame_sets", sets)

    def __len__(self):
        return len(self.frame_sets)

    def __iter__(self):
        return iter(self.frame_sets)

    @property
    def ids(self):
        return [fs.id for fs in self.frame_sets]

    @property
    def labels(self):
        return [fs.label for fs in self.frame_sets]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.participant == other.participant
            and self.seed == other.seed
            and self.frame_sets == other.frame_sets
        )

    __hash__ = None


def as_sequence(x, *, name="sequence"):
    """Coerce ``x`` to a validated ``(L, d)`` feature sequence.

    1-D input is treated as a single-dimension sequence.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValidationError(f"{name}: expected 1-D or 2-D array, got {arr.ndim}-D")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{name}: empty sequence (shape {arr.shape})")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: contains non-finite values")
    return arr


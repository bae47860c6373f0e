"""Strongest-target (distance, strength) tracks for the CLEAN + MD-DTW baselines.

Each frame set is clutter-reduced by subtracting its mean frame; each residual
frame is then matched against the pulse template and the single strongest
echo is kept. The short-template variant matches against the central part of
the pulse only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FrameSet, ValidationError, validate_frame
from .synth import PulseTemplate


@dataclass(frozen=True)
class CleanVariant:
    """``fraction == 1.0`` is the conventional full-template CLEAN."""

    fraction: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValidationError(f"template fraction must be in (0, 1], got {self.fraction}")

    @classmethod
    def conventional(cls):
        return cls(1.0)

    @classmethod
    def short_template(cls, fraction=0.25):
        return cls(fraction)

    @property
    def is_conventional(self):
        return self.fraction == 1.0


def reduce_clutter(fs: FrameSet) -> FrameSet:
    if fs.n_frames < 2:
        raise ValidationError(f"frame set {fs.id!r}: clutter reduction needs at least 2 frames")
    # shifted mean: exact when all frames are identical
    first = fs.frames[0]
    background = first + (fs.frames - first).mean(axis=0)
    return FrameSet(fs.frames - background, fps=fs.fps, label=fs.label, id=fs.id, processed=True)


def effective_template(tpl: PulseTemplate, variant: CleanVariant) -> PulseTemplate:
    if variant.is_conventional:
        return tpl
    M = len(tpl)
    n = math.ceil(variant.fraction * M)
    if n % 2 == 0:
        n += 1
    n = min(n, M)
    if n < 3:
        raise ValidationError(f"short template of {n} taps is too short (fraction {variant.fraction}, M={M})")
    start = (M - n) // 2
    taps = tpl.taps[start:start + n]
    return PulseTemplate(taps / np.max(np.abs(taps)))


def clean_detect(frame, tpl: PulseTemplate):
    """Return ``(delay, strength)`` of the strongest template match in one frame.

    ``strength`` is the least-squares amplitude of the template at ``delay``.
    Equal peaks resolve to the smallest delay.
    """
    x = validate_frame(frame, bounded=False)
    taps = tpl.taps
    if taps.size > x.size:
        raise ValidationError(f"template of {taps.size} taps longer than the frame")
    rho = np.correlate(x, taps, mode="valid")
    delay = int(np.argmax(np.abs(rho)))  # argmax returns the first maximum
    energy = float(taps @ taps)
    return delay, _ls_amplitude(x[delay:delay + taps.size], taps, rho[delay], energy)


def _ls_amplitude(segment, taps, rho, energy):
    amp = rho / energy
    # One refinement pass against the residual; settles the last-ulp error
    # the correlation accumulates so a noiseless planted echo comes back exact.
    resid = segment - amp * taps
    return float(amp + (resid @ taps) / energy)


def track_targets(fs: FrameSet, tpl: PulseTemplate, variant: CleanVariant = CleanVariant()) -> np.ndarray:
    """Per-frame ``(delay, strength)`` as a ``(T, 2)`` array."""
    residual = reduce_clutter(fs)
    eff = effective_template(tpl, variant)
    out = np.empty((fs.n_frames, 2))
    for t, frame in enumerate(residual.frames):
        out[t] = clean_detect(frame, eff)
    return out

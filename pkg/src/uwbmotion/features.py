"""RMS-envelope motion feature.

Frames are laid end to end, a sliding RMS envelope is taken over the long
signal, the envelope is point-sampled once per four frames and its mean is
removed. A frame set of T frames therefore yields ``T // 4`` values.
"""
from __future__ import annotations

import numpy as np

from .core import N_FAST, FrameSet, ValidationError

ENVELOPE_WINDOW = 400
DECIMATION = 4 * N_FAST


def concatenate(fs: FrameSet) -> np.ndarray:
    return fs.frames.reshape(-1).copy()


def window_bounds(N, window):
    """Inclusive ``(lo, hi)`` arrays of the centered window at each index, clipped to the signal."""
    k = np.arange(N)
    lo = np.maximum(k - window // 2, 0)
    hi = np.minimum(k + (window + 1) // 2 - 1, N - 1)
    return lo, hi


def rms_envelope(signal, window: int = ENVELOPE_WINDOW) -> np.ndarray:
    """Stride-1 centered sliding RMS; output has the input's length.

    Near the ends the window is truncated to the samples that exist.
    """
    x = np.asarray(signal, dtype=float).ravel()
    if x.size == 0:
        raise ValidationError("rms_envelope: empty signal")
    if window < 1:
        raise ValidationError(f"rms_envelope: window must be >= 1, got {window}")
    N = x.size
    # Direct convolution: every output is a plain sum of non-negative terms,
    # so it keeps full relative precision (a cumulative-sum difference does not).
    sums = np.convolve(x * x, np.ones(window), mode="full")
    sums = sums[(window + 1) // 2 - 1:][:N]
    lo, hi = window_bounds(N, window)
    return np.sqrt(sums / (hi - lo + 1))


def decimate(env, factor: int = DECIMATION) -> np.ndarray:
    env = np.asarray(env, dtype=float).ravel()
    if factor < 1:
        raise ValidationError(f"decimate: factor must be >= 1, got {factor}")
    if factor > env.size:
        raise ValidationError(f"decimate: factor {factor} exceeds signal length {env.size}")
    n = env.size // factor
    return env[: n * factor : factor].copy()


def remove_dc(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x - x.mean()


def extract_feature(fs: FrameSet, window: int = ENVELOPE_WINDOW, factor: int = DECIMATION) -> np.ndarray:
    """Motion feature of a frame set as an ``(T // 4, 1)`` array."""
    if fs.n_frames * N_FAST < factor:
        raise ValidationError(
            f"frame set {fs.id!r} too short: {fs.n_frames} frames, need at least {factor // N_FAST}"
        )
    feat = remove_dc(decimate(rms_envelope(concatenate(fs), window), factor))
    return feat[:, None]

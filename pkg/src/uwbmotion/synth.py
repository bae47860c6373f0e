"""Seedable synthetic frame sets: static clutter plus one reflector.

A Rest set keeps the reflector at a fixed fast-time delay. A Move set is
identical except that, inside the movement window, the delay swings out and
back along a half-sine, mimicking a tongue-tip touch to the palate.

Seeds: ``generate_dataset`` draws the shared clutter profile and the per-set
frame counts from ``default_rng(seed)``; frame set number ``i`` (0-based, Rest
sets first, then Move) gets its own noise stream from ``default_rng([seed, i])``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .core import AMPLITUDE_RANGE, N_FAST, NOMINAL_FPS, Dataset, FrameSet, StateLabel, ValidationError


@dataclass(frozen=True, eq=False)
class PulseTemplate:
    taps: np.ndarray

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float)
        if taps.ndim != 1 or taps.size % 2 == 0:
            raise ValidationError(f"pulse template needs an odd number of taps, got {taps.size}")
        if not np.all(np.isfinite(taps)):
            raise ValidationError("pulse template has non-finite taps")
        if abs(np.max(np.abs(taps)) - 1.0) > 1e-12:
            raise ValidationError("pulse template must be peak-normalized (max |tap| == 1)")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    def __len__(self):
        return self.taps.size

    def __eq__(self, other):
        if not isinstance(other, PulseTemplate):
            return NotImplemented
        return np.array_equal(self.taps, other.taps)

    __hash__ = None


def gabor_taps(M):
    """Unnormalized Gaussian-windowed cosine with M taps centered on tap M//2."""
    x = np.arange(M) - (M - 1) / 2
    width = M / 6.0
    carrier = min(0.25, 3.0 / M)  # cycles per sample
    return np.exp(-0.5 * (x / width) ** 2) * np.cos(2 * np.pi * carrier * x)


def default_template(M: int = 31) -> PulseTemplate:
    if not isinstance(M, (int, np.integer)) or M < 5 or M % 2 == 0:
        raise ValidationError(f"template length must be an odd integer >= 5, got {M!r}")
    taps = gabor_taps(int(M))
    return PulseTemplate(taps / np.max(np.abs(taps)))


def smooth_clutter(rng, level=20.0, spread=4.0):
    """Random slowly-varying background profile over the 256 fast-time bins."""
    x = np.arange(N_FAST) / N_FAST
    profile = np.full(N_FAST, level)
    for k in range(1, 5):
        amp = rng.normal(0.0, spread / k)
        phase = rng.uniform(0, 2 * np.pi)
        profile += amp * np.cos(2 * np.pi * k * x + phase)
    return np.clip(profile, *AMPLITUDE_RANGE)


@dataclass(frozen=True)
class SimConfig:
    """Scene parameters. Delays are the fast-time index of the pulse's first tap.

    ``clutter=None`` draws a smooth profile from ``seed``.
    """

    T: int = 400
    fps: float = NOMINAL_FPS
    noise_sigma: float = 3.0
    clutter: tuple | None = None
    target_amp: float = 30.0
    target_rest_delay: int = 20
    move_extent: int = 120
    move_window: tuple = (120, 280)
    seed: int = 0
    template_length: int = 31

    def validate(self):
        M = self.template_length
        if self.T < 1:
            raise ValidationError(f"T must be >= 1, got {self.T}")
        if not self.fps > 0:
            raise ValidationError(f"fps must be positive, got {self.fps}")
        if not self.noise_sigma >= 0:
            raise ValidationError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.target_rest_delay < 0 or self.move_extent < 0:
            raise ValidationError("target_rest_delay and move_extent must be non-negative")
        if self.target_rest_delay + self.move_extent > N_FAST - 1 - M:
            raise ValidationError(
                f"reflector path leaves the frame: rest delay {self.target_rest_delay} + "
                f"extent {self.move_extent} > {N_FAST - 1 - M}"
            )
        start, end = self.move_window
        if not 0 <= start < end <= self.T:
            raise ValidationError(f"move_window {self.move_window} not within 0 <= start < end <= T={self.T}")
        if self.clutter is not None:
            c = np.asarray(self.clutter, dtype=float)
            lo, hi = AMPLITUDE_RANGE
            if c.shape != (N_FAST,) or not np.all((c >= lo) & (c <= hi)):
                raise ValidationError(f"clutter must be {N_FAST} values in [{lo:g}, {hi:g}]")
        return self


def delay_path(cfg: SimConfig, label: StateLabel) -> np.ndarray:
    """Ground-truth reflector delay for every frame."""
    delays = np.full(cfg.T, cfg.target_rest_delay, dtype=int)
    if label is StateLabel.MOVE:
        start, end = cfg.move_window
        t = np.arange(start, end)
        swing = np.round(cfg.move_extent * np.sin(np.pi * (t - start) / (end - start)))
        delays[start:end] += swing.astype(int)
    return delays


def generate_frame_set(cfg: SimConfig, label: StateLabel, id: str = "") -> FrameSet:
    cfg.validate()
    label = StateLabel(label)
    rng = np.random.default_rng(cfg.seed)
    clutter = smooth_clutter(rng) if cfg.clutter is None else np.asarray(cfg.clutter, dtype=float)
    return _render(cfg, label, clutter, rng, id or f"{label.value.lower()}")


def _render(cfg, label, clutter, rng, fid):
    taps = cfg.target_amp * default_template(cfg.template_length).taps
    frames = np.tile(clutter, (cfg.T, 1))
    for t, d in enumerate(delay_path(cfg, label)):
        frames[t, d:d + taps.size] += taps
    if cfg.noise_sigma > 0:
        frames += rng.normal(0.0, cfg.noise_sigma, size=frames.shape)
    np.clip(frames, *AMPLITUDE_RANGE, out=frames)
    return FrameSet(frames, fps=cfg.fps, label=label, id=fid)


def scaled_window(cfg: SimConfig, T: int) -> tuple:
    """Movement window of ``cfg`` stretched proportionally to a set of T frames."""
    start, end = cfg.move_window
    s = int(round(start * T / cfg.T))
    e = int(round(end * T / cfg.T))
    s = min(max(s, 0), T - 1)
    e = min(max(e, s + 1), T)
    return s, e


def generate_dataset(cfg: SimConfig, n_per_state: int = 20, t_jitter=(0, 0), participant="synthetic") -> Dataset:
    """Simulate ``n_per_state`` Rest and Move sets.

    Each set's frame count is ``cfg.T + j`` with ``j`` uniform on the inclusive
    integer range ``t_jitter``; the movement window scales with it.
    """
    cfg.validate()
    if n_per_state < 1:
        raise ValidationError(f"n_per_state must be >= 1, got {n_per_state}")
    lo, hi = (int(v) for v in t_jitter)
    if lo > hi:
        raise ValidationError(f"empty jitter range {t_jitter}")
    if cfg.T + lo < 1:
        raise ValidationError(f"jitter {t_jitter} allows frame counts below 1")

    master = np.random.default_rng(cfg.seed)
    clutter = smooth_clutter(master) if cfg.clutter is None else np.asarray(cfg.clutter, dtype=float)
    lengths = cfg.T + master.integers(lo, hi, endpoint=True, size=2 * n_per_state)

    sets = []
    width = max(2, len(str(n_per_state - 1)))
    for i in range(2 * n_per_state):
        label = StateLabel.REST if i < n_per_state else StateLabel.MOVE
        T = int(lengths[i])
        sub = dataclasses.replace(cfg, T=T, move_window=scaled_window(cfg, T))
        rng = np.random.default_rng([cfg.seed, i])
        fid = f"{label.value.lower()}_{i % n_per_state:0{width}d}"
        sets.append(_render(sub, label, clutter, rng, fid))
    return Dataset(tuple(sets), participant=participant, seed=cfg.seed)

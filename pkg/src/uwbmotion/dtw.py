"""Multidimensional DTW distance and 1-nearest-neighbour classification."""
from __future__ import annotations

import numba
import numpy as np

from .core import ValidationError, as_sequence


@numba.njit(cache=True)
def _cost(a, b, i, j):
    s = 0.0
    for k in range(a.shape[1]):
        diff = a[i, k] - b[j, k]
        s += diff * diff
    return np.sqrt(s)


@numba.njit(cache=True)
def _dtw_table(a, b):
    La, Lb = a.shape[0], b.shape[0]
    cost = np.empty((La, Lb))
    for i in range(La):
        for j in range(Lb):
            cost[i, j] = _cost(a, b, i, j)
    D = np.empty((La, Lb))
    D[0, 0] = cost[0, 0]
    for j in range(1, Lb):
        D[0, j] = D[0, j - 1] + cost[0, j]
    for i in range(1, La):
        D[i, 0] = D[i - 1, 0] + cost[i, 0]
        for j in range(1, Lb):
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = best + cost[i, j]
    return D


def mddtw_distance(a, b) -> float:
    """Unnormalized DTW cost with steps (1,0), (0,1), (1,1) and unit weights."""
    a = as_sequence(a, name="first sequence")
    b = as_sequence(b, name="second sequence")
    if a.shape[1] != b.shape[1]:
        raise ValidationError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return float(_dtw_table(a, b)[-1, -1])


def fit_zscore(seqs):
    """Pooled per-dimension mean and standard deviation over all steps of ``seqs``."""
    seqs = [as_sequence(s) for s in seqs]
    if not seqs:
        raise ValidationError("zscore: empty collection")
    d = seqs[0].shape[1]
    if any(s.shape[1] != d for s in seqs):
        raise ValidationError("zscore: sequences differ in dimension")
    pooled = np.concatenate(seqs, axis=0)
    return pooled.mean(axis=0), pooled.std(axis=0)


def apply_zscore(seq, mean, std):
    """Standardize ``seq``; dimensions with zero spread are left untouched."""
    seq = as_sequence(seq)
    live = std > 0
    out = seq.copy()
    out[:, live] = (seq[:, live] - mean[live]) / std[live]
    return out


def zscore_per_dim(seqs):
    mean, std = fit_zscore(seqs)
    return [apply_zscore(s, mean, std) for s in seqs]


def nn_classify(test, train):
    """Label of the training item closest to ``test``; ties go to the earliest item.

    ``train`` is a sequence of ``(features, label)`` pairs.
    """
    train = list(train)
    if not train:
        raise ValidationError("nn_classify: empty training set")
    best_label, best = None, np.inf
    for seq, label in train:
        dist = mddtw_distance(test, seq)
        if dist < best:
            best, best_label = dist, label
    if best_label is None:
        best_label = train[0][1]
    return best_label

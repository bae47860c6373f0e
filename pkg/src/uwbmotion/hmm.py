"""Left-to-right HMM with one diagonal Gaussian per state.

Every state may only stay put or advance by one; decoding always starts in
state 0. All recursions run in log space.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numba
import numpy as np

from .core import StateLabel, ValidationError, as_sequence

LOG_2PI = np.log(2 * np.pi)


@dataclass(frozen=True)
class TrainConfig:
    max_iters: int = 100
    ll_tol: float = 1e-6
    variance_floor: float = 1e-6
    seed: int = 0  # unused: initialization is deterministic

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.ll_tol > 0:
            raise ValidationError(f"ll_tol must be > 0, got {self.ll_tol}")
        if not self.variance_floor > 0:
            raise ValidationError(f"variance_floor must be > 0, got {self.variance_floor}")


def left_to_right_mask(n):
    return np.eye(n, dtype=bool) | np.eye(n, k=1, dtype=bool)


@dataclass(eq=False)
class HmmModel:
    pi: np.ndarray          # (n,)
    A: np.ndarray           # (n, n)
    means: np.ndarray       # (n, d)
    variances: np.ndarray   # (n, d)

    def __post_init__(self):
        self.pi = np.asarray(self.pi, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        self.means = np.atleast_2d(np.asarray(self.means, dtype=float))
        self.variances = np.atleast_2d(np.asarray(self.variances, dtype=float))
        n = self.pi.size
        if self.A.shape != (n, n) or self.means.shape[0] != n or self.variances.shape != self.means.shape:
            raise ValidationError("inconsistent HMM parameter shapes")
        if abs(self.pi.sum() - 1) > 1e-9 or np.any(self.pi[1:] != 0):
            raise ValidationError("initial distribution must be (1, 0, ..., 0)")
        if np.any(np.abs(self.A.sum(axis=1) - 1) > 1e-9) or np.any(self.A[~left_to_right_mask(n)] != 0):
            raise ValidationError("transition matrix must be row-stochastic and left-to-right")
        if np.any(self.A < 0) or np.any(self.variances <= 0):
            raise ValidationError("negative probability or non-positive variance")

    @property
    def n_states(self):
        return self.pi.size

    @property
    def d(self):
        return self.means.shape[1]

    def to_dict(self):
        return {
            "n_states": self.n_states,
            "d": self.d,
            "pi": self.pi.tolist(),
            "A": self.A.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }

    @classmethod
    def from_dict(cls, obj):
        try:
            return cls(obj["pi"], obj["A"], obj["means"], obj["variances"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed model document: {exc}") from None

    def __eq__(self, other):
        if not isinstance(other, HmmModel):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f)) for f in ("pi", "A", "means", "variances")
        )

    __hash__ = None


def emission_logprob(m: HmmModel, x):
    """``(L, n)`` log densities of every step under every state."""
    diff = x[:, None, :] - m.means[None, :, :]
    return -0.5 * (LOG_2PI + np.log(m.variances)[None] + diff * diff / m.variances[None]).sum(axis=-1)


@numba.njit(cache=True)
def _logsumexp(v):
    hi = v.max()
    if hi == -np.inf:
        return -np.inf
    s = 0.0
    for x in v:
        if x > -np.inf:
            s += np.exp(x - hi)
    return hi + np.log(s)


@numba.njit(cache=True)
def _forward(log_pi, log_A, log_B):
    L, n = log_B.shape
    alpha = np.empty((L, n))
    alpha[0] = log_pi + log_B[0]
    buf = np.empty(n)
    for t in range(1, L):
        for j in range(n):
            for i in range(n):
                buf[i] = alpha[t - 1, i] + log_A[i, j]
            alpha[t, j] = _logsumexp(buf) + log_B[t, j]
    return alpha


@numba.njit(cache=True)
def _backward(log_A, log_B):
    L, n = log_B.shape
    beta = np.empty((L, n))
    beta[L - 1] = 0.0
    buf = np.empty(n)
    for t in range(L - 2, -1, -1):
        for i in range(n):
            for j in range(n):
                buf[j] = log_A[i, j] + log_B[t + 1, j] + beta[t + 1, j]
            beta[t, i] = _logsumexp(buf)
    return beta


@numba.njit(cache=True)
def _posteriors(log_pi, log_A, log_B):
    """Log-likelihood, state posteriors and summed transition posteriors of one sequence."""
    L, n = log_B.shape
    alpha = _forward(log_pi, log_A, log_B)
    beta = _backward(log_A, log_B)
    ll = _logsumexp(alpha[L - 1])
    gamma = np.exp(alpha + beta - ll)
    xi = np.zeros((n, n))
    for t in range(L - 1):
        for i in range(n):
            for j in range(n):
                if log_A[i, j] > -np.inf:
                    xi[i, j] += np.exp(alpha[t, i] + log_A[i, j] + log_B[t + 1, j] + beta[t + 1, j] - ll)
    return ll, gamma, xi


def _log(p):
    with np.errstate(divide="ignore"):
        return np.log(p)


def _check_dim(m, seq):
    if seq.shape[1] != m.d:
        raise ValidationError(f"feature dimension {seq.shape[1]} does not match model dimension {m.d}")


def log_likelihood(m: HmmModel, seq) -> float:
    """log p(seq | m), summed over all state paths."""
    seq = as_sequence(seq)
    _check_dim(m, seq)
    alpha = _forward(_log(m.pi), _log(m.A), emission_logprob(m, seq))
    return float(_logsumexp(alpha[-1]))


def init_model(n_states: int, seqs, variance_floor: float = 1e-6) -> HmmModel:
    """Uniform segmentation: state k takes the k-th of n equal slices of every sequence."""
    seqs = [as_sequence(s, name=f"sequence {i}") for i, s in enumerate(seqs)]
    if n_states < 1:
        raise ValidationError(f"n_states must be >= 1, got {n_states}")
    if not seqs:
        raise ValidationError("init_model: no training sequences")
    d = seqs[0].shape[1]
    for i, s in enumerate(seqs):
        if s.shape[0] < n_states:
            raise ValidationError(f"sequence {i} has {s.shape[0]} steps, fewer than {n_states} states")
        if s.shape[1] != d:
            raise ValidationError(f"sequence {i} has dimension {s.shape[1]}, expected {d}")
    pieces = [np.array_split(s, n_states) for s in seqs]
    means = np.empty((n_states, d))
    variances = np.empty((n_states, d))
    for k in range(n_states):
        pooled = np.concatenate([p[k] for p in pieces], axis=0)
        means[k] = pooled.mean(axis=0)
        variances[k] = np.maximum(pooled.var(axis=0), variance_floor)
    A = np.zeros((n_states, n_states))
    for k in range(n_states - 1):
        A[k, k] = A[k, k + 1] = 0.5
    A[-1, -1] = 1.0
    pi = np.zeros(n_states)
    pi[0] = 1.0
    return HmmModel(pi, A, means, variances)


def _e_step(m, seqs):
    log_pi, log_A = _log(m.pi), _log(m.A)
    n = m.n_states
    total = 0.0
    pi_acc = np.zeros(n)
    trans_acc = np.zeros((n, n))
    gammas = []
    for x in seqs:
        ll, gamma, xi = _posteriors(log_pi, log_A, emission_logprob(m, x))
        total += ll
        gammas.append(gamma)
        pi_acc += gamma[0]
        trans_acc += xi
    return total, pi_acc, trans_acc, gammas


def _m_step(m, seqs, pi_acc, trans_acc, gammas, floor):
    pi = pi_acc / pi_acc.sum()
    A = m.A.copy()
    rows = trans_acc.sum(axis=1)
    visited = rows > 0
    A[visited] = trans_acc[visited] / rows[visited, None]

    X = np.concatenate(seqs, axis=0)
    G = np.concatenate(gammas, axis=0)
    occ = G.sum(axis=0)
    means = m.means.copy()
    variances = m.variances.copy()
    used = occ > 0
    means[used] = (G.T @ X)[used] / occ[used, None]
    for k in np.flatnonzero(used):
        diff = X - means[k]
        variances[k] = (G[:, k] @ (diff * diff)) / occ[k]
    return HmmModel(pi, A, means, np.maximum(variances, floor))


def baum_welch(m0: HmmModel, seqs, cfg: TrainConfig = TrainConfig()):
    """Multi-sequence EM. Returns the trained model and the total log-likelihood per iteration.

    The last trace entry is the log-likelihood of the returned model.
    """
    seqs = [as_sequence(s, name=f"sequence {i}") for i, s in enumerate(seqs)]
    if not seqs:
        raise ValidationError("baum_welch: empty training collection")
    for s in seqs:
        _check_dim(m0, s)
    model = m0
    trace = []
    for _ in range(cfg.max_iters):
        ll, pi_acc, trans_acc, gammas = _e_step(model, seqs)
        trace.append(float(ll))
        if len(trace) > 1 and trace[-1] - trace[-2] < cfg.ll_tol * abs(trace[-2]):
            return model, trace
        model = _m_step(model, seqs, pi_acc, trans_acc, gammas, cfg.variance_floor)
    trace.append(float(_e_step(model, seqs)[0]))
    return model, trace


def train_models(rest_seqs, move_seqs, cfg: TrainConfig = TrainConfig(), n_states: int = 5):
    """Fit one model per class; returns ``(rest_model, move_model)``."""
    models = []
    for label, seqs in ((StateLabel.REST, rest_seqs), (StateLabel.MOVE, move_seqs)):
        seqs = list(seqs)
        if not seqs:
            raise ValidationError(f"no training frame sets labeled {label.value}")
        m0 = init_model(n_states, seqs, cfg.variance_floor)
        models.append(baum_welch(m0, seqs, cfg)[0])
    return tuple(models)


def train_classifier(dataset, extractor, cfg: TrainConfig = TrainConfig(), n_states: int = 5):
    by_label = {StateLabel.REST: [], StateLabel.MOVE: []}
    for fs in dataset:
        by_label[fs.label].append(extractor(fs))
    return train_models(by_label[StateLabel.REST], by_label[StateLabel.MOVE], cfg, n_states)


def classify(models, seq) -> StateLabel:
    """Label of the model with the larger likelihood; exact ties go to Rest."""
    rest, move = models
    if log_likelihood(rest, seq) >= log_likelihood(move, seq):
        return StateLabel.REST
    return StateLabel.MOVE


def save_models(models, path, feature="proposed"):
    rest, move = models
    doc = {"feature": feature, "rest": rest.to_dict(), "move": move.to_dict()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_models(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid model JSON ({exc})") from None
    try:
        return HmmModel.from_dict(doc["rest"]), HmmModel.from_dict(doc["move"])
    except (KeyError, TypeError):
        raise ValidationError(f"{path}: model file needs 'rest' and 'move' entries") from None

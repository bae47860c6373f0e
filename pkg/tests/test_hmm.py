import math

import numpy as np
import pytest
from scipy.stats import norm

from oracles import hmm_loglik_bruteforce, segment_moments
from uwbmotion import hmm
from uwbmotion.core import StateLabel, ValidationError
from uwbmotion.features import extract_feature
from uwbmotion.hmm import HmmModel, TrainConfig, baum_welch, classify, init_model, log_likelihood


def random_model(rng, n, d=1):
    A = np.zeros((n, n))
    for i in range(n - 1):
        stay = rng.uniform(0.05, 0.95)
        A[i, i], A[i, i + 1] = stay, 1 - stay
    A[-1, -1] = 1.0
    pi = np.zeros(n)
    pi[0] = 1.0
    return HmmModel(pi, A, rng.normal(0, 2, (n, d)), rng.uniform(0.2, 3.0, (n, d)))


def assert_left_to_right(m):
    mask = hmm.left_to_right_mask(m.n_states)
    assert np.all(m.A[~mask] == 0)
    assert np.all(m.pi[1:] == 0)
    assert np.all(np.abs(m.A.sum(axis=1) - 1) <= 1e-9)
    assert m.A[-1, -1] == 1.0


class TestModel:
    def test_rejects_skip_transition(self):
        A = np.array([[0.5, 0.25, 0.25], [0, 0.5, 0.5], [0, 0, 1]])
        with pytest.raises(ValidationError, match="left-to-right"):
            HmmModel([1, 0, 0], A, np.zeros((3, 1)), np.ones((3, 1)))

    def test_rejects_late_start(self):
        with pytest.raises(ValidationError):
            HmmModel([0.5, 0.5], [[0.5, 0.5], [0, 1]], np.zeros((2, 1)), np.ones((2, 1)))

    def test_dict_roundtrip_exact(self, rng):
        m = random_model(rng, 5, 2)
        assert HmmModel.from_dict(m.to_dict()) == m


class TestInit:
    def test_constant_sequence(self):
        m = init_model(5, [np.full(10, 3.25)], variance_floor=1e-6)
        assert np.all(m.means == 3.25)
        assert np.all(m.variances == 1e-6)
        assert m.pi.tolist() == [1, 0, 0, 0, 0]
        assert np.all(np.diag(m.A)[:-1] == 0.5) and m.A[-1, -1] == 1

    def test_single_state_pooled(self, rng):
        seqs = [rng.normal(size=(k, 2)) for k in (3, 8, 5)]
        m = init_model(1, seqs)
        pooled = np.concatenate(seqs)
        np.testing.assert_allclose(m.means[0], pooled.mean(axis=0), rtol=1e-12)
        np.testing.assert_allclose(m.variances[0], pooled.var(axis=0), rtol=1e-12)

    def test_segment_moments_oracle(self, rng):
        seqs = [rng.normal(size=(k, 1)) * 4 + 1 for k in (5, 11, 17, 23)]
        m = init_model(5, seqs)
        for k, (mean, var) in enumerate(segment_moments(seqs, 5)):
            np.testing.assert_allclose(m.means[k], mean, rtol=1e-12)
            np.testing.assert_allclose(m.variances[k], np.maximum(var, 1e-6), rtol=1e-12)

    def test_too_short(self):
        with pytest.raises(ValidationError, match="sequence 1"):
            init_model(5, [np.zeros(6), np.zeros(4)])


class TestLikelihood:
    def test_standard_normal_zeros(self):
        m = HmmModel([1.0], [[1.0]], [[0.0]], [[1.0]])
        T = 13
        assert log_likelihood(m, np.zeros(T)) == pytest.approx(T * math.log(1 / math.sqrt(2 * math.pi)), abs=1e-12)

    def test_single_step(self, rng):
        m = random_model(rng, 4)
        x = 0.7
        expected = math.log(m.pi[0]) + norm.logpdf(x, m.means[0, 0], math.sqrt(m.variances[0, 0]))
        assert log_likelihood(m, [x]) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("n,L,d", [(1, 4, 1), (2, 6, 1), (3, 5, 2), (5, 8, 1), (5, 3, 2)])
    def test_bruteforce(self, rng, n, L, d):
        m = random_model(rng, n, d)
        seq = rng.normal(0, 2, (L, d))
        expected = hmm_loglik_bruteforce(m.pi, m.A, m.means, m.variances, seq)
        assert abs(log_likelihood(m, seq) - expected) <= 1e-9

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValidationError, match="dimension"):
            log_likelihood(random_model(rng, 3, 2), np.zeros((4, 1)))

    def test_finite_far_from_means(self):
        m = HmmModel([1.0, 0.0], [[0.5, 0.5], [0, 1]], [[0.0], [1.0]], [[1e-6], [1e-6]])
        assert np.isfinite(log_likelihood(m, np.full(20, 1e4)))


class TestBaumWelch:
    def test_converged_fixed_point(self):
        seq = [np.full(10, 2.0)]
        cfg = TrainConfig()
        _, trace = baum_welch(init_model(5, seq), seq, cfg)
        assert abs(trace[1] - trace[0]) < cfg.ll_tol * abs(trace[0])

    @pytest.mark.parametrize("seed", range(8))
    def test_monotone_and_structure(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        lengths = rng.integers(n, 30, size=4)
        seqs = [rng.normal(0, 1, (L, 1)) + np.linspace(0, 3, L)[:, None] for L in lengths]
        cfg = TrainConfig(max_iters=30, ll_tol=1e-12)
        m, trace = baum_welch(init_model(n, seqs), seqs, cfg)
        assert np.all(np.diff(trace) >= -1e-8)
        assert_left_to_right(m)
        assert np.all(m.variances >= cfg.variance_floor)

    def test_single_state_closed_form(self, rng):
        seqs = [np.concatenate([rng.normal(-5, 1, 20), rng.normal(5, 1, 20)])[:, None], rng.normal(5, 1, (15, 1))]
        m0 = init_model(1, seqs)
        m, _ = baum_welch(m0, seqs, TrainConfig(max_iters=1))
        pooled = np.concatenate(seqs)
        np.testing.assert_allclose(m.means[0], pooled.mean(axis=0), rtol=1e-12)
        np.testing.assert_allclose(m.variances[0], pooled.var(axis=0), rtol=1e-10)

    def test_variance_floor_respected(self):
        seqs = [np.full(12, 1.0), np.full(12, 1.0)]
        cfg = TrainConfig(variance_floor=0.01)
        m, _ = baum_welch(init_model(3, seqs, 0.01), seqs, cfg)
        assert np.all(m.variances >= 0.01)

    def test_length_one_sequences(self, rng):
        seqs = [rng.normal(size=(1, 1)) for _ in range(3)]
        m, trace = baum_welch(init_model(1, seqs), seqs)
        assert np.isfinite(trace).all()

    def test_empty(self, rng):
        with pytest.raises(ValidationError):
            baum_welch(random_model(rng, 2), [])

    def test_deterministic(self, rng):
        seqs = [rng.normal(size=(20, 1)) for _ in range(5)]
        a = baum_welch(init_model(5, seqs), seqs)
        b = baum_welch(init_model(5, seqs), seqs)
        assert a[0] == b[0] and a[1] == b[1]


class TestClassifier:
    def test_twenty_per_class(self, monkeypatch):
        from uwbmotion.synth import SimConfig, generate_dataset

        ds = generate_dataset(SimConfig(T=80, move_window=(24, 56), seed=2), 20)
        calls = []
        real = hmm.baum_welch
        monkeypatch.setattr(hmm, "baum_welch", lambda m0, seqs, cfg: calls.append(len(seqs)) or real(m0, seqs, cfg))
        rest, move = hmm.train_classifier(ds, extract_feature, TrainConfig())
        assert calls == [20, 20]
        assert rest.n_states == move.n_states == 5

    def test_one_per_class(self, small_noiseless):
        sub = type(small_noiseless)((small_noiseless.frame_sets[0], small_noiseless.frame_sets[-1]))
        rest, move = hmm.train_classifier(sub, extract_feature)
        assert_left_to_right(rest) and assert_left_to_right(move)

    def test_missing_class(self, small_noiseless):
        sub = type(small_noiseless)(small_noiseless.frame_sets[:3])
        with pytest.raises(ValidationError, match="Move"):
            hmm.train_classifier(sub, extract_feature)

    def test_deterministic(self, small_noiseless):
        a = hmm.train_classifier(small_noiseless, extract_feature)
        b = hmm.train_classifier(small_noiseless, extract_feature)
        assert a[0] == b[0] and a[1] == b[1]

    def test_tie_goes_to_rest(self, rng):
        m = random_model(rng, 5)
        assert classify((m, m), rng.normal(size=10)) is StateLabel.REST

    def test_far_separated_models(self, rng):
        rest = HmmModel([1.0, 0.0], [[0.6, 0.4], [0, 1]], [[0.0], [0.5]], [[1.0], [1.0]])
        move = HmmModel([1.0, 0.0], [[0.6, 0.4], [0, 1]], [[10.0], [10.5]], [[1.0], [1.0]])
        for _ in range(20):
            states = np.minimum(np.cumsum(rng.random(15) < 0.4), 1)
            seq_move = rng.normal(move.means[states, 0], 1.0)
            seq_rest = rng.normal(rest.means[states, 0], 1.0)
            assert classify((rest, move), seq_move) is StateLabel.MOVE
            assert classify((rest, move), seq_rest) is StateLabel.REST

    def test_resubstitution_noiseless(self, small_noiseless):
        models = hmm.train_classifier(small_noiseless, extract_feature)
        for fs in small_noiseless:
            assert classify(models, extract_feature(fs)) is fs.label

    def test_save_load(self, tmp_path, rng):
        models = (random_model(rng, 5), random_model(rng, 5))
        hmm.save_models(models, tmp_path / "m.json")
        back = hmm.load_models(tmp_path / "m.json")
        assert back[0] == models[0] and back[1] == models[1]

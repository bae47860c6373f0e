import numpy as np
import pytest
from hypothesis import given, strategies as st
import hypothesis.extra.numpy as hnp

from oracles import dtw_bruteforce, monotone_paths
from uwbmotion.core import StateLabel, ValidationError
from uwbmotion.dtw import apply_zscore, fit_zscore, mddtw_distance, nn_classify, zscore_per_dim


def seq_pair(max_len=6, max_d=2):
    @st.composite
    def build(draw):
        d = draw(st.integers(1, max_d))
        elems = st.floats(-100, 100)
        a = draw(hnp.arrays(float, (draw(st.integers(1, max_len)), d), elements=elems))
        b = draw(hnp.arrays(float, (draw(st.integers(1, max_len)), d), elements=elems))
        return a, b
    return build()


def test_path_enumerator_counts():
    # Delannoy numbers D(m, n) count the three-move lattice paths
    assert len(monotone_paths(1, 1)) == 1
    assert len(monotone_paths(2, 2)) == 3
    assert len(monotone_paths(3, 3)) == 13
    assert len(monotone_paths(6, 6)) == 1683


def test_identical_zero(rng):
    a = rng.normal(size=(9, 2))
    assert mddtw_distance(a, a) == 0.0


def test_single_pair_345():
    assert mddtw_distance([[0.0, 0.0]], [[3.0, 4.0]]) == 5.0


def test_known_warp():
    # b repeats a's middle value; warping absorbs the repeat at zero cost
    assert mddtw_distance([0.0, 1.0, 2.0], [0.0, 1.0, 1.0, 2.0]) == 0.0
    assert mddtw_distance([0.0, 2.0], [1.0]) == 2.0


@given(seq_pair())
def test_matches_bruteforce_exactly(pair):
    a, b = pair
    assert mddtw_distance(a, b) == dtw_bruteforce(a, b)


@given(seq_pair(max_len=12, max_d=3))
def test_symmetry_and_nonnegativity(pair):
    a, b = pair
    d = mddtw_distance(a, b)
    assert d >= 0
    assert d == mddtw_distance(b, a)


def test_dimension_mismatch():
    with pytest.raises(ValidationError, match="dimension"):
        mddtw_distance(np.zeros((3, 1)), np.zeros((3, 2)))


def test_empty():
    with pytest.raises(ValidationError):
        mddtw_distance(np.zeros((0, 1)), np.zeros((3, 1)))


class TestZscore:
    def test_two_values(self):
        out = zscore_per_dim([np.array([[1.0]]), np.array([[3.0]])])
        assert [o[0, 0] for o in out] == [-1.0, 1.0]

    def test_constant_dimension_unchanged(self):
        seqs = [np.array([[5.0, 1.0], [5.0, 2.0]]), np.array([[5.0, 4.0]])]
        out = zscore_per_dim(seqs)
        assert all(np.all(o[:, 0] == 5.0) for o in out)

    def test_pooled_moments(self, rng):
        seqs = [rng.normal(3, 7, size=(rng.integers(1, 30), 2)) for _ in range(8)]
        pooled = np.concatenate(zscore_per_dim(seqs))
        np.testing.assert_allclose(pooled.mean(axis=0), 0, atol=1e-9)
        np.testing.assert_allclose(pooled.std(axis=0), 1, atol=1e-9)

    def test_apply_uses_given_statistics(self):
        mean, std = fit_zscore([np.array([[0.0], [2.0]])])
        assert apply_zscore(np.array([[4.0]]), mean, std)[0, 0] == 3.0


class TestNearestNeighbour:
    def test_exact_match_wins(self, rng):
        train = [(rng.normal(size=(6, 2)), StateLabel.REST) for _ in range(4)]
        target = rng.normal(size=(6, 2))
        train.insert(2, (target.copy(), StateLabel.MOVE))
        assert nn_classify(target, train) is StateLabel.MOVE

    def test_single_training_item(self):
        assert nn_classify(np.zeros((3, 1)), [(np.full((2, 1), 1e6), StateLabel.MOVE)]) is StateLabel.MOVE

    def test_tie_goes_to_earliest(self):
        train = [(np.array([[1.0]]), StateLabel.MOVE), (np.array([[-1.0]]), StateLabel.REST)]
        assert nn_classify(np.array([[0.0]]), train) is StateLabel.MOVE

    def test_empty_training(self):
        with pytest.raises(ValidationError):
            nn_classify(np.zeros((2, 1)), [])

    def test_separable_tracks(self):
        t = np.arange(60)
        bump = lambda n: np.where((t >= 20) & (t < 40), 40 * np.sin(np.pi * (t - 20) / 20), 0)[:n]  # noqa: E731
        rest = [np.zeros((n, 2)) for n in (50, 55, 60)]
        move = [np.stack([bump(n), 0.5 * bump(n)], axis=1) for n in (50, 55, 60)]
        train = [(s, StateLabel.REST) for s in rest[:2]] + [(s, StateLabel.MOVE) for s in move[:2]]
        assert nn_classify(rest[2], train) is StateLabel.REST
        assert nn_classify(move[2], train) is StateLabel.MOVE

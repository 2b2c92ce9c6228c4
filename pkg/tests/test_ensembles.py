import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import blobs
from driftlab.classifiers import HDDT, GaussianNB, KNeighbors
from driftlab.ensembles import (
    AWE,
    HDWE,
    SEA,
    WeightedMember,
    awe_member_weight,
    fold_slices,
    hd_weight,
    hdwe_candidate_weight,
    make_ensemble,
)
from driftlab.errors import InvalidInputError, NotFittedError
from reference import cv_hd, hdwe_reference, reference_predict


class Fixed:
    """Stub member returning the same support row for every query."""

    def __init__(self, p1):
        self.p1 = p1

    def predict_support(self, X):
        return np.tile([1.0 - self.p1, self.p1], (len(X), 1))

    def predict(self, X):
        return (self.predict_support(X)[:, 1] > 0.5).astype(int)


class TrueSupport:
    """Gives support ``p`` to the true class, identified by the sign of x[0]."""

    def __init__(self, p):
        self.p = p

    def predict_support(self, X):
        pos = np.asarray(X)[:, 0] > 0
        p1 = np.where(pos, self.p, 1.0 - self.p)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        s = self.predict_support(X)
        return (s[:, 1] > s[:, 0]).astype(int)


def signed_chunk(n=40, n_pos=10):
    y = np.zeros(n, dtype=int)
    y[:n_pos] = 1
    X = np.where(y == 1, 1.0, -1.0)[:, None] * np.linspace(1, 2, n)[:, None]
    return X, y


def with_pool(ens, members):
    ens.pool = [WeightedMember(clf, w, i, i) for i, (clf, w) in enumerate(members)]
    ens._next_uid = len(members)
    return ens


class TestWeights:
    def test_awe_examples(self):
        X, y = signed_chunk()
        assert awe_member_weight(TrueSupport(1.0), X, y) == 0.25
        assert awe_member_weight(TrueSupport(0.5), X, y) == 0.0
        assert awe_member_weight(TrueSupport(0.8), X, y) == pytest.approx(0.21, abs=1e-12)

    def test_hd_candidate_perfect_and_constant(self, rng):
        X = np.r_[np.linspace(-5, -1, 50), np.linspace(1, 5, 50)][rng.permutation(100)][:, None]
        y = (X[:, 0] > 0).astype(int)
        assert hdwe_candidate_weight(X, y, 5, GaussianNB()) == pytest.approx(math.sqrt(2), abs=1e-12)
        noise = rng.standard_normal((100, 1))
        # single-class folds train constant models: TPR = FPR
        y_const = np.r_[np.zeros(100, dtype=int)]
        y_const[::10] = 1
        clf = KNeighbors(k=50)
        assert hdwe_candidate_weight(noise, y_const, 5, clf) == 0.0

    def test_candidate_weight_matches_fold_loop(self):
        from driftlab.streams import StreamConfig, generate_stream
        X, y = generate_stream(StreamConfig(n_chunks=1, chunk_size=500, seed=3, n_drifts=0)).chunks[0]
        got = hdwe_candidate_weight(X, y, 5, GaussianNB())
        assert got == pytest.approx(cv_hd(GaussianNB, X, y, 5), abs=1e-12)

    def test_degraded_small_chunk(self):
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([0, 1, 1])
        w = hdwe_candidate_weight(X, y, 5, GaussianNB())
        assert 0.0 <= w <= math.sqrt(2)
        assert hdwe_candidate_weight(X[:1], y[:1], 5, GaussianNB()) == 0.0

    def test_fold_slices(self):
        sl = fold_slices(12, 5)
        assert [s.stop - s.start for s in sl] == [3, 3, 2, 2, 2]
        assert sl[0].start == 0 and sl[-1].stop == 12
        assert all(a.stop == b.start for a, b in zip(sl, sl[1:]))

    def test_skew_insensitive_member_weight(self, rng):
        X, y = blobs(rng, n=200, d=3, sep=1.0, pos_frac=0.5)
        clf = GaussianNB().fit(X, y)
        pos, neg = X[y == 1][:10], X[y == 0][:10]
        even = (np.vstack([pos, neg]), np.r_[np.ones(10, int), np.zeros(10, int)])
        skewed = (np.vstack([pos, np.repeat(neg, 99, axis=0)]), np.r_[np.ones(10, int), np.zeros(990, int)])
        assert hd_weight(clf, *even) == hd_weight(clf, *skewed)


class TestProcessChunk:
    def test_first_chunk(self, small_stream):
        ens = HDWE(GaussianNB())
        assert ens.pool == []
        ens.process_chunk(*small_stream[0])
        assert len(ens.pool) == 1

    @pytest.mark.parametrize("cls", [HDWE, AWE, SEA])
    def test_pool_bounded_and_prunes_argmin(self, cls, small_stream):
        ens = cls(GaussianNB(), ensemble_size=4)
        for i, chunk in enumerate(small_stream):
            ens.process_chunk(*chunk)
            assert len(ens.pool) == min(i + 1, 4)
        assert len(ens.prune_history) == len(small_stream) - 4
        for ev in ens.prune_history:
            assert ev.removed_weight == min(ev.weights)

    def test_hdwe_weights_in_range(self, small_stream):
        ens = HDWE(HDDT(max_depth=4), ensemble_size=3)
        for chunk in small_stream:
            ens.process_chunk(*chunk)
            assert all(0.0 <= w <= math.sqrt(2) for w in ens.weights)

    def test_matches_reference_interpreter(self, small_stream):
        chunks = [tuple(c) for c in small_stream]
        trace, ref_pool = hdwe_reference(chunks, GaussianNB, ensemble_size=10, folds=5)
        ens = HDWE(GaussianNB(), ensemble_size=10, n_folds=5)
        for i, chunk in enumerate(chunks):
            ens.process_chunk(*chunk)
            assert [m.born for m in ens.pool] == trace[i]["born"]
            assert np.allclose(ens.weights, trace[i]["weights"], rtol=0, atol=1e-12)
        X = small_stream[-1].X
        assert np.array_equal(ens.predict(X), reference_predict(ref_pool, X))

    def test_tie_removes_oldest(self):
        X, y = signed_chunk()
        ens = with_pool(HDWE(GaussianNB(), ensemble_size=2), [(Fixed(0.0), 0.0), (Fixed(0.0), 0.0)])
        ens.process_chunk(X, y)
        assert [m.uid for m in ens.pool] == [1, 2]
        assert ens.prune_history[0].removed_uid == 0

    def test_sea_drops_worst_of_pool_and_candidate(self):
        X, y = signed_chunk()
        ens = with_pool(SEA(GaussianNB(), ensemble_size=2), [(TrueSupport(0.9), 0), (Fixed(0.0), 0)])
        ens.process_chunk(X, y)
        assert len(ens.pool) == 2
        assert isinstance(ens.pool[0].classifier, TrueSupport)
        assert ens.weights[0] == 1.0 and ens.prune_history[0].removed_weight == 0.75

    def test_awe_negative_member_retained(self):
        X, y = signed_chunk()
        ens = with_pool(AWE(GaussianNB(), ensemble_size=5), [(TrueSupport(0.1), 0.0)])
        ens.process_chunk(X, y)
        assert len(ens.pool) == 2 and ens.weights[0] == pytest.approx(0.25 - 0.81)

    def test_single_class_chunk_does_not_abort(self, rng):
        X = rng.standard_normal((50, 3))
        for cls in (HDWE, AWE, SEA):
            ens = cls(GaussianNB())
            ens.process_chunk(X, np.zeros(50, dtype=int))
            ens.process_chunk(X, np.zeros(50, dtype=int))
            assert len(ens.pool) == 2

    def test_row_count_bound(self, small_stream):
        es, folds = 5, 5
        ens = HDWE(GaussianNB(), ensemble_size=es, n_folds=folds)
        for chunk in small_stream:
            before = ens.rows_trained + ens.rows_scored
            ens.process_chunk(*chunk)
            assert ens.rows_trained + ens.rows_scored - before <= (es + folds + 1) * len(chunk)

    def test_deterministic(self, small_stream):
        def run():
            ens = HDWE(HDDT(max_depth=5), ensemble_size=4)
            out = []
            for chunk in small_stream:
                if ens.pool:
                    out.append(ens.predict(chunk.X).tobytes())
                ens.process_chunk(*chunk)
                out.append(np.array(ens.weights).tobytes())
            return out
        assert run() == run()

    def test_bad_params(self):
        with pytest.raises(InvalidInputError):
            HDWE(GaussianNB(), ensemble_size=0)
        with pytest.raises(InvalidInputError):
            HDWE(GaussianNB(), n_folds=1)
        with pytest.raises(InvalidInputError):
            HDWE(GaussianNB()).process_chunk(np.empty((0, 2)), [])


class TestPredict:
    Q = np.zeros((3, 1))

    def test_empty_pool(self):
        with pytest.raises(NotFittedError):
            HDWE(GaussianNB()).predict(self.Q)

    def test_single_member(self):
        ens = with_pool(HDWE(GaussianNB()), [(Fixed(0.7), 0.3)])
        assert np.array_equal(ens.predict(self.Q), [1, 1, 1])

    def test_zero_weight_member_ignored(self):
        ens = with_pool(HDWE(GaussianNB()), [(Fixed(0.2), 0.4), (Fixed(1.0), 0.0)])
        assert np.array_equal(ens.predict(self.Q), [0, 0, 0])

    def test_weighted_average(self):
        ens = with_pool(HDWE(GaussianNB()), [(Fixed(0.9), 0.2), (Fixed(0.1), 0.3), (Fixed(0.6), 0.5)])
        p1 = (0.2 * 0.9 + 0.3 * 0.1 + 0.5 * 0.6) / 1.0
        assert ens.predict_support(self.Q)[0] == pytest.approx([1 - p1, p1], abs=1e-15)

    def test_all_zero_weights_fall_back_to_mean(self):
        ens = with_pool(AWE(GaussianNB()), [(Fixed(0.9), -0.1), (Fixed(0.5), 0.0)])
        assert ens.predict_support(self.Q)[0] == pytest.approx([0.3, 0.7])

    def test_tie_goes_to_class_zero(self):
        ens = with_pool(HDWE(GaussianNB()), [(Fixed(0.5), 1.0)])
        assert np.array_equal(ens.predict(self.Q), [0, 0, 0])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1.4)), min_size=1, max_size=6),
           st.floats(0.01, 100))
    def test_weight_scale_invariance(self, members, c):
        a = with_pool(HDWE(GaussianNB()), [(Fixed(p), w) for p, w in members])
        b = with_pool(HDWE(GaussianNB()), [(Fixed(p), w * c) for p, w in members])
        sa, sb = a.predict_support(self.Q), b.predict_support(self.Q)
        assert np.allclose(sa, sb, atol=1e-12)
        # argmax agrees unless the support is a near-exact tie
        if abs(sa[0, 1] - 0.5) > 1e-9:
            assert np.array_equal(a.predict(self.Q), b.predict(self.Q))


def test_make_ensemble():
    ens = make_ensemble("hdwe", GaussianNB(), ensemble_size=3, n_folds=4)
    assert isinstance(ens, HDWE) and ens.ensemble_size == 3 and ens.n_folds == 4
    with pytest.raises(InvalidInputError):
        make_ensemble("KUE", GaussianNB())

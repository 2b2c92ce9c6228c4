"""Chunk-based weighted ensembles: HDWE, AWE and SEA.

All three share one state machine. Each incoming chunk trains a candidate on
the full chunk, scores the candidate and the current pool, adds the candidate
and prunes back to ``ensemble_size`` members. They differ only in the weight:

* HDWE: Hellinger distance between TPR and FPR (candidate: K-fold average).
* AWE: ``0.25 - MSE`` of the support given to the true class (candidate:
  K-fold average).
* SEA: accuracy on the current chunk; the worst of pool + candidate goes.

Stored weights are never normalized. Negative AWE weights are kept in the
pool for later re-weighting but do not vote.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import BinaryClassifier, support_to_labels
from .errors import InvalidInputError, NotFittedError
from .metrics import confusion_matrix, hellinger_distance

#: Mean squared error of a random two-class classifier.
MSE_RANDOM = 0.25


@dataclass
class WeightedMember:
    classifier: BinaryClassifier
    weight: float
    born: int
    uid: int


@dataclass
class PruneEvent:
    chunk: int
    removed_uid: int
    removed_weight: float
    weights: list[float] = field(default_factory=list)


def _as_chunk(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).ravel().astype(np.int64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] == 0:
        raise InvalidInputError("chunk must contain at least one instance")
    if X.shape[0] != y.shape[0]:
        raise InvalidInputError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    return X, y


def hd_weight(classifier, X, y) -> float:
    """Hellinger distance of a trained classifier's (TPR, FPR) on labelled data."""
    cm = confusion_matrix(y, classifier.predict(X))
    return hellinger_distance(cm.tpr, cm.fpr)


def awe_member_weight(classifier, X, y) -> float:
    """``MSE_r - MSE_k`` where MSE_k uses the support assigned to the true class."""
    X, y = _as_chunk(X, y)
    support = classifier.predict_support(X)
    true_support = support[np.arange(len(y)), y]
    mse = float(np.mean((1.0 - true_support) ** 2))
    return MSE_RANDOM - mse


def fold_slices(n, folds):
    """Contiguous, unshuffled fold boundaries; the first ``n % folds`` folds get one extra row."""
    sizes = np.full(folds, n // folds)
    sizes[: n % folds] += 1
    stops = np.cumsum(sizes)
    return [slice(int(stop - size), int(stop)) for size, stop in zip(sizes, stops)]


def cross_validated_weight(X, y, folds, base, scorer, counter=None):
    """Average held-out score of fresh ``base`` clones over contiguous folds.

    With fewer rows than folds, a single split (first half trains, second
    half scores) is used instead; a one-row chunk scores 0.
    """
    X, y = _as_chunk(X, y)
    n = len(y)
    if folds < 2:
        raise InvalidInputError(f"folds must be >= 2, got {folds}")
    if n >= folds:
        splits = fold_slices(n, folds)
    elif n >= 2:
        splits = [slice(n // 2, n)]
    else:
        return 0.0
    scores = []
    for test in splits:
        train = np.ones(n, dtype=bool)
        train[test] = False
        clf = base.clone().fit(X[train], y[train])
        scores.append(scorer(clf, X[test], y[test]))
        if counter is not None:
            counter(int(train.sum()), test.stop - test.start)
    return float(np.mean(scores))


def hdwe_candidate_weight(X, y, folds, base) -> float:
    return cross_validated_weight(X, y, folds, base, hd_weight)


class ChunkEnsemble:
    """Shared pool management for chunk-based ensembles.

    Parameters
    ----------
    base_estimator : BinaryClassifier
        Prototype cloned for every new member.
    ensemble_size : int
        Maximum pool size after each chunk.
    n_folds : int
        Folds used to estimate the candidate's weight (HDWE, AWE).
    """

    name = "ensemble"

    def __init__(self, base_estimator, ensemble_size=10, n_folds=5):
        if ensemble_size < 1:
            raise InvalidInputError("ensemble_size must be >= 1")
        if n_folds < 2:
            raise InvalidInputError("n_folds must be >= 2")
        self.base_estimator = base_estimator
        self.ensemble_size = ensemble_size
        self.n_folds = n_folds
        self.pool: list[WeightedMember] = []
        self.n_chunks_seen = 0
        self.prune_history: list[PruneEvent] = []
        self.rows_trained = 0
        self.rows_scored = 0
        self._next_uid = 0

    @property
    def weights(self) -> list[float]:
        return [m.weight for m in self.pool]

    def _count(self, trained, scored):
        self.rows_trained += trained
        self.rows_scored += scored

    def _new_member(self, X, y, weight=0.0):
        clf = self.base_estimator.clone().fit(X, y)
        self._count(len(y), 0)
        member = WeightedMember(clf, weight, self.n_chunks_seen, self._next_uid)
        self._next_uid += 1
        return member

    def _candidate_weight(self, candidate, X, y):
        return cross_validated_weight(
            X, y, self.n_folds, self.base_estimator, self._scorer, counter=self._count
        )

    def _scorer(self, clf, X, y):
        raise NotImplementedError

    def _remove_worst(self):
        weights = self.weights
        worst = int(np.argmin(weights))  # first index = oldest among ties
        removed = self.pool.pop(worst)
        self.prune_history.append(
            PruneEvent(self.n_chunks_seen, removed.uid, removed.weight, weights)
        )

    def process_chunk(self, X, y):
        """Learn from one labelled chunk and update the pool."""
        X, y = _as_chunk(X, y)
        candidate = self._new_member(X, y)
        candidate.weight = self._candidate_weight(candidate, X, y)
        for member in self.pool:
            member.weight = self._scorer(member.classifier, X, y)
            self._count(0, len(y))
        self.pool.append(candidate)
        if len(self.pool) > self.ensemble_size:
            self._remove_worst()
        self.n_chunks_seen += 1
        return self

    partial_fit = process_chunk

    def predict_support(self, X) -> np.ndarray:
        """Weighted average of member supports, negative weights clamped to 0.

        If every clamped weight is 0 the members vote with equal weight.
        """
        if not self.pool:
            raise NotFittedError(f"{self.name} has no members yet")
        X = np.asarray(X, dtype=float)
        w = np.maximum(np.array(self.weights, dtype=float), 0.0)
        if not w.sum() > 0.0:
            w = np.ones_like(w)
        total = np.zeros((len(X), 2))
        for weight, member in zip(w, self.pool):
            if weight > 0.0:
                total += weight * member.classifier.predict_support(X)
        return total / total.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        return support_to_labels(self.predict_support(X))

    def __repr__(self):
        return (f"{type(self).__name__}(base_estimator={self.base_estimator!r}, "
                f"ensemble_size={self.ensemble_size}, n_folds={self.n_folds})")


class HDWE(ChunkEnsemble):
    """Hellinger Distance Weighted Ensemble."""

    name = "HDWE"

    def _scorer(self, clf, X, y):
        return hd_weight(clf, X, y)


class AWE(ChunkEnsemble):
    """Accuracy Weighted Ensemble with the two-class ``MSE_r = 0.25``."""

    name = "AWE"

    def _scorer(self, clf, X, y):
        return awe_member_weight(clf, X, y)


class SEA(ChunkEnsemble):
    """Streaming Ensemble Algorithm with unconditional worst-member replacement."""

    name = "SEA"

    def _scorer(self, clf, X, y):
        return float(np.mean(clf.predict(X) == y))

    def _candidate_weight(self, candidate, X, y):
        # scored on its own training chunk, like every other member
        self._count(0, len(y))
        return self._scorer(candidate.classifier, X, y)


ENSEMBLES = {"HDWE": HDWE, "AWE": AWE, "SEA": SEA}


def make_ensemble(kind, base_estimator, ensemble_size=10, n_folds=5) -> ChunkEnsemble:
    try:
        cls = ENSEMBLES[kind.upper()]
    except KeyError:
        raise InvalidInputError(f"unknown ensemble {kind!r}; expected one of {sorted(ENSEMBLES)}") from None
    return cls(base_estimator, ensemble_size=ensemble_size, n_folds=n_folds)

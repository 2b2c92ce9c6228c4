"""Binary decision trees grown greedily on numeric features.

Two split criteria are available: the Hellinger distance between the class
conditional branch distributions (HDDT, skew insensitive) and the Gini
impurity decrease (CART). Leaves carry Laplace-smoothed class estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import InvalidInputError
from .base import BinaryClassifier, check_xy

CRITERIA = ("hellinger", "gini")


@dataclass
class TreeNode:
    """A split node (``feature`` set) or a leaf (``feature`` is None).

    Samples with ``x[feature] <= threshold`` go left.
    """

    counts: tuple[int, int]
    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def proba(self) -> tuple[float, float]:
        n0, n1 = self.counts
        total = n0 + n1
        return ((n0 + 1.0) / (total + 2.0), (n1 + 1.0) / (total + 2.0))

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def n_leaves(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.n_leaves() + self.right.n_leaves()


def hddt_split_score(left_pos, left_neg, right_pos, right_neg):
    """Hellinger distance of a binary split.

    Compares the branch distribution of the positive class with that of the
    negative class; only within-class rates enter, never the class priors.
    Works elementwise on arrays.
    """
    lp, ln, rp, rn = (np.asarray(v, dtype=float) for v in (left_pos, left_neg, right_pos, right_neg))
    P = lp + rp
    N = ln + rn
    if np.any(P <= 0) or np.any(N <= 0):
        raise InvalidInputError("both classes must be present at the node")
    a = np.sqrt(lp / P) - np.sqrt(ln / N)
    b = np.sqrt(rp / P) - np.sqrt(rn / N)
    out = np.sqrt(a * a + b * b)
    return float(out) if out.ndim == 0 else out


def _gini(pos, n):
    p = np.divide(pos, n, out=np.zeros_like(pos, dtype=float), where=n > 0)
    return 2.0 * p * (1.0 - p)


def gini_gain(left_pos, left_neg, right_pos, right_neg):
    lp, ln, rp, rn = (np.asarray(v, dtype=float) for v in (left_pos, left_neg, right_pos, right_neg))
    nl = lp + ln
    nr = rp + rn
    n = nl + nr
    parent = _gini(lp + rp, n)
    return parent - (nl / n) * _gini(lp, nl) - (nr / n) * _gini(rp, nr)


def candidate_splits(column, max_thresholds=64):
    """Sorted-order split positions and thresholds for one feature.

    Returns ``(order, cut, thresholds)``: ``order`` sorts the column, a cut at
    ``cut[i]`` puts ``order[:cut[i] + 1]`` on the left. Thresholds are the
    midpoints between consecutive distinct values; when there are more than
    ``max_thresholds`` of them, the ones closest to evenly spaced sample
    quantiles are kept.
    """
    order = np.argsort(column, kind="stable")
    xs = column[order]
    cut = np.flatnonzero(xs[1:] > xs[:-1])
    if max_thresholds and cut.size > max_thresholds:
        n = xs.size
        left_sizes = cut + 1
        targets = n * np.arange(1, max_thresholds + 1) / (max_thresholds + 1)
        idx = np.clip(np.searchsorted(left_sizes, targets), 1, cut.size - 1)
        lower = idx - 1
        closer_lower = np.abs(left_sizes[lower] - targets) <= np.abs(left_sizes[idx] - targets)
        cut = cut[np.unique(np.where(closer_lower, lower, idx))]
    lo = xs[cut]
    hi = xs[cut + 1]
    mid = (lo + hi) / 2.0
    # adjacent floats: the midpoint may round up onto hi
    thresholds = np.where(mid < hi, mid, lo)
    return order, cut, thresholds


def best_split(X, y, criterion="hellinger", max_thresholds=64):
    """Exhaustive search for the (feature, threshold) maximizing the criterion.

    Ties go to the lowest feature index, then the lowest threshold. Returns
    ``(feature, threshold, score)``; feature is None when no split is valid.
    """
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    best = (None, None, -math.inf)
    for j in range(X.shape[1]):
        order, cut, thresholds = candidate_splits(X[:, j], max_thresholds)
        if cut.size == 0:
            continue
        cum_pos = np.cumsum(y[order])
        lp = cum_pos[cut]
        ln = cut + 1 - lp
        rp = n_pos - lp
        rn = n_neg - ln
        if criterion == "hellinger":
            scores = hddt_split_score(lp, ln, rp, rn)
        else:
            scores = gini_gain(lp, ln, rp, rn)
        i = int(np.argmax(scores))
        if scores[i] > best[2]:
            best = (j, float(thresholds[i]), float(scores[i]))
    return best


def fit_tree(X, y, criterion="hellinger", max_depth=12, min_samples_split=2, max_thresholds=64):
    """Grow an unpruned binary tree.

    Growth stops at ``max_depth``, below ``min_samples_split`` samples, at
    pure nodes and when the best split has no positive criterion value.
    """
    if criterion not in CRITERIA:
        raise InvalidInputError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    X, y = check_xy(X, y)
    return _grow(X, y, criterion, max_depth, min_samples_split, max_thresholds, 0)


def _grow(X, y, criterion, max_depth, min_samples_split, max_thresholds, depth):
    n_pos = int(y.sum())
    node = TreeNode(counts=(y.size - n_pos, n_pos))
    if depth >= max_depth or y.size < min_samples_split or n_pos in (0, y.size):
        return node
    feature, threshold, gain = best_split(X, y, criterion, max_thresholds)
    if feature is None or not gain > 0.0:
        return node
    mask = X[:, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    args = (criterion, max_depth, min_samples_split, max_thresholds, depth + 1)
    node.left = _grow(X[mask], y[mask], *args)
    node.right = _grow(X[~mask], y[~mask], *args)
    return node


def _flatten(root):
    feature, threshold, left, right, proba = [], [], [], [], []

    def visit(node):
        i = len(feature)
        feature.append(-1 if node.is_leaf else node.feature)
        threshold.append(0.0 if node.is_leaf else node.threshold)
        left.append(-1)
        right.append(-1)
        proba.append(node.proba)
        if not node.is_leaf:
            left[i] = visit(node.left)
            right[i] = visit(node.right)
        return i

    visit(root)
    return (np.array(feature), np.array(threshold), np.array(left),
            np.array(right), np.array(proba, dtype=float))


class DecisionTree(BinaryClassifier):
    """Tree classifier; ``criterion="hellinger"`` gives HDDT, ``"gini"`` CART."""

    def __init__(self, criterion="hellinger", max_depth=12, min_samples_split=2, max_thresholds=64):
        super().__init__()
        if criterion not in CRITERIA:
            raise InvalidInputError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_thresholds = max_thresholds

    def get_params(self):
        return {
            "criterion": self.criterion,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "max_thresholds": self.max_thresholds,
        }

    def _fit(self, X, y):
        self.root_ = _grow(X, y, self.criterion, self.max_depth,
                           self.min_samples_split, self.max_thresholds, 0)
        self._arrays = _flatten(self.root_)

    def _support(self, X):
        feature, threshold, left, right, proba = self._arrays
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        active = feature[node] >= 0
        while active.any():
            idx = rows[active]
            cur = node[idx]
            go_left = X[idx, feature[cur]] <= threshold[cur]
            node[idx] = np.where(go_left, left[cur], right[cur])
            active = feature[node] >= 0
        return proba[node].copy()


def HDDT(**params):
    return DecisionTree(criterion="hellinger", **params)


def CART(**params):
    return DecisionTree(criterion="gini", **params)

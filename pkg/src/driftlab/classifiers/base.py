from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError, NotFittedError


def check_xy(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).ravel()
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] == 0:
        raise InvalidInputError("cannot fit on an empty training set")
    if X.shape[0] != y.shape[0]:
        raise InvalidInputError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if not np.isin(y, (0, 1)).all():
        raise InvalidInputError("labels must be in {0, 1}")
    return X, y.astype(np.int64)


class BinaryClassifier:
    """Common surface of the batch base learners.

    Subclasses implement ``_fit`` and ``_support``. Training sets holding a
    single class yield a constant model whose support for that class is the
    Laplace estimate ``(n + 1) / (n + 2)``.
    """

    def __init__(self):
        self._constant = None
        self._fitted = False
        self.n_features_ = None

    def get_params(self) -> dict:
        return {}

    def clone(self):
        return type(self)(**self.get_params())

    def fit(self, X, y):
        X, y = check_xy(X, y)
        self.n_features_ = X.shape[1]
        n_pos = int(y.sum())
        if n_pos in (0, y.size):
            p = (y.size + 1.0) / (y.size + 2.0)
            cls = int(y[0])
            row = np.empty(2)
            row[cls], row[1 - cls] = p, 1.0 - p
            self._constant = row
        else:
            self._constant = None
            self._fit(X, y)
        self._fitted = True
        return self

    def predict_support(self, X) -> np.ndarray:
        """Per-class probability rows, columns ordered (class 0, class 1)."""
        if not self._fitted:
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[1] != self.n_features_:
            raise InvalidInputError(
                f"expected {self.n_features_} features, got {X.shape[1]}"
            )
        if self._constant is not None:
            return np.tile(self._constant, (X.shape[0], 1))
        return self._support(X)

    def predict(self, X) -> np.ndarray:
        return support_to_labels(self.predict_support(X))

    def _fit(self, X, y):
        raise NotImplementedError

    def _support(self, X):
        raise NotImplementedError

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def support_to_labels(support) -> np.ndarray:
    # ties go to class 0
    support = np.asarray(support)
    return (support[:, 1] > support[:, 0]).astype(np.int64)

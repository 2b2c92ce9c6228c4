import numpy as np

from ..errors import InvalidInputError
from .base import BinaryClassifier


class KNeighbors(BinaryClassifier):
    """Majority vote among the k Euclidean-nearest training points.

    Distance ties are resolved in favour of the lower training index; k is
    clamped to the training-set size.
    """

    def __init__(self, k=5):
        super().__init__()
        if k < 1:
            raise InvalidInputError(f"k must be >= 1, got {k}")
        self.k = k

    def get_params(self):
        return {"k": self.k}

    def _fit(self, X, y):
        self.X_ = X.copy()
        self.y_ = y.copy()

    def _support(self, X):
        k = min(self.k, len(self.X_))
        pos = np.empty(len(X))
        # blocked to bound the size of the pairwise difference tensor
        step = max(1, 2_000_000 // (self.X_.size or 1))
        for start in range(0, len(X), step):
            block = X[start:start + step]
            d2 = ((block[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
            pos[start:start + step] = self.y_[nearest].sum(axis=1) / k
        return np.column_stack([1.0 - pos, pos])

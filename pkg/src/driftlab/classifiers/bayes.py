import numpy as np
from scipy.special import logsumexp

from .base import BinaryClassifier


class GaussianNB(BinaryClassifier):
    """Gaussian naive Bayes with a relative variance floor.

    Variances are floored at ``var_smoothing`` times the largest per-feature
    variance of the training set (or times 1 when that is zero).
    """

    def __init__(self, var_smoothing=1e-9):
        super().__init__()
        self.var_smoothing = var_smoothing

    def get_params(self):
        return {"var_smoothing": self.var_smoothing}

    def _fit(self, X, y):
        max_var = float(np.var(X, axis=0).max())
        self.epsilon_ = self.var_smoothing * (max_var if max_var > 0 else 1.0)
        n_features = X.shape[1]
        self.prior_ = np.zeros(2)
        self.mean_ = np.zeros((2, n_features))
        self.var_ = np.full((2, n_features), self.epsilon_)
        for c in (0, 1):
            Xc = X[y == c]
            if len(Xc) == 0:
                continue
            self.prior_[c] = len(Xc) / len(X)
            self.mean_[c] = Xc.mean(axis=0)
            self.var_[c] = Xc.var(axis=0) + self.epsilon_

    def _joint_log_likelihood(self, X):
        jll = np.empty((X.shape[0], 2))
        for c in (0, 1):
            with np.errstate(divide="ignore"):
                log_prior = np.log(self.prior_[c])
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.var_[c]))
            ll = ll - 0.5 * np.sum((X - self.mean_[c]) ** 2 / self.var_[c], axis=1)
            jll[:, c] = log_prior + ll
        return jll

    def _support(self, X):
        jll = self._joint_log_likelihood(X)
        return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))

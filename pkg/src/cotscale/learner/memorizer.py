"""Interpolating classifier that is exactly correct on its training points."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist, pdist
from sklearn.base import BaseEstimator, ClassifierMixin

from ..validation import as_matrix


class Memorizer(BaseEstimator, ClassifierMixin):
    """Nearest-neighbor or kernel memorizer with greedy/sampled decoding.

    bandwidth:
        None  -> pure 1-nearest-neighbor (both decode modes coincide);
        "median" -> Gaussian kernel, width = median pairwise training distance;
        float -> Gaussian kernel with that width.
    decode:
        "greedy" -> argmax of the class posterior (lowest class on ties);
        "sample" -> one draw from the posterior.

    In kernel mode the posterior is p(y|x) proportional to the summed
    Gaussian weights exp(-||x - x_i||^2 / h^2) of the training points of
    class y.
    """

    def __init__(self, bandwidth=None, decode="greedy", random_state=None):
        self.bandwidth = bandwidth
        self.decode = decode
        self.random_state = random_state

    def fit(self, X, y):
        X = as_matrix(X, "X")
        y = np.asarray(y, dtype=int)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError("y must be one label per training row")
        if X.shape[0] == 0:
            raise ValueError("training set must be non-empty")
        self.train_x_ = X
        self.train_y_ = y
        self.classes_ = np.unique(y)
        if self.bandwidth is None:
            self.bandwidth_ = None
        elif self.bandwidth == "median":
            if X.shape[0] < 2:
                raise ValueError("median bandwidth needs at least two training points")
            self.bandwidth_ = float(np.median(pdist(X)))
            if self.bandwidth_ <= 0:
                raise ValueError("median pairwise distance is zero")
        else:
            self.bandwidth_ = float(self.bandwidth)
            if self.bandwidth_ <= 0:
                raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_matrix(X, "X")
        sq = cdist(X, self.train_x_, "sqeuclidean")
        if self.bandwidth_ is None:
            probs = np.zeros((X.shape[0], self.classes_.size))
            nearest = self.train_y_[np.argmin(sq, axis=1)]
            probs[np.arange(X.shape[0]), np.searchsorted(self.classes_, nearest)] = 1.0
            return probs
        # subtract the per-row minimum before exponentiating; the shift cancels
        # in the normalization but keeps tiny bandwidths from underflowing
        logw = -(sq - sq.min(axis=1, keepdims=True)) / self.bandwidth_**2
        weights = np.exp(logw)
        probs = np.zeros((X.shape[0], self.classes_.size))
        for j, cls in enumerate(self.classes_):
            probs[:, j] = weights[:, self.train_y_ == cls].sum(axis=1)
        return probs / probs.sum(axis=1, keepdims=True)

    def predict(self, X, decode=None, rng=None) -> np.ndarray:
        self._check_fitted()
        decode = self.decode if decode is None else decode
        if decode not in ("greedy", "sample"):
            raise ValueError(f"decode must be 'greedy' or 'sample', got {decode!r}")
        probs = self.predict_proba(X)
        if decode == "greedy" or self.bandwidth_ is None:
            return self.classes_[np.argmax(probs, axis=1)]
        if rng is None:
            rng = np.random.default_rng(self.random_state)
        cumulative = np.cumsum(probs, axis=1)
        draws = rng.random(probs.shape[0])
        idx = np.minimum(
            np.sum(cumulative < draws[:, None], axis=1), self.classes_.size - 1
        )
        return self.classes_[idx]

    def _check_fitted(self) -> None:
        if not hasattr(self, "train_x_"):
            raise ValueError("Memorizer is not fitted")


def predict(model: Memorizer, x, decode: str = "greedy", seed=None) -> int:
    """Single-input convenience wrapper around :meth:`Memorizer.predict`."""
    rng = None if seed is None else np.random.default_rng(seed)
    return int(model.predict(np.atleast_2d(x), decode=decode, rng=rng)[0])

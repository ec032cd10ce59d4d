"""Intrinsic-dimension estimators for embedding matrices (rows = samples).

Three estimators are provided: a PCA variance threshold, the Levina-Bickel
maximum-likelihood estimator, and the two-nearest-neighbor ratio estimator.
All three are invariant under global scaling and orthogonal transforms of
the data.
"""

from __future__ import annotations

import csv
import warnings

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.neighbors import NearestNeighbors

from .validation import as_matrix

PROFILE_COLUMNS = ("position", "estimator", "dimension", "n_samples")

# slack on the (inclusive) variance-threshold comparison so exact-fraction
# spectra are not tipped over by rounding
_THRESHOLD_TOL = 1e-12


def pca_dim(X, threshold: float = 0.8) -> int:
    """Components needed to capture ``threshold`` of the variance.

    Columns are centered first; the comparison is inclusive, so five equal
    eigenvalues at threshold 0.8 give 4. Data with zero variance has
    dimension 0.
    """
    X = as_matrix(X, "X", min_rows=2)
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    centered = X - X.mean(axis=0)
    spectrum = np.linalg.svd(centered, compute_uv=False) ** 2
    total = float(spectrum.sum())
    if total == 0.0:
        return 0
    ratios = np.cumsum(spectrum) / total
    return int(np.argmax(ratios >= threshold - _THRESHOLD_TOL)) + 1


def _neighbor_distances(X: np.ndarray, k: int) -> np.ndarray:
    nn = NearestNeighbors(n_neighbors=k + 1).fit(X)
    distances, _ = nn.kneighbors(X)
    return distances[:, 1:]  # drop self-distance


def mle_dim(X, k: int = 10, aggregate: str = "corrected") -> float:
    """Levina-Bickel neighborhood estimator with ``k`` neighbors.

    Per point, the inverse estimate is the mean of ``log(T_k / T_j)`` over
    the closer neighbors. ``aggregate="corrected"`` inverts the mean of the
    per-point inverses (the standard corrected aggregate); ``"mean"``
    averages the per-point estimates directly. Points whose first ``k``
    neighbor distances include zero (duplicates) are excluded with a warning.
    """
    X = as_matrix(X, "X")
    if k < 2:
        raise ValueError(f"neighbor count must be >= 2, got {k}")
    if X.shape[0] <= k:
        raise ValueError(f"need more than k={k} samples, got {X.shape[0]}")
    if aggregate not in ("corrected", "mean"):
        raise ValueError(f"aggregate must be 'corrected' or 'mean', got {aggregate!r}")
    distances = _neighbor_distances(X, k)
    valid = distances[:, 0] > 0.0
    excluded = int(np.sum(~valid))
    if excluded:
        warnings.warn(f"excluded {excluded} points with duplicate neighbors", stacklevel=2)
    distances = distances[valid]
    if distances.shape[0] == 0:
        raise ValueError("no valid points after excluding duplicates")
    inverse = np.mean(np.log(distances[:, -1:] / distances[:, :-1]), axis=1)
    if aggregate == "corrected":
        return float(1.0 / np.mean(inverse))
    return float(np.mean(1.0 / inverse))


def two_nn_dim(X, min_valid: int = 10) -> float:
    """Two-nearest-neighbor estimator from the ratios r2/r1.

    Uses the closed-form maximum-likelihood aggregate N' / sum(log mu) over
    the points with ``r1 > 0`` and ``mu = r2/r1 > 1`` strictly.
    """
    X = as_matrix(X, "X", min_rows=3)
    distances = _neighbor_distances(X, 2)
    r1, r2 = distances[:, 0], distances[:, 1]
    valid = (r1 > 0.0) & (r2 > r1)
    if int(valid.sum()) < min_valid:
        raise ValueError(
            f"only {int(valid.sum())} valid neighbor ratios; need at least {min_valid}"
        )
    mu = r2[valid] / r1[valid]
    return float(valid.sum() / np.sum(np.log(mu)))


_ESTIMATORS = {"pca": pca_dim, "mle": mle_dim, "twonn": two_nn_dim}


def dim_profile(matrices, estimator: str = "pca", **params) -> list:
    """Apply one estimator per position-indexed matrix.

    ``matrices`` is a list of arrays (positions 0..K-1) or (position, array)
    pairs. Returns rows of {position, estimator, dimension, n_samples}.
    """
    if estimator not in _ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; choose from {sorted(_ESTIMATORS)}")
    items = list(matrices)
    if not items:
        raise ValueError("matrices must be non-empty")
    if not isinstance(items[0], tuple):
        items = list(enumerate(items))
    fn = _ESTIMATORS[estimator]
    rows = []
    for position, X in items:
        X = as_matrix(X, f"matrix at position {position}", min_rows=2)
        rows.append(
            {
                "position": position,
                "estimator": estimator,
                "dimension": float(fn(X, **params)),
                "n_samples": X.shape[0],
            }
        )
    return rows


def write_profile_csv(rows, path, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(PROFILE_COLUMNS)
        for row in rows:
            writer.writerow([row[col] for col in PROFILE_COLUMNS])


# ---------------------------------------------------------------------------
# Matrix file ingestion: .npy, or text with a "rows cols" header line
# ---------------------------------------------------------------------------


def load_matrix(path) -> np.ndarray:
    path = str(path)
    if path.endswith(".npy"):
        return as_matrix(np.load(path), path)
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"matrix file {path} is empty")
    header = lines[0].replace(",", " ").split()
    if len(header) != 2:
        raise ValueError(f"matrix file {path} must start with a 'rows cols' header")
    rows, cols = int(header[0]), int(header[1])
    if len(lines) - 1 != rows:
        raise ValueError(f"matrix file {path} declares {rows} rows but has {len(lines) - 1}")
    data = np.array(
        [[float(v) for v in ln.replace(",", " ").split()] for ln in lines[1:]], dtype=float
    )
    if data.shape != (rows, cols):
        raise ValueError(f"matrix file {path} data shape {data.shape} != ({rows}, {cols})")
    return as_matrix(data, path)


def save_matrix(X, path) -> None:
    X = as_matrix(X, "X")
    with open(path, "w", newline="") as fh:
        fh.write(f"{X.shape[0]} {X.shape[1]}\n")
        for row in X:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


# ---------------------------------------------------------------------------
# Estimator-style wrappers
# ---------------------------------------------------------------------------


class _DimensionEstimator(BaseEstimator):
    def fit(self, X, y=None):
        X = as_matrix(X, "X", min_rows=2)
        self.dimension_ = float(self._estimate(X))
        self.n_samples_ = X.shape[0]
        return self

    def fit_estimate(self, X) -> float:
        return self.fit(X).dimension_


class PCADimension(_DimensionEstimator):
    """Variance-threshold dimension; exposes ``dimension_`` after fit."""

    def __init__(self, threshold: float = 0.8):
        self.threshold = threshold

    def _estimate(self, X) -> float:
        return pca_dim(X, threshold=self.threshold)


class MLEDimension(_DimensionEstimator):
    """Neighborhood maximum-likelihood dimension; ``dimension_`` after fit."""

    def __init__(self, k: int = 10, aggregate: str = "corrected"):
        self.k = k
        self.aggregate = aggregate

    def _estimate(self, X) -> float:
        return mle_dim(X, k=self.k, aggregate=self.aggregate)


class TwoNNDimension(_DimensionEstimator):
    """Two-neighbor ratio dimension; ``dimension_`` after fit."""

    def __init__(self, min_valid: int = 10):
        self.min_valid = min_valid

    def _estimate(self, X) -> float:
        return two_nn_dim(X, min_valid=self.min_valid)

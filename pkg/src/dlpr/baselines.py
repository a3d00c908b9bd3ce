"""Classical classifiers over feature vectors: k-nearest-neighbors and
regularized linear discriminant analysis.

Both are deterministic given the fit data and its order.  Fit is
exclusive; predict only reads model state.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DegenerateData, NotFitted, ShapeError

SHRINKAGE = 1e-4


class KnnModel:
    """Euclidean k-nearest-neighbors with majority vote.

    Distance ties keep training-set order (stable sort); vote ties go to
    the lowest class index.
    """

    def __init__(self, k: int = 5):
        if k < 1 or k % 2 == 0:
            raise ConfigError(f"k must be odd and positive, got {k}")
        self.k = k
        self._x: np.ndarray | None = None
        self._y: np.ndarray | None = None

    def fit(self, x: np.ndarray, y: np.ndarray) -> "KnnModel":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=int)
        if x.ndim != 2 or x.shape[0] == 0:
            raise NotFitted("training set is empty")
        if x.shape[0] != y.shape[0]:
            raise ShapeError(f"{x.shape[0]} rows but {y.shape[0]} labels")
        if self.k > x.shape[0]:
            raise ConfigError(f"k={self.k} exceeds training size {x.shape[0]}")
        self._x = x
        self._y = y
        return self

    def predict(self, x: np.ndarray, chunk: int = 512) -> np.ndarray:
        if self._x is None:
            raise NotFitted("fit before predict")
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self._x.shape[1]:
            raise ShapeError(
                f"query width {x.shape[1]} != training width {self._x.shape[1]}"
            )
        train_sq = (self._x**2).sum(axis=1)
        out = np.empty(x.shape[0], dtype=int)
        for start in range(0, x.shape[0], chunk):
            block = x[start : start + chunk]
            # squared distances via the expansion; clip roundoff negatives
            d2 = np.maximum(
                (block**2).sum(axis=1)[:, None] + train_sq - 2.0 * block @ self._x.T,
                0.0,
            )
            for i, row in enumerate(d2):
                nearest = np.argsort(row, kind="stable")[: self.k]
                votes = np.bincount(self._y[nearest])
                # argmax takes the lowest class index on vote ties
                out[start + i] = int(votes.argmax())
        return out


class LdaModel:
    """Linear discriminant analysis with a pooled within-class covariance.

    The covariance gets ``1e-4 * trace/dim`` added to its diagonal before
    inversion; priors are equal by default or estimated from class
    frequencies when ``priors='empirical'``.
    """

    def __init__(self, priors: str = "equal"):
        if priors not in ("equal", "empirical"):
            raise ConfigError(f"priors must be 'equal' or 'empirical', got {priors!r}")
        self.priors_mode = priors
        self.classes_: np.ndarray | None = None
        self.means_: np.ndarray | None = None
        self.coef_: np.ndarray | None = None
        self.intercept_: np.ndarray | None = None

    def fit(self, x: np.ndarray, y: np.ndarray) -> "LdaModel":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=int)
        if x.ndim != 2 or x.shape[0] == 0:
            raise NotFitted("training set is empty")
        if x.shape[0] != y.shape[0]:
            raise ShapeError(f"{x.shape[0]} rows but {y.shape[0]} labels")
        classes = np.unique(y)
        n, dim = x.shape
        if classes.size < 2:
            raise DegenerateData("need at least 2 classes")
        if n < dim + 1:
            raise DegenerateData(f"{n} samples cannot support {dim} dimensions")

        means = np.stack([x[y == c].mean(axis=0) for c in classes])
        pooled = np.zeros((dim, dim))
        for c, mu in zip(classes, means):
            centered = x[y == c] - mu
            pooled += centered.T @ centered
        pooled /= n - classes.size
        pooled[np.diag_indices(dim)] += SHRINKAGE * np.trace(pooled) / dim

        try:
            inv = np.linalg.inv(pooled)
        except np.linalg.LinAlgError as exc:
            raise DegenerateData(f"covariance singular after regularization: {exc}")
        # reject indefinite/ill-conditioned scatter that inv() tolerated
        if not np.all(np.linalg.eigvalsh(pooled) > 0):
            raise DegenerateData("covariance not positive definite after regularization")

        if self.priors_mode == "empirical":
            priors = np.array([(y == c).mean() for c in classes])
        else:
            priors = np.full(classes.size, 1.0 / classes.size)

        self.classes_ = classes
        self.means_ = means
        self.coef_ = means @ inv
        self.intercept_ = -0.5 * np.einsum("kd,kd->k", self.coef_, means) + np.log(priors)
        return self

    def scores(self, x: np.ndarray) -> np.ndarray:
        if self.coef_ is None:
            raise NotFitted("fit before predict")
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.coef_.shape[1]:
            raise ShapeError(
                f"query width {x.shape[1]} != training width {self.coef_.shape[1]}"
            )
        return x @ self.coef_.T + self.intercept_

    def predict(self, x: np.ndarray) -> np.ndarray:
        scores = self.scores(x)
        return self.classes_[scores.argmax(axis=1)]

"""k-nearest neighbours over mixed numeric / categorical columns.

Distance is the Euclidean distance over standardised numeric columns plus
the number of categorical mismatches. An unknown category simply counts as
a mismatch against every training row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CHUNK = 512


@dataclass(frozen=True, eq=False)
class KNNModel:
    k: int
    n_classes: int
    numeric: np.ndarray
    categorical: np.ndarray
    center: np.ndarray
    scale: np.ndarray
    train_numeric: np.ndarray
    train_categorical: np.ndarray
    train_y: np.ndarray

    def distances(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        z = (X[:, self.numeric] - self.center) / self.scale
        sq = ((z[:, None, :] - self.train_numeric[None, :, :]) ** 2).sum(axis=2)
        ham = (X[:, None, self.categorical] != self.train_categorical[None, :, :]).sum(axis=2)
        return np.sqrt(sq) + ham

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.int64)
        k = min(self.k, self.train_y.size)
        for lo in range(0, X.shape[0], CHUNK):
            dist = self.distances(X[lo : lo + CHUNK])
            # stable sort: equidistant neighbours are taken in training-row order
            nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
            for i, idx in enumerate(nearest):
                votes = np.bincount(self.train_y[idx], minlength=self.n_classes)
                out[lo + i] = int(np.argmax(votes))
        return out


def fit_knn(X: np.ndarray, y: np.ndarray, n_classes: int, is_cat: np.ndarray, k: int = 5) -> KNNModel:
    X = np.asarray(X, dtype=np.float64)
    numeric = np.flatnonzero(~is_cat)
    categorical = np.flatnonzero(is_cat)
    num = X[:, numeric]
    center = num.mean(axis=0)
    scale = num.std(axis=0)
    scale[scale == 0] = 1.0
    return KNNModel(
        k, n_classes, numeric, categorical, center, scale,
        (num - center) / scale, X[:, categorical], np.asarray(y, dtype=np.int64),
    )

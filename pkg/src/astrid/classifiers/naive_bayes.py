"""Gaussian / categorical naive Bayes.

Sufficient statistics are computed from sorted per-(class, column) values,
so they depend only on the value multisets and not on row order. Any
within-class shuffle of the training data therefore gives a bit-identical
model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VAR_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class NaiveBayesModel:
    log_prior: np.ndarray  # (n_classes,)
    numeric: np.ndarray  # indices of numeric columns
    means: np.ndarray  # (n_classes, n_numeric)
    variances: np.ndarray  # (n_classes, n_numeric)
    categorical: np.ndarray  # indices of categorical columns
    log_probs: tuple[np.ndarray, ...]  # per categorical column: (n_classes, n_categories)
    log_unseen: np.ndarray  # (n_classes, n_categorical): log prob of an unknown token

    def log_joint(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.tile(self.log_prior, (X.shape[0], 1))
        if self.numeric.size:
            xs = X[:, self.numeric][:, None, :]
            var = self.variances[None, :, :]
            ll = -0.5 * (np.log(2.0 * np.pi * var) + (xs - self.means[None, :, :]) ** 2 / var)
            out += ll.sum(axis=2)
        for c, (j, table) in enumerate(zip(self.categorical, self.log_probs)):
            codes = X[:, j].astype(np.int64)
            known = (codes >= 0) & (codes < table.shape[1])
            ll = np.empty((X.shape[0], table.shape[0]))
            ll[known] = table[:, codes[known]].T
            ll[~known] = self.log_unseen[:, c]
            out += ll
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        # argmax returns the first maximum: ties go to the lowest label
        return np.argmax(self.log_joint(X), axis=1)


def fit_naive_bayes(X: np.ndarray, y: np.ndarray, n_classes: int, is_cat: np.ndarray, n_cats: np.ndarray) -> NaiveBayesModel:
    X = np.asarray(X, dtype=np.float64)
    counts = np.bincount(y, minlength=n_classes)
    log_prior = np.log(np.maximum(counts, 1) / counts.sum())
    log_prior[counts == 0] = -np.inf
    numeric = np.flatnonzero(~is_cat)
    categorical = np.flatnonzero(is_cat)

    means = np.zeros((n_classes, numeric.size))
    variances = np.full((n_classes, numeric.size), VAR_FLOOR)
    for c in range(n_classes):
        rows = X[y == c]
        for t, j in enumerate(numeric):
            v = np.sort(rows[:, j])
            if v.size == 0:
                continue
            mu = v.sum() / v.size
            means[c, t] = mu
            if v.size > 1:
                variances[c, t] = max(((v - mu) ** 2).sum() / (v.size - 1), VAR_FLOOR)

    log_probs = []
    log_unseen = np.zeros((n_classes, categorical.size))
    for t, j in enumerate(categorical):
        k = int(n_cats[j])
        table = np.empty((n_classes, k))
        for c in range(n_classes):
            freq = np.bincount(X[y == c, j].astype(np.int64), minlength=k)[:k]
            table[c] = np.log((freq + 1.0) / (counts[c] + k))
            log_unseen[c, t] = np.log(1.0 / (counts[c] + k))
        log_probs.append(table)
    return NaiveBayesModel(log_prior, numeric, means, variances, categorical, tuple(log_probs), log_unseen)

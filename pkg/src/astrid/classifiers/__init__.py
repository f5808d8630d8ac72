"""Learners used as test statistics, and the accuracy statistic itself."""

from __future__ import annotations

import dataclasses
from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from astrid.classifiers.external import ExternalModel
from astrid.classifiers.forest import ForestModel, fit_forest
from astrid.classifiers.knn import KNNModel, fit_knn
from astrid.classifiers.naive_bayes import NaiveBayesModel, fit_naive_bayes
from astrid.data import Dataset
from astrid.errors import ClassifierError, DataError

KINDS = ("naive_bayes", "random_forest", "knn", "external", "custom")
SHORT_NAMES = {"nb": "naive_bayes", "rf": "random_forest", "knn": "knn"}


class Model(Protocol):
    def predict(self, X: np.ndarray) -> np.ndarray:
        """Return one class code per row of ``X``."""


@dataclass(frozen=True)
class ClassifierSpec:
    """Which learner to train and with what settings.

    ``kind="custom"`` takes any picklable ``learner(dataset, seed) -> Model``;
    it is how user code plugs its own statistic into the tests.
    """

    kind: str = "random_forest"
    n_trees: int = 100
    mtry: int | None = None
    max_depth: int | None = None
    min_leaf: int = 1
    k: int = 5
    command: str | None = None
    learner: Callable[[Dataset, int], Model] | None = None
    train_seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ClassifierError(f"unknown classifier kind {self.kind!r}")
        for name in ("n_trees", "min_leaf", "k"):
            if getattr(self, name) < 1:
                raise ClassifierError(f"{name} must be positive")
        if self.mtry is not None and self.mtry < 1:
            raise ClassifierError("mtry must be positive")
        if self.max_depth is not None and self.max_depth < 0:
            raise ClassifierError("max_depth must be non-negative")
        if self.kind == "external" and not self.command:
            raise ClassifierError("an external classifier needs a command line")
        if self.kind == "custom" and self.learner is None:
            raise ClassifierError("a custom classifier needs a learner callable")

    def with_seed(self, seed: int) -> ClassifierSpec:
        return dataclasses.replace(self, train_seed=int(seed))

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "random_forest":
            out.update(n_trees=self.n_trees, mtry=self.mtry, max_depth=self.max_depth, min_leaf=self.min_leaf)
        elif self.kind == "knn":
            out["k"] = self.k
        elif self.kind == "external":
            out["command"] = self.command
        return out


def parse_classifier(text: str, **options) -> ClassifierSpec:
    """``nb``, ``rf``, ``knn`` or ``external:<command>``."""
    if text.startswith("external:"):
        return ClassifierSpec("external", command=text[len("external:"):], **options)
    kind = SHORT_NAMES.get(text, text)
    if kind not in KINDS or kind in ("external", "custom"):
        raise ClassifierError(f"unknown classifier {text!r}; use nb, rf, knn or external:<cmd>")
    return ClassifierSpec(kind, **options)


def train(spec: ClassifierSpec, d: Dataset) -> Model:
    if np.count_nonzero(d.class_counts()) < 2:
        raise ClassifierError("training data must contain at least two classes")
    if spec.kind == "naive_bayes":
        return fit_naive_bayes(d.X, d.y, d.n_classes, d.is_categorical, d.n_categories)
    if spec.kind == "random_forest":
        return fit_forest(
            d.X, d.y, d.n_classes, d.is_categorical, d.n_categories,
            n_trees=spec.n_trees, mtry=spec.mtry, max_depth=spec.max_depth,
            min_leaf=spec.min_leaf, seed=spec.train_seed,
        )
    if spec.kind == "knn":
        return fit_knn(d.X, d.y, d.n_classes, d.is_categorical, k=spec.k)
    if spec.kind == "external":
        return ExternalModel(spec.command, d)
    return spec.learner(d, spec.train_seed)


def predict(model: Model, row) -> int:
    """Class code for a single row."""
    return int(model.predict(np.asarray(row, dtype=np.float64).reshape(1, -1))[0])


def accuracy(model: Model, test: Dataset) -> float:
    """Fraction of test rows whose predicted class equals the true class."""
    if test.n == 0:
        raise DataError("empty test set")
    pred = np.asarray(model.predict(test.X))
    if pred.shape != (test.n,):
        raise ClassifierError(f"model returned {pred.shape} predictions for {test.n} rows")
    return np.count_nonzero(pred == test.y) / test.n


__all__ = [
    "ClassifierSpec",
    "ExternalModel",
    "ForestModel",
    "KNNModel",
    "Model",
    "NaiveBayesModel",
    "accuracy",
    "parse_classifier",
    "predict",
    "train",
]

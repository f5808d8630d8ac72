"""Adapter for classifiers living in another process.

The command is run as ``<command> train.csv test.csv``. ``train.csv`` has
the class column, ``test.csv`` only the attribute columns. The process
prints one predicted class label per test row on stdout; a nonzero exit
status is a classifier failure.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from astrid.data import Dataset, write_csv
from astrid.errors import ClassifierError

TIMEOUT = 3600


@dataclass(frozen=True, eq=False)
class ExternalModel:
    command: str
    train: Dataset

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        t = self.train
        test = Dataset(X, np.zeros(X.shape[0], dtype=np.int64), t.columns, t.classes, t.class_name)
        with tempfile.TemporaryDirectory(prefix="astrid-") as tmp:
            train_path = Path(tmp) / "train.csv"
            test_path = Path(tmp) / "test.csv"
            write_csv(t, train_path)
            write_csv(test, test_path, include_class=False)
            argv = shlex.split(self.command) + [str(train_path), str(test_path)]
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=TIMEOUT)
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise ClassifierError(f"external classifier {self.command!r} failed: {exc}") from None
        if proc.returncode != 0:
            raise ClassifierError(
                f"external classifier exited with status {proc.returncode}: {proc.stderr.strip()[:500]}"
            )
        lines = [ln.strip() for ln in proc.stdout.splitlines() if ln.strip()]
        if len(lines) != X.shape[0]:
            raise ClassifierError(f"external classifier returned {len(lines)} labels for {X.shape[0]} rows")
        code = {c: i for i, c in enumerate(t.classes)}
        try:
            return np.array([code[ln] for ln in lines], dtype=np.int64)
        except KeyError as exc:
            raise ClassifierError(f"external classifier returned unknown label {exc.args[0]!r}") from None

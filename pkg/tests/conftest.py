import numpy as np
import pytest

from astrid.data import Column, Dataset, generate_synthetic


def set_partitions(items, k=None):
    """Every set partition of ``items`` (optionally only those with k blocks)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        yield [[first]] + smaller
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
    return


def partitions_of_size(m, k):
    return [p for p in set_partitions(range(m)) if len(p) == k]


def random_dataset(rng, n=60, m=4, n_classes=2, p_categorical=0.3):
    cols, X = [], np.empty((n, m))
    for j in range(m):
        if rng.random() < p_categorical:
            k = int(rng.integers(2, 5))
            X[:, j] = rng.integers(0, k, n)
            cols.append(Column(f"c{j}", "categorical", tuple(f"v{i}" for i in range(k))))
        else:
            X[:, j] = rng.normal(size=n).round(int(rng.integers(1, 4)))
            cols.append(Column(f"x{j}"))
    y = np.arange(n) % n_classes
    rng.shuffle(y)
    return Dataset(X, y, tuple(cols), tuple(str(c) for c in range(n_classes)))


def random_partition(rng, m):
    labels = rng.integers(0, m, m)
    groups = {}
    for j, g in enumerate(labels):
        groups.setdefault(int(g), []).append(j)
    return list(groups.values())


@pytest.fixture(scope="session")
def synthetic():
    return generate_synthetic(500, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

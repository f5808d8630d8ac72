"""Datasets, attribute partitions, CSV ingestion and splitting.

Attribute values live in a float matrix. Categorical columns are stored as
integer codes into ``Column.categories``; class labels are stored the same
way as codes into ``Dataset.classes``. Codes follow the sorted order of the
tokens (numerically when every token parses as a number), and that order is
the "label order" used for every tie-break in the package.

Attribute indices are 0-based throughout the API. Text forms of a partition
("1,2|3|4") are 1-based, which is how they are typed and printed.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from astrid.errors import DataError, PartitionError

MISSING = frozenset({"", "?"})
NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Column:
    name: str
    kind: str = NUMERIC
    categories: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise DataError(f"unknown column kind {self.kind!r}")

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n x m attribute matrix with one class label per row."""

    X: np.ndarray
    y: np.ndarray
    columns: tuple[Column, ...]
    classes: tuple[str, ...]
    class_name: str = "class"

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=np.float64)
        y = np.array(self.y, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError("attribute matrix must be n x m with n, m >= 1")
        if y.shape != (X.shape[0],):
            raise DataError(f"expected {X.shape[0]} labels, got {y.shape[0]}")
        if len(self.columns) != X.shape[1]:
            raise DataError("one Column descriptor is needed per attribute")
        if y.min() < 0 or y.max() >= len(self.classes):
            raise DataError("label code outside the class set")
        if not np.isfinite(X).all():
            raise DataError("attribute matrix contains missing or non-finite values")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def is_categorical(self) -> np.ndarray:
        return np.array([c.is_categorical for c in self.columns], dtype=bool)

    @property
    def n_categories(self) -> np.ndarray:
        return np.array([len(c.categories) for c in self.columns], dtype=np.int64)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def subset(self, rows: Sequence[int] | np.ndarray) -> Dataset:
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.X[rows], self.y[rows], self.columns, self.classes, self.class_name)

    def with_matrix(self, X: np.ndarray) -> Dataset:
        return Dataset(X, self.y, self.columns, self.classes, self.class_name)

    def same_values(self, other: Dataset) -> bool:
        """Exact (bitwise) equality of matrix, labels and metadata."""
        return (
            self.columns == other.columns
            and self.classes == other.classes
            and self.X.shape == other.X.shape
            and self.X.tobytes() == other.X.tobytes()
            and np.array_equal(self.y, other.y)
        )

    def token(self, j: int, value: float) -> str:
        col = self.columns[j]
        if col.is_categorical:
            return col.categories[int(value)]
        return format_number(value)

    def rows_as_tokens(self) -> list[list[str]]:
        return [
            [self.token(j, v) for j, v in enumerate(row)] + [self.classes[c]]
            for row, c in zip(self.X.tolist(), self.y.tolist())
        ]


@dataclass(frozen=True)
class CleaningStats:
    rows_read: int
    rows_dropped: int
    columns_dropped: tuple[str, ...] = ()


@dataclass(frozen=True)
class Partition:
    """A disjoint, complete grouping of attribute indices, in canonical form."""

    groups: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def m(self) -> int:
        return sum(len(g) for g in self.groups)

    @classmethod
    def whole(cls, m: int) -> Partition:
        return cls((tuple(range(m)),))

    @classmethod
    def singletons(cls, m: int) -> Partition:
        return cls(tuple((j,) for j in range(m)))

    def group_of(self) -> np.ndarray:
        """Map each attribute index to the position of its group."""
        owner = np.empty(self.m, dtype=np.int64)
        for g, members in enumerate(self.groups):
            owner[list(members)] = g
        return owner

    def unbroken(self, other: Partition) -> list[tuple[int, ...]]:
        """Groups of ``other`` that sit wholly inside some group of ``self``."""
        owner = self.group_of()
        return [g for g in other.groups if len({owner[j] for j in g}) == 1]

    def to_text(self) -> str:
        return "|".join(",".join(str(j + 1) for j in g) for g in self.groups)

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ", ".join(str(j + 1) for j in g) + "}" for g in self.groups) + "}"


def validate_partition(groups: Iterable[Iterable[int]], m: int) -> Partition:
    """Check that ``groups`` (0-based) partition ``range(m)``; return canonical form."""
    if m < 1:
        raise PartitionError("m must be at least 1")
    seen: dict[int, int] = {}
    canon = []
    for g, group in enumerate(groups):
        members = sorted(int(j) for j in group)
        if not members:
            raise PartitionError(f"group {g + 1} is empty")
        if len(set(members)) != len(members):
            raise PartitionError(f"group {g + 1} repeats an index")
        for j in members:
            if not 0 <= j < m:
                raise PartitionError(f"attribute index {j + 1} out of range 1..{m}")
            if j in seen:
                raise PartitionError(f"groups {seen[j] + 1} and {g + 1} overlap on index {j + 1}")
            seen[j] = g
        canon.append(tuple(members))
    missing = [j + 1 for j in range(m) if j not in seen]
    if missing:
        raise PartitionError(f"indices not covered by any group: {missing}")
    canon.sort(key=lambda g: g[0])
    return Partition(tuple(canon))


def parse_partition(text: str, m: int) -> Partition:
    """Parse the 1-based "1,2|3|4" form."""
    groups = []
    for part in text.split("|"):
        part = part.strip()
        if not part:
            raise PartitionError(f"empty group in {text!r}")
        try:
            groups.append([int(tok) - 1 for tok in part.split(",")])
        except ValueError:
            raise PartitionError(f"cannot parse partition {text!r}") from None
    return validate_partition(groups, m)


def _ordered_tokens(tokens: Iterable[str]) -> tuple[str, ...]:
    uniq = set(tokens)
    try:
        return tuple(sorted(uniq, key=lambda t: (float(t), t)))
    except ValueError:
        return tuple(sorted(uniq))


def _is_number(token: str) -> bool:
    try:
        return math.isfinite(float(token))
    except ValueError:
        return False


def format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 2**53:
        return str(int(value))
    return repr(value)


def from_tokens(
    header: Sequence[str],
    rows: Sequence[Sequence[str]],
    class_column: str,
    kinds: Mapping[str, str] | None = None,
    min_classes: int = 2,
) -> tuple[Dataset, CleaningStats]:
    """Build a Dataset from string cells, applying the cleaning rules.

    Rows with a missing cell are dropped, then columns holding a single
    distinct value are dropped.
    """
    kinds = dict(kinds or {})
    if class_column not in header:
        raise DataError(f"class column {class_column!r} not found in header")
    unknown = set(kinds) - set(header)
    if unknown:
        raise DataError(f"kind overrides for unknown columns: {sorted(unknown)}")
    ci = list(header).index(class_column)
    width = len(header)
    kept = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"row {r + 2} has {len(row)} cells, header has {width}")
        cells = [c.strip() for c in row]
        if any(c in MISSING for c in cells):
            continue
        kept.append(cells)
    if not kept:
        raise DataError("no rows left after removing rows with missing values")

    attr_idx = [j for j in range(width) if j != ci]
    dropped = tuple(header[j] for j in attr_idx if len({row[j] for row in kept}) == 1)
    attr_idx = [j for j in attr_idx if header[j] not in dropped]
    if not attr_idx:
        raise DataError("no attribute columns left after removing constant columns")

    labels = [row[ci] for row in kept]
    classes = _ordered_tokens(labels)
    if len(classes) < min_classes:
        raise DataError(f"at least {min_classes} classes are required, found {len(classes)}")
    code = {c: i for i, c in enumerate(classes)}

    columns = []
    X = np.empty((len(kept), len(attr_idx)))
    for out, j in enumerate(attr_idx):
        values = [row[j] for row in kept]
        kind = kinds.get(header[j])
        if kind is None:
            kind = NUMERIC if all(_is_number(v) for v in values) else CATEGORICAL
        if kind == NUMERIC:
            try:
                X[:, out] = [float(v) for v in values]
            except ValueError as exc:
                raise DataError(f"column {header[j]!r} is not numeric: {exc}") from None
            columns.append(Column(header[j], NUMERIC))
        else:
            cats = _ordered_tokens(values)
            lookup = {c: i for i, c in enumerate(cats)}
            X[:, out] = [lookup[v] for v in values]
            columns.append(Column(header[j], CATEGORICAL, cats))

    y = np.array([code[c] for c in labels], dtype=np.int64)
    stats = CleaningStats(len(rows), len(rows) - len(kept), dropped)
    return Dataset(X, y, tuple(columns), classes, class_column), stats


def load_csv(
    path: str | Path,
    class_column: str,
    kinds: Mapping[str, str] | None = None,
    min_classes: int = 2,
) -> tuple[Dataset, CleaningStats]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [row for row in reader if row]
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except csv.Error as exc:
        raise DataError(f"malformed CSV {path}: {exc}") from None
    if header is None:
        raise DataError(f"{path} is empty")
    return from_tokens([h.strip() for h in header], rows, class_column, kinds, min_classes)


def write_csv(d: Dataset, path: str | Path | None = None, *, include_class: bool = True) -> str:
    """Write ``d`` in the ingestion dialect; return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = [c.name for c in d.columns]
    if include_class:
        w.writerow(header + [d.class_name])
        w.writerows(d.rows_as_tokens())
    else:
        w.writerow(header)
        w.writerows([row[:-1] for row in d.rows_as_tokens()])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


@dataclass(frozen=True)
class SplitTriple:
    train: Dataset
    test_reward: Dataset
    test_select: Dataset
    rows: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False, compare=False, default=())

    @property
    def parts(self) -> tuple[Dataset, Dataset, Dataset]:
        return self.train, self.test_reward, self.test_select


def _largest_remainder(total: int, ratios: Sequence[float]) -> list[int]:
    quotas = [r * total for r in ratios]
    sizes = [math.floor(q) for q in quotas]
    left = total - sum(sizes)
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[:left]:
        sizes[i] += 1
    return sizes


def split_dataset(d: Dataset, ratios: Sequence[float] = (0.5, 0.25, 0.25), seed: int = 0) -> SplitTriple:
    """Stratified, seeded three-way split with largest-remainder rounding."""
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise DataError(f"need three positive ratios summing to 1, got {ratios}")
    rng = np.random.default_rng(seed)
    parts: list[list[int]] = [[], [], []]
    for c in range(d.n_classes):
        members = np.flatnonzero(d.y == c)
        if members.size == 0:
            continue
        sizes = _largest_remainder(members.size, ratios)
        if min(sizes) == 0:
            raise DataError(
                f"class {d.classes[c]!r} too small ({members.size} rows) to appear in every part"
            )
        shuffled = rng.permutation(members)
        start = 0
        for p, size in enumerate(sizes):
            parts[p].extend(shuffled[start : start + size].tolist())
            start += size
    rows = tuple(np.sort(np.array(p, dtype=np.int64)) for p in parts)
    return SplitTriple(*(d.subset(r) for r in rows), rows=rows)


SYNTHETIC_JITTER = 0.5
SYNTHETIC_FLIP = 0.1
SYNTHETIC_SHIFT = 0.675


def generate_synthetic(n_per_class: int, seed: int = 0) -> Dataset:
    """Two-class, four-attribute dataset with known grouping {{1,2},{3},{4}}.

    The signs of a1 and a2 agree for class "1" and disagree for class "0"
    (with a small flip probability), so neither carries class information
    alone. a3 is a Gaussian whose mean shifts with the class; a4 is noise.
    The three factors are drawn independently given the class.
    """
    if n_per_class < 1:
        raise DataError("n_per_class must be at least 1")
    rng = np.random.default_rng(seed)
    n = 2 * n_per_class
    y = np.repeat(np.arange(2), n_per_class)
    agree = np.where(y == 1, 1.0, -1.0)
    flip = np.where(rng.random(n) < SYNTHETIC_FLIP, -1.0, 1.0)
    s1 = rng.choice([-1.0, 1.0], size=n)
    s2 = s1 * agree * flip
    a1 = s1 + SYNTHETIC_JITTER * rng.standard_normal(n)
    a2 = s2 + SYNTHETIC_JITTER * rng.standard_normal(n)
    a3 = np.where(y == 1, SYNTHETIC_SHIFT, -SYNTHETIC_SHIFT) + rng.standard_normal(n)
    a4 = rng.standard_normal(n)
    X = np.column_stack([a1, a2, a3, a4])
    cols = tuple(Column(f"a{j}") for j in range(1, 5))
    return Dataset(X, y, cols, ("0", "1"))

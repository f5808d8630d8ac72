"""Grouping tests and interaction discovery by within-class permutation."""

from astrid.data import (
    Column,
    Dataset,
    Partition,
    SplitTriple,
    generate_synthetic,
    load_csv,
    parse_partition,
    split_dataset,
    validate_partition,
    write_csv,
)
from astrid.errors import AstridError, ClassifierError, DataError, PartitionError
from astrid.rng import Streams

__all__ = [
    "AstridError",
    "ClassifierError",
    "Column",
    "DataError",
    "Dataset",
    "Partition",
    "PartitionError",
    "SplitTriple",
    "Streams",
    "generate_synthetic",
    "load_csv",
    "parse_partition",
    "split_dataset",
    "validate_partition",
    "write_csv",
]

__version__ = "0.1.0"

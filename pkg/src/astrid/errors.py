class AstridError(Exception):
    """Base class for all errors raised by this package."""


class DataError(AstridError, ValueError):
    """Malformed or unusable input data."""


class PartitionError(DataError):
    """An attribute grouping that is not a partition of the columns."""


class ClassifierError(AstridError):
    """A learner could not be trained or failed to predict."""

"""Exception types shared across the package."""


class CostblendError(Exception):
    """Base class for all package-specific errors."""


class InvalidLabelError(CostblendError, ValueError):
    """A label falls outside {1..K}."""


class InvalidCostMatrixError(CostblendError, ValueError):
    """A cost matrix violates its invariants (shape, sign, nonzero diagonal)."""


class InvalidArgumentError(CostblendError, ValueError):
    """A scalar argument is outside its documented range."""


class EmptyDatasetError(CostblendError, ValueError):
    """An operation that needs at least one example received none."""


class DegenerateProblemError(CostblendError, ValueError):
    """A binary problem has no usable examples on one side."""


class UndefinedRecallError(CostblendError, ValueError):
    """A per-class recall is undefined because the class is absent."""


class DatasetFormatError(CostblendError, ValueError):
    """A data file violates the expected text format."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no

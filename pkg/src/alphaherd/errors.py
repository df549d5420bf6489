"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class DegenerateDatasetError(ValidationError):
    """Dataset geometry makes a quantity undefined (e.g. zero median distance)."""


class FormatError(ValidationError):
    """A dataset or record file could not be parsed.

    Args:
        message: Human readable description.
        offset: Byte offset of the problem for binary formats, if known.
        row: Zero-based sample row of the problem, if known.
    """

    def __init__(self, message, offset=None, row=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)
        self.offset = offset
        self.row = row


class IllConditionedError(ValidationError):
    """Linear system too ill-conditioned for a reliable solve."""

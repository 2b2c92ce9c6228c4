"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Input data or arguments violate an operation's preconditions."""


class NotFittedError(RuntimeError):
    """A model was asked to predict before it saw any training data."""


class UnsupportedConfigurationError(ValueError):
    """Requested parameters fall outside the supported range."""


class ParseError(ValueError):
    """A data file could not be parsed."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)

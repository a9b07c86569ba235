"""Exception hierarchy shared by all modules."""


class ForgeError(Exception):
    """Base class for every error raised by uniformity_forge."""


class InputError(ForgeError, ValueError):
    """An argument violates an operation's precondition."""


class ContractError(ForgeError, RuntimeError):
    """An object lacks a property the operation relies on (e.g. unverified strength)."""


class ConstructionError(ForgeError, RuntimeError):
    """A construction produced output that failed its own recomputed postcondition."""


class FormatError(InputError):
    """A file could not be parsed. Carries an optional line/column location."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)

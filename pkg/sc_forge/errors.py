from typing import Optional


class ScForgeError(Exception):
    """Base class for toolkit errors"""

    exit_code = 3


class InputError(ScForgeError):
    """Malformed or inadmissible input"""

    exit_code = 2


class PresentationFormatError(InputError):
    """A text input could not be parsed; carries 1-based line/column"""

    def __init__(self, message: str, line: int, column: int, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source or "<input>"
        super().__init__(f"{self.source}:{line}:{column}: {message}")


class PreconditionError(InputError):
    """An operation was called outside its precondition"""


class InternalInvariantError(ScForgeError):
    """A guaranteed post-condition did not hold"""

    exit_code = 3


class UnknownSubcommandError(InputError):
    """No subcommand of that name"""

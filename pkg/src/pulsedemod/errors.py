"""Exception hierarchy shared by the library and the command line."""


class PulseDemodError(Exception):
    """Base class for every error raised by pulsedemod."""


class ValidationError(PulseDemodError, ValueError):
    """A value violates a domain-type invariant or an operation precondition."""


class ParseError(PulseDemodError, ValueError):
    """An input file could not be read; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(PulseDemodError, ArithmeticError):
    """A computation has no defined result for the given data."""

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"{message} at sample {index}"
        super().__init__(message)

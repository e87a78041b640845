class DomainError(ValueError):
    """Input outside the domain where a model is defined."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to reach its requested accuracy."""


class AmbiguityError(DomainError):
    """A frequency-selective pulse would address more than one class of sites."""


class LayoutError(DomainError):
    """Invalid register or port layout."""


class ParseError(ValueError):
    """Malformed scenario input; carries the offending location."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)

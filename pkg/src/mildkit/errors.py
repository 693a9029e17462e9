"""Exception hierarchy shared by all mildkit modules."""


class MildkitError(Exception):
    """Base class for all errors raised by this package."""


class ContextMismatchError(MildkitError):
    """Operands built over different (p, d, tau) contexts."""


class ParseError(MildkitError):
    """Syntax error in a word or presentation file; carries position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}"
            if column is not None:
                where += f", column {column}"
        super().__init__(message + where)


class BudgetError(MildkitError):
    """A computation would exceed the configured size budget."""


class PrecisionError(MildkitError):
    """The requested result is not determined at the given cutoff."""


class InternalInvariantError(MildkitError):
    """A mathematically guaranteed invariant failed; indicates a bug."""

"""Exception hierarchy shared by all modules."""


class TangleKitError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TangleKitError, ValueError):
    """An argument lies outside the operation's domain (unknown vertex, bad nesting, ...)."""


class PresentationError(TangleKitError):
    """A presentation document could not be parsed or is not a simple graph."""

    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if path:
            where.append(f"at {path}")
        super().__init__(message + (f" ({', '.join(where)})" if where else ""))


class UnsupportedDeletion(TangleKitError):
    """The component space of G - X cannot be represented exactly."""

    def __init__(self, message, deleted=()):
        self.deleted = tuple(deleted)
        super().__init__(message)


class UnsupportedPartition(TangleKitError):
    """A requested partition of a component family is not selector-describable."""

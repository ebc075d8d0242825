"""Exception types shared across the package."""


class UCPBenchError(Exception):
    """Base class for package errors."""


class InvalidArgument(UCPBenchError, ValueError):
    pass


class ParseError(UCPBenchError, ValueError):
    """A dataset row could not be parsed."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = (", ".join(where) + ": ") if where else ""
        super().__init__(prefix + message)


class ValidationError(UCPBenchError, ValueError):
    """A parsed value violates a dataset rule."""

    def __init__(self, message, row=None, rule=None):
        self.row = row
        self.rule = rule
        prefix = f"row {row}: " if row is not None else ""
        super().__init__(prefix + message)


class DegenerateClustering(UCPBenchError, ArithmeticError):
    """Two cluster centers coincide, so the validity index is undefined."""


class UnsupportedSampleSize(UCPBenchError, ValueError):
    pass


class MetricError(UCPBenchError, ValueError):
    pass


class UndefinedBaseline(UCPBenchError, ArithmeticError):
    pass

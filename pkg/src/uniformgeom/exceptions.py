"""Exception hierarchy shared by every module."""


class UniformGeomError(Exception):
    """Base class for errors raised by this package."""


class DomainError(UniformGeomError, ValueError):
    """An argument is outside the operation's domain (bad index, eps <= 0, ...)."""


class StructuralInputError(UniformGeomError, ValueError):
    """Input has the wrong shape: non-square table, carrier mismatch, ragged CSV."""


class MetricValidationError(UniformGeomError, ValueError):
    """A distance table failed the metric axioms; carries the full report."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"not a metric: {report.summary()}")


class DifferentComponentsError(UniformGeomError, ValueError):
    """Two points lie in different chainable components at the requested scale."""


class CapacityError(UniformGeomError, RuntimeError):
    """An exact search was requested beyond its configured size limit."""


class CSVParseError(UniformGeomError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)

"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`OfdiagError`,
which is what the command-line front end maps to exit status 2.
"""


class OfdiagError(Exception):
    """Base class for all library errors."""


class ModelSyntaxError(OfdiagError):
    """The model file is not valid JSON."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"syntax error{where}: {message}")


class SchemaError(OfdiagError):
    """The model file is valid JSON but does not follow the model schema."""

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"schema violation at {field}: {reason}")


class ReservedTokenError(SchemaError):
    """The reserved empty-output token was declared as an output symbol."""


class InvalidModelError(OfdiagError):
    """The model violates a structural invariant (see ``model.validate``)."""

    def __init__(self, report):
        self.report = report
        first = report.violations[0] if report.violations else None
        detail = f": {first.message}" if first else ""
        super().__init__(f"invalid model ({len(report.violations)} violations){detail}")


class UndefinedStringError(OfdiagError):
    """An event string is not generated from the initial state."""


class NotARunError(OfdiagError):
    """A sequence of extended events does not chain through the model."""


class InvalidLassoError(NotARunError):
    """A lasso is not a run of the model or its cycle does not close."""


class UnknownOutputError(OfdiagError):
    """An output symbol is not part of the model's output alphabet."""


class InfeasibleObservationError(OfdiagError):
    """An output string cannot be produced by the system."""

    def __init__(self, observed, position):
        self.observed = tuple(observed)
        self.position = position
        super().__init__(
            f"output string {list(self.observed)} is infeasible: "
            f"no explanation after symbol {position}"
        )


class PreconditionError(OfdiagError):
    """An operation was called outside its documented domain."""


class LimitExceededError(OfdiagError):
    """An instance is too large for an exhaustive procedure."""

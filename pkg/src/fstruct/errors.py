"""Exception hierarchy."""

from __future__ import annotations


class FStructError(Exception):
    """Base class for all package errors."""


class ExactModeUnsupported(FStructError):
    """An operation needs a value that is not an exact rational."""


class InvalidStructure(FStructError):
    """Input data does not define the requested object."""


class StructureFileError(InvalidStructure):
    """Malformed structure file; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if field:
            where.append(f"field {field}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ObstructionError(FStructError):
    """No adapted connection with totally skew torsion exists.

    ``conditions`` lists the failed requirements among
    ``"commute"``, ``"killing"`` and ``"skewness"``.
    """

    CONDITIONS = ("commute", "killing", "skewness")

    def __init__(self, conditions: list[str], details: dict | None = None):
        self.conditions = list(conditions)
        self.details = dict(details or {})
        super().__init__("no adapted connection; reasons: [" + ", ".join(self.conditions) + "]")


class NotSManifold(FStructError):
    """The structure is not an S-manifold."""


class NotSasakian(FStructError):
    """The structure is not Sasakian (an S-manifold with s = 1)."""


class HolonomyNotStabilized(FStructError):
    """Holonomy iteration hit its cap without the dimension stabilizing."""


class InternalConsistencyError(FStructError):
    """Two independent computations that must agree did not."""

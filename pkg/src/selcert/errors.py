"""Exception types shared across the package.

Everything raised on purpose derives from SelcertError so the CLI can map
failures onto its exit-code contract (1 for usage/schema problems, 2 for an
infeasible certificate).
"""

from __future__ import annotations


class SelcertError(Exception):
    """Base class for all errors raised by selcert."""


class SchemaError(SelcertError):
    """A dataset file or value violates the expected schema.

    Carries the 1-based data row and the column name when they are known, so
    messages can point at the offending cell.
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column '{column}'" if column else "") + ")"
        super().__init__(message + loc)
        self.row = row
        self.column = column


class DatasetIOError(SelcertError):
    """A dataset file could not be read or written."""


class DuplicateIdError(SelcertError):
    """Two records in one dataset share an id."""


class MissingDateError(SelcertError):
    """A temporal split was requested but some records have no date."""

    def __init__(self, ids: list[str]):
        shown = ", ".join(ids[:10]) + (", ..." if len(ids) > 10 else "")
        super().__init__(f"{len(ids)} record(s) have no date: {shown}")
        self.ids = list(ids)


class DomainError(SelcertError):
    """A numeric argument is outside its legal domain."""


class ConvergenceError(SelcertError):
    """An iterative solver ran out of iterations."""


class EmptyCalibrationError(SelcertError):
    """Certification was attempted on an empty calibration set."""


class InfeasibleCertificateError(SelcertError):
    """An operation required a feasible certificate but got an infeasible one."""


class IdMismatchError(SelcertError):
    """Decision ids do not line up with the dataset they are applied to."""


class UnpairedIdsError(SelcertError):
    """Two datasets that must share an id set do not."""


class DegenerateLabelsError(SelcertError):
    """A metric needs both classes present and the data has only one."""


class EmptyInputError(SelcertError):
    """A metric was asked for on zero records."""


class UnsortedLambdasError(SelcertError):
    """A threshold grid must be strictly increasing and within [0.5, 1]."""


class ResampleCapError(SelcertError):
    """A bootstrap resample kept producing undefined metrics until the cap."""

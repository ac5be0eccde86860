"""Exception types shared across the package."""


class JointDagError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(JointDagError, ValueError):
    """An argument violates a documented precondition."""


class DataIngestionError(JointDagError):
    """A data file could not be parsed or validated.

    Carries enough location information (path, row, column) to point the
    user at the offending cell.
    """

    def __init__(self, message, path=None, row=None, column=None):
        parts = [message]
        if path is not None:
            parts.append(f"file={path}")
        if row is not None:
            parts.append(f"row={row}")
        if column is not None:
            parts.append(f"column={column}")
        super().__init__("; ".join(str(p) for p in parts))
        self.path = path
        self.row = row
        self.column = column


class SolverDivergenceError(JointDagError, RuntimeError):
    """The solver produced a non-finite objective value.

    The per-iteration trace accumulated up to the failure is attached so
    callers can inspect how the run diverged.
    """

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = tuple(trace)

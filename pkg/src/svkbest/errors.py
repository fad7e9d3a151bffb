"""Exception hierarchy shared by the library, CLI and service."""


class SvkbestError(Exception):
    """Base class for all library errors."""


class DataError(SvkbestError):
    """Dataset ingestion or manipulation failed (CLI exit code 3)."""


class SolverConvergenceError(SvkbestError):
    """Solver hit its update cap before reaching the KKT tolerance (CLI exit code 4).

    Carries the best-so-far solution so callers can inspect or report it.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class HeapOverflowError(SvkbestError):
    """Enumeration heap exceeded its configured capacity."""


class MetricError(SvkbestError):
    """A metric is undefined for the given inputs (e.g. empty sensitive group)."""


class OracleError(SvkbestError):
    """Reference solver precondition violated or iteration cap exceeded."""

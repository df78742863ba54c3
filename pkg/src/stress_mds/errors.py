"""Exception hierarchy shared across the toolkit."""


class StressMdsError(Exception):
    """Base class for all toolkit errors."""


class DataError(StressMdsError):
    """Invalid input data: bad CSV, malformed matrix, invariant violation."""


class CapacityError(DataError):
    """A required allocation is infeasible; message names the byte count."""


class DegeneratePairError(StressMdsError):
    """Two embedding points coincide where a distinct pair is required."""


class SolverError(StressMdsError):
    """A solver failed to produce a valid result."""

"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
SimulationError -> 4.
"""


class PredvoteError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PredvoteError):
    """Invalid run configuration (bad field values, unusable generators)."""


class DataError(PredvoteError):
    """Malformed input data: CSV schema violations, bad cells, bad matrices."""


class FitError(PredvoteError):
    """A model could not be fitted (rank deficiency, domain violations)."""


class ConvergenceError(FitError):
    """Iterative fit did not converge; carries the iteration count."""

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


class SimulationError(PredvoteError):
    """Monte Carlo run failed (fit-failure ceiling breached, winner refit failed)."""

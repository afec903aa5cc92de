"""Exception taxonomy for the bandix library.

Solver failures (zero pivots, non-convergence, singular input) are
distinct from input-contract violations so callers can map them to
distinct process exit codes / HTTP statuses.
"""


class BandixError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(BandixError):
    """Vector/matrix dimensions do not agree."""


class InvalidInput(BandixError):
    """Malformed matrix text, bad method id, or an invalid generator spec."""


class InvalidSpec(InvalidInput):
    """Generator spec violates a family constraint."""


class SolverError(BandixError):
    """Base class for failures inside a solver routine."""


class ZeroPivot(SolverError):
    """An elimination pivot came out exactly zero at row ``index``."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"zero pivot at row {index}")


class ReductionPivotZero(SolverError):
    """The pentadiagonal-to-tridiagonal reduction hit a zero pivot."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"reduction pivot is zero for row {index}")


class SingularMatrix(SolverError):
    """Exact determinant is zero; no unique solution exists."""


class MaxIterationsExceeded(SolverError):
    """Iteration budget exhausted; carries the best iterate seen so far."""

    def __init__(self, best, residual_inf, iterations):
        self.best = best
        self.residual_inf = residual_inf
        self.iterations = iterations
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(best residual {residual_inf:.3e})"
        )


class Diverged(SolverError):
    """Residual grew past the divergence guard (1e6x the initial norm)."""

    def __init__(self, residual_inf, iterations):
        self.residual_inf = residual_inf
        self.iterations = iterations
        super().__init__(
            f"residual diverged to {residual_inf:.3e} after {iterations} iterations"
        )


class ZeroDiagonal(SolverError):
    """A triangular matrix handed to the inverter has a zero diagonal entry."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"zero diagonal entry at row {index}")


class Stagnated(SolverError):
    """Banded inversion stopped improving above the requested tolerance.

    Carries the best approximate inverse found; the SIP outer loop can
    still use it because the outer iteration owns final accuracy.
    """

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"inversion stagnated at residual {report.residual_inf:.3e} "
            f"after {report.iterations} iterations"
        )


class DenseCapExceeded(SolverError):
    """Dense inversion mode refused a matrix above the configured cap."""

    def __init__(self, n, cap):
        self.n = n
        self.cap = cap
        super().__init__(f"dense mode refuses n={n} (cap {cap}); use the banded mode")


class NonAffine(BandixError):
    """Measured op counts do not fit an exact affine function of N."""

    def __init__(self, max_residual):
        self.max_residual = max_residual
        super().__init__(f"op counts are not exactly affine (max residual {max_residual})")

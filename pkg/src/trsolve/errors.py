"""Exception types shared across the solver stack.

Every class carries a stable ``kind`` string so the CLI can emit
machine-readable error objects without string-matching messages.
"""


class TrsolveError(Exception):
    kind = "error"


class DimensionMismatchError(TrsolveError, ValueError):
    kind = "dimension_mismatch"


class MatrixFormatError(TrsolveError, ValueError):
    kind = "parse_error"


class NotPositiveDefiniteError(TrsolveError, ValueError):
    kind = "not_positive_definite"


class InvalidProblemError(TrsolveError, ValueError):
    kind = "invalid_problem"


class InternalInconsistencyError(TrsolveError, RuntimeError):
    """Raised when an internal invariant that theory guarantees is violated.

    Carries a diagnostics dict so callers (and bug reports) see the raw
    numbers that broke the invariant.
    """

    kind = "internal_inconsistency"

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class NumericalDegeneracyError(InternalInconsistencyError):
    kind = "numerical_degeneracy"


class OracleFailureError(TrsolveError, RuntimeError):
    """Test-infrastructure failure of the dense reference solver; never silent."""

    kind = "oracle_failure"

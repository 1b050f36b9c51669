"""Exception taxonomy shared across the toolkit.

Validation-type errors (bad inputs, malformed files, violated invariants)
map to CLI exit code 3; computation-type errors (quadrature failure,
insufficient table range, internal consistency) map to exit code 4.
"""


class CuspmassError(Exception):
    pass


class DomainError(CuspmassError):
    """Argument outside the mathematical domain of an operation."""


class ValidationError(CuspmassError):
    """A coefficient-table invariant failed; names the invariant and witness."""

    def __init__(self, invariant: str, witness=None, detail: str = ""):
        self.invariant = invariant
        self.witness = witness
        msg = f"invariant violated: {invariant}"
        if witness is not None:
            msg += f" (witness n = {witness})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ParseError(CuspmassError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IncompleteDataError(CuspmassError):
    """Required coefficient data (e.g. a prime eigenvalue) is missing."""


class DegenerateSatakeError(DomainError):
    """alpha = beta (double root); rejected by the spherical-coefficient formula."""


class TableRangeError(CuspmassError):
    """Coefficient table too short; carries the required length."""

    def __init__(self, required: int, available: int, context: str = ""):
        self.required = required
        self.available = available
        msg = f"coefficient table covers n <= {available} but n <= {required} is required"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class QuadratureError(CuspmassError):
    """Numerical integration failed to converge; carries diagnostics."""


class ConsistencyError(CuspmassError):
    """An identity that must hold by construction failed: implementation bug."""


class InfeasibleError(CuspmassError):
    """Requested computation refused as infeasible (combinatorial explosion)."""

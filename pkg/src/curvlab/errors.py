"""Exception hierarchy shared across the package.

Each CLI-facing failure mode maps onto one of three families:

* bad input (schema, syntax, unknown names)      -> usage errors
* bad numbers (domain violations, singular data) -> numerical errors
* failed checks                                  -> reported, not raised
"""

from __future__ import annotations


class CurvlabError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# usage / input errors


class SchemaError(CurvlabError):
    """A manifold description file is malformed or misses required fields."""


class ExprError(CurvlabError):
    """Problem with an expression source string.

    Carries ``offset``, the 0-based character position in the source the
    problem was detected at (or ``None`` when no position applies).
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        base = super().__str__()
        if self.offset is not None:
            return f"{base} (at offset {self.offset})"
        return base


class ExprSyntaxError(ExprError):
    """Tokenizer or parser rejected the source."""


class UnknownIdentifierError(ExprError):
    """Identifier is neither a variable ``x<k>`` nor a known function."""


class VariableRangeError(ExprError):
    """Variable index lies outside ``x1..x<dim>``."""


class DimensionError(CurvlabError):
    """Operation requires a dimension the manifold does not have."""


# ---------------------------------------------------------------------------
# numerical errors


class EvaluationDomainError(CurvlabError):
    """A function was evaluated outside its differentiability domain.

    Raised for log/sqrt of non-positive values, division by zero, and
    negative-power of zero.  ``offset`` is filled in when the error can be
    tied back to a position in an expression source string.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class DomainError(CurvlabError):
    """A sample point violates a manifold's domain predicate."""


class DegenerateMetricError(CurvlabError):
    """Metric value matrix is not symmetric positive definite at a point."""


class UnsupportedOrderError(CurvlabError):
    """Requested jet order above the supported maximum."""


class DerivativeExhaustedError(CurvlabError):
    """Differentiation was applied to an order-0 jet."""


class FrameConstructionError(CurvlabError):
    """Could not build a requested frame (e.g. J-adapted) at a point."""


class MissingComplexStructureError(CurvlabError):
    """An almost-Hermitian operation was requested on a Riemannian-only spec."""


class HypothesisNotMetError(CurvlabError):
    """An identity check was requested on a manifold outside its hypothesis
    class.  ``missing`` names the class or condition that failed."""

    def __init__(self, message: str, missing: str):
        super().__init__(message)
        self.missing = missing

class HyperstackError(ValueError):
    """Base class for domain-level failures surfaced by the library."""


class ClassNotApplicableError(HyperstackError):
    """A local involution class was requested for a singularity it does not act on."""


class InvalidCombinationError(HyperstackError):
    """Arguments that are individually valid but cannot occur together."""


class DisconnectedGraphError(HyperstackError):
    """An operation that needs a connected curve received a disconnected one."""


class UnknownVertexError(HyperstackError):
    """A vertex, point or marking id does not resolve in the graph."""


class ImproperSubcurveError(HyperstackError):
    """A subcurve is empty, equals the whole curve, or overlaps another one."""


class InvalidInvolutionError(HyperstackError):
    """A decorated involution is inconsistent with the curve it acts on."""

    def __init__(self, message: str, reasons: list[str] | None = None):
        super().__init__(message)
        self.reasons = reasons or []


class InfiniteFixedLocusError(HyperstackError):
    """The involution fixes a whole component, so the quotient is not a cover."""


class InvalidCoverDataError(HyperstackError):
    """Cyclic-cover data violates a structural or local condition."""

    def __init__(self, message: str, reasons: list[str] | None = None):
        super().__init__(message)
        self.reasons = reasons or []


class NotHyperellipticError(HyperstackError):
    """The quotient is not a connected nodal curve of genus 0."""


class DecompositionViolationError(HyperstackError):
    """A decomposition clause fails; ``clause`` names the failing property."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"({clause}) {message}")
        self.clause = clause


class NotGenusOneError(HyperstackError):
    """Genus-1 classification was asked for a curve of another genus."""


class ScaleLimitError(HyperstackError):
    """The request exceeds the configured search limits."""


class BijectionError(HyperstackError):
    """The graph and cover presentations do not correspond one to one."""

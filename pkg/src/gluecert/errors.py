"""Exception types shared across the package."""


class GluecertError(Exception):
    """Base class for all library errors."""


class OutOfDomain(GluecertError):
    """Point lies outside the chart's coordinate box."""


class NotPositiveDefinite(GluecertError):
    """A matrix that must be a metric failed its Cholesky factorization.

    Carries an optional witness (coordinates at which definiteness was lost).
    """

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NonSymmetric(GluecertError):
    """Operator handed to a symmetric-only routine is not symmetric."""


class DegeneratePlane(GluecertError):
    """The two vectors span a (numerically) degenerate 2-plane."""


class EmptySampling(GluecertError):
    """A sampling plan produced no evaluation points."""


class CollarTooShallow(GluecertError):
    """Requested gluing half-width exceeds the available collar depth."""


class DimensionMismatch(GluecertError):
    """Two objects that must share a cross-section disagree in dimension."""


class BandTooWide(GluecertError):
    """Smoothing band extends past where the adjacent pieces are defined."""


class BudgetInfeasible(GluecertError):
    """Smoothing radius search exhausted without meeting the C1 budget."""


class DisconnectedGraph(GluecertError):
    """Geodesic-graph diameter estimate found unreachable node pairs."""


class ScenarioError(GluecertError):
    """Scenario file is missing, malformed, or dimensionally inconsistent."""

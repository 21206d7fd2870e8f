"""Exception taxonomy shared by all geolink modules."""


class GeolinkError(Exception):
    """Base class for all errors raised by geolink."""


class UsageError(GeolinkError):
    """Caller broke an API precondition (mismatched spaces, bad shapes, ...)."""


class DegenerateInputError(GeolinkError):
    """Input is a degenerate configuration (e.g. coincident points)."""


class CutLocusError(GeolinkError):
    """Operation requested at or beyond the cut locus of the base point."""


class SingularInputError(GeolinkError):
    """Kernel evaluated at its singular point (zero distance)."""


class DomainError(GeolinkError):
    """Argument outside the mathematical domain of the function."""


class UnsupportedConfigurationError(GeolinkError):
    """Space/degree combination that has no implemented kernel."""


class DegenerateChartError(GeolinkError):
    """Parametrization is rank-deficient at the requested parameter."""


class ValidationError(GeolinkError):
    """Constructed object violates its declared invariants."""


class ProximityError(GeolinkError):
    """Submanifolds too close for the linking integral to be well conditioned."""

    def __init__(self, min_distance: float, threshold: float):
        self.min_distance = float(min_distance)
        self.threshold = float(threshold)
        super().__init__(
            f"submanifolds too close: min sampled distance {min_distance:.3e} "
            f"<= threshold {threshold:.3e}"
        )


class OracleFailureError(GeolinkError):
    """Topological oracle could not reach a non-degenerate configuration."""


class SceneParseError(GeolinkError):
    """Scene file could not be parsed; carries a location string."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{message}" + (f" (at {location})" if location else ""))

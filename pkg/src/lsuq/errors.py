"""Exception types shared across the solver pipeline."""


class LsuqError(Exception):
    """Base class for all package errors."""


class UnsupportedOrderError(LsuqError):
    """Bessel order above the supported cap."""


class DomainError(LsuqError):
    """Argument outside the mathematical domain of a special function."""


class SingularityError(LsuqError):
    """Kernel evaluated at (or too close to) the singular point."""


class DimensionError(LsuqError):
    """Parameter vector length does not match the configured truncation."""


class DegenerateShapeError(LsuqError):
    """Radius dropped below the configured floor for some angle."""


class ResourceError(LsuqError):
    """Requested refinement level / problem size above the supported cap."""


class QuadratureError(LsuqError):
    """Unsupported quadrature order or NaN detected during assembly."""


class SolverError(LsuqError):
    """Linear system singular to working tolerance."""


class PointLocationError(LsuqError):
    """Evaluation point lies outside the mesh."""


class ProximityError(LsuqError):
    """Exterior evaluation point lies inside or on the scatterer mesh."""


class GeneratingDataError(LsuqError):
    """Malformed QMC generating-data file."""


class SampleError(LsuqError):
    """A QMC sample failed inside the forward pipeline.

    Carries the offending sample index so studies can report it instead of
    silently skipping (skipping would bias the equal-weight estimator).
    """

    def __init__(self, index, cause):
        super().__init__(f"sample {index} failed: {cause}")
        self.index = index
        self.cause = cause


class DegeneratePosteriorError(LsuqError):
    """Normalization constant underflowed; suggests larger noise sigma."""


class ConfigError(LsuqError):
    """Unknown or malformed configuration key."""

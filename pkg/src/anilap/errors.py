"""Exception types shared across the package."""


class AnilapError(Exception):
    """Base class for package errors."""


class SobolevExponentUndefined(AnilapError):
    """The embedding exponent is undefined because the harmonic sum is <= 1."""


class InvalidRadius(AnilapError):
    """Radius outside the admissible range for the requested construction."""


class SingularPoint(AnilapError):
    """Kernel density requested on its diagonal singularity."""


class IntegrabilityFailure(AnilapError):
    """Truncated jump-moment integral exceeded the configured cap."""


class InvalidQuery(AnilapError):
    """Query point/region combination the operation does not support."""


class BoundaryStencilError(AnilapError):
    """Stencil application requested at a node without interior neighbors."""


class SpectralPathUnavailable(AnilapError):
    """FFT path requested on a grid that is not periodic."""


class OrderFitUnreliable(AnilapError):
    """Refinement errors are non-monotone; no order can be fitted."""


class QuadratureResolutionError(AnilapError):
    """Grid spacing too coarse to resolve the singular quadrature cell."""


class WindowError(AnilapError):
    """Cutoff ramp narrower than the grid can resolve."""


class SupportViolation(AnilapError):
    """Function support extends outside the region the norm requires."""


class SolveFailure(AnilapError):
    """Iterative solve stopped before reaching the requested tolerance.

    Carries the best iterate so callers can inspect it.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class PreconditionViolation(AnilapError):
    """Input fails a documented precondition of the experiment."""


class FitUnreliable(AnilapError):
    """A log-log fit has too few usable points or an unusable spread."""


class ExponentFitUnreliable(FitUnreliable):
    """Degenerate exponent fit in a sublevel-measure experiment."""


class InvalidIndex(AnilapError):
    """Stability index outside (0, 2)."""


class ConfigError(AnilapError):
    """Experiment configuration failed validation."""


class HorizonWarning(UserWarning):
    """More than the tolerated share of paths hit the simulation horizon."""

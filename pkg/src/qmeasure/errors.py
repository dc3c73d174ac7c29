"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`QMeasureError`
so callers (the CLI in particular) can map families of failures to exit codes.
"""


class QMeasureError(Exception):
    """Base class for all package errors."""


class DomainError(QMeasureError, ValueError):
    """Degenerate grid or a grid that does not cover the state."""


class ParameterError(QMeasureError, ValueError):
    """Physically meaningless input parameter (e.g. zero frequency)."""


class GridMismatchError(QMeasureError, ValueError):
    """Two fields or a field and a kernel live on different grids."""


class ResolutionError(QMeasureError):
    """The grid cannot resolve a kernel width or an operator."""


class NormalizationError(QMeasureError):
    """A kernel or reading violates its normalization contract."""


class DivergenceError(QMeasureError):
    """A reading carries non-integrable momentum content.

    Raised when the J**2/rho integrand cannot be integrated on any grid,
    or when the phase gradient of a reading exceeds what the grid represents.
    """


class TailDecayError(DivergenceError):
    """The J**2/rho integrand has not decayed at the edge of the grid.

    Unlike a plain :class:`DivergenceError` this one may go away on a wider
    grid, and the scenario runner retries on that basis.
    """


class ValidityError(QMeasureError):
    """Closed-form recorded momentum spread is undefined (radicand <= 0)."""


class LabelMismatchError(QMeasureError, ValueError):
    """Intrinsic/recorded labels were passed in the wrong slots."""


class InsufficientSampleError(QMeasureError, ValueError):
    """Too few draws for the requested statistic."""


class ConfigError(QMeasureError):
    """Scenario configuration failed to parse or validate."""

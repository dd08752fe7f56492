"""Exception hierarchy shared by all foottile modules."""


class FootTileError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FootTileError, ValueError):
    """An argument lies outside the physical domain of an operation."""


class DesignError(DomainError):
    """A sensor design violates its geometric or range invariants."""


class FitError(FootTileError):
    """Calibration fit failed (rank deficiency or a non-monotone curve)."""


class RangeError(FootTileError, ValueError):
    """A force lies outside the invertible range of a calibration curve."""


class AggregationError(FootTileError):
    """Runs or reports cannot be combined."""


class GeometryError(FootTileError, ValueError):
    """Degenerate kinematic input, e.g. coincident markers."""


class EmbeddingError(FootTileError):
    """A tile maps outside the target grid."""


class UndefinedCopError(FootTileError):
    """Centre of pressure requested for an all-zero grid (airborne phase)."""


class ScheduleError(FootTileError, ValueError):
    """A bus schedule violates the barometer conversion-time ceiling."""


class IntegrationError(FootTileError):
    """The hop integrator produced a non-finite state."""


class ConfigError(FootTileError, ValueError):
    """A configuration or scenario file cannot be parsed."""


class AlignmentError(FootTileError):
    """Tile and reference streams are misaligned by more than one frame."""

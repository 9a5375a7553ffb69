"""Exception types shared across the gridshape package."""


class GridShapeError(Exception):
    """Base class for all gridshape errors."""


class ImageFormatError(GridShapeError):
    """Raised when an input raster is not a supported format (PNG, PGM, BMP)."""


class EmptyShapeError(GridShapeError):
    """Raised when an image contains no shape pixels."""


class DegenerateShapeError(GridShapeError):
    """Raised when a shape has no spatial extent (e.g. a single pixel grid)."""


class ComparabilityError(GridShapeError):
    """Raised when two features or descriptors cannot be compared
    (length mismatch or differing config fingerprints)."""


class DescriptorParseError(GridShapeError):
    """Raised when a descriptor record cannot be parsed.

    Carries the offending line number and field name when known.
    """

    def __init__(self, message, line=None, field=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field


class ValidationError(GridShapeError):
    """Raised when a parsed descriptor violates its invariants."""


class CorruptIndexError(GridShapeError):
    """Raised when an index file is malformed or internally inconsistent."""


class EmptyIndexError(GridShapeError):
    """Raised when an index build produces zero usable entries."""


class EmptyDatabaseError(GridShapeError):
    """Raised when ranking is requested against an empty database."""


class EvaluationError(GridShapeError):
    """Raised when an evaluation precondition fails (e.g. unlabeled entries)."""

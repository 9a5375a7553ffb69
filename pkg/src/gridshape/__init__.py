"""gridshape: binary shape retrieval with labeled-grid descriptors.

Pipeline: load and binarize a raster, keep the largest component, build an
orientation-aligned labeled grid, and fuse grid track probabilities, a
grid-derived centroid distance signature and five global statistics into a
composite descriptor. Descriptors are matched by a weighted combination of
per-feature similarities and evaluated with precision/recall and bull's-eye
scoring.
"""

from .contour_signature import CdfSignature, cdf_from_grid
from .descriptor import CompositeDescriptor, extract, parse, serialize, validate
from .errors import (
    ComparabilityError,
    CorruptIndexError,
    DegenerateShapeError,
    DescriptorParseError,
    EmptyDatabaseError,
    EmptyIndexError,
    EmptyShapeError,
    EvaluationError,
    GridShapeError,
    ImageFormatError,
    ValidationError,
)
from .evalkit import BullseyeReport, PrCurve, bullseye, precision_recall, tune_weights
from .index import ShapeIndex, build_index, class_from_filename, load_index, save_index
from .labeledgrid import (
    CellLabel,
    GridConfig,
    GridDescriptor,
    LabeledGrid,
    build_grid,
    track_of,
    track_probabilities,
)
from .matcher import (
    RankedResult,
    WeightVector,
    feature_similarity,
    rank,
    weighted_similarity,
)
from .moments import (
    GlobalFeatures,
    MomentSet,
    compute_moments,
    disambiguate_orientation,
    global_features,
)
from .raster import (
    BinaryImage,
    Contour,
    convex_hull_area,
    largest_component,
    load_image,
    perimeter,
    trace_contour,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryImage", "Contour", "load_image", "largest_component",
    "trace_contour", "perimeter", "convex_hull_area",
    "MomentSet", "GlobalFeatures", "compute_moments",
    "disambiguate_orientation", "global_features",
    "GridConfig", "CellLabel", "LabeledGrid", "GridDescriptor",
    "build_grid", "track_of", "track_probabilities",
    "CdfSignature", "cdf_from_grid",
    "CompositeDescriptor", "extract", "serialize", "parse", "validate",
    "WeightVector", "RankedResult", "feature_similarity",
    "weighted_similarity", "rank",
    "ShapeIndex", "class_from_filename", "build_index", "save_index",
    "load_index",
    "PrCurve", "BullseyeReport", "precision_recall", "bullseye",
    "tune_weights",
    "GridShapeError", "ImageFormatError", "EmptyShapeError",
    "DegenerateShapeError", "ComparabilityError", "DescriptorParseError",
    "ValidationError", "CorruptIndexError", "EmptyIndexError",
    "EmptyDatabaseError", "EvaluationError",
]

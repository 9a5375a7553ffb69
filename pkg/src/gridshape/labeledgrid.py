"""Orientation-aligned N x N labeled grid over a shape and the track-wise
occurrence probabilities of interior and boundary cells.

The grid frame is centered on the shape centroid, rotated to the
disambiguated principal orientation, with square cells sized from the
longer side of the oriented bounding box of pixel centers. Every pixel
center lands in exactly one cell (half-open intervals); grid coordinates
within SNAP_EPS of a cell boundary are snapped onto it first so that
exact 90-degree rotations relabel identically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateShapeError
from .moments import MomentSet, centered_pixel_coords
from .raster import BinaryImage

SNAP_EPS = 1e-9


class CellLabel(enum.IntEnum):
    BACKGROUND = 0
    BOUNDARY = 1
    INTERIOR = 2


@dataclass(frozen=True)
class GridConfig:
    """Grid side length (odd, >= 3) and interior coverage threshold."""

    n: int = 21
    tau: float = 0.75

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError("grid size must be odd and >= 3")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("interior threshold must lie in (0, 1]")

    @property
    def tracks(self) -> int:
        """Number of concentric tracks including the central cell."""
        return (self.n - 1) // 2 + 1


@dataclass(frozen=True)
class GridFrame:
    """Placement of the grid in image space."""

    cx: float
    cy: float
    angle: float
    cell_size: float


@dataclass(eq=False)
class LabeledGrid:
    config: GridConfig
    labels: np.ndarray  # (n, n) int8 of CellLabel values
    frame: GridFrame

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int8)
        if labels.shape != (self.config.n, self.config.n):
            raise ValueError("label matrix shape does not match config")
        labels.setflags(write=False)
        self.labels = labels


@dataclass(eq=False)
class GridDescriptor:
    """Per-track occurrence probabilities, tracks 0..(n-1)/2."""

    interior_probs: np.ndarray
    boundary_probs: np.ndarray

    def __post_init__(self):
        self.interior_probs = np.asarray(self.interior_probs, dtype=np.float64)
        self.boundary_probs = np.asarray(self.boundary_probs, dtype=np.float64)
        if self.interior_probs.shape != self.boundary_probs.shape:
            raise ValueError("interior and boundary vectors must match in length")
        self.interior_probs.setflags(write=False)
        self.boundary_probs.setflags(write=False)

    def concatenated(self) -> np.ndarray:
        return np.concatenate([self.interior_probs, self.boundary_probs])

    def __eq__(self, other):
        if not isinstance(other, GridDescriptor):
            return NotImplemented
        return np.array_equal(self.interior_probs, other.interior_probs) and \
            np.array_equal(self.boundary_probs, other.boundary_probs)


def grid_coordinates(img: BinaryImage, angle: float, n: int):
    """Map shape-pixel centers into continuous grid coordinates.

    Returns (gu, gv, cell_size): gu/gv in [0, n) with the centroid at the
    exact center (n/2, n/2). Raises for shapes with zero spatial extent.
    """
    dx, dy = centered_pixel_coords(img)
    c, s = math.cos(angle), math.sin(angle)
    u = dx * c + dy * s
    v = -dx * s + dy * c
    extent = max(float(u.max() - u.min()), float(v.max() - v.min()))
    if extent <= 0.0:
        raise DegenerateShapeError("shape has zero spatial extent")
    cell = extent / n
    gu = u / cell + n / 2.0
    gv = v / cell + n / 2.0
    return gu, gv, cell


def _snap_floor(g: np.ndarray, n: int) -> np.ndarray:
    """Half-open bucketing with boundary snapping and edge clamping."""
    nearest = np.round(g)
    snapped = np.where(np.abs(g - nearest) <= SNAP_EPS, nearest, g)
    idx = np.floor(snapped).astype(np.int64)
    return np.clip(idx, 0, n - 1)


def build_grid(
    img: BinaryImage,
    m: MomentSet,
    angle: float,
    cfg: GridConfig = GridConfig(),
) -> LabeledGrid:
    """Label every grid cell Interior / Boundary / Background.

    Coverage of a cell is (pixel centers in cell) / cell_size^2; a cell is
    Interior when coverage >= tau, Boundary when partially covered, and
    Background when empty. Pixels beyond the grid along the shorter box
    side clamp into the nearest edge cell.
    """
    n = cfg.n
    gu, gv, cell = grid_coordinates(img, angle, n)
    cols = _snap_floor(gu, n)
    rows = _snap_floor(gv, n)
    counts = np.bincount(rows * n + cols, minlength=n * n).reshape(n, n)
    coverage = counts / (cell * cell)
    labels = np.zeros((n, n), dtype=np.int8)
    labels[(counts > 0) & (coverage < cfg.tau)] = CellLabel.BOUNDARY
    labels[coverage >= cfg.tau] = CellLabel.INTERIOR
    frame = GridFrame(cx=m.cx, cy=m.cy, angle=angle, cell_size=cell)
    return LabeledGrid(config=cfg, labels=labels, frame=frame)


def track_of(i: int, j: int, n: int) -> int:
    """Chebyshev distance of cell (i, j) from the central cell."""
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError("cell index out of range")
    c = (n - 1) // 2
    return max(abs(i - c), abs(j - c))


def track_index_matrix(n: int) -> np.ndarray:
    """Track number of every cell of an n x n grid."""
    c = (n - 1) // 2
    offsets = np.abs(np.arange(n) - c)
    return np.maximum.outer(offsets, offsets)


def track_probabilities(g: LabeledGrid, exclude_center: bool = False) -> GridDescriptor:
    """Occurrence probability of each label class per track.

    prob[d] = (cells of the class at track d) / (total cells of the class);
    a class with no cells yields an all-zero vector. With exclude_center,
    the central cell is dropped from both counts and totals.
    """
    n = g.config.n
    tracks = track_index_matrix(n)
    ntracks = g.config.tracks
    out = []
    for label in (CellLabel.INTERIOR, CellLabel.BOUNDARY):
        where = g.labels == label
        if exclude_center:
            where = where & (tracks > 0)
        per_track = np.bincount(tracks[where], minlength=ntracks).astype(np.float64)
        total = per_track.sum()
        out.append(per_track / total if total > 0 else per_track)
    return GridDescriptor(interior_probs=out[0], boundary_probs=out[1])

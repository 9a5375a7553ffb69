"""Centroid distance signature derived from the boundary cells of the
labeled grid (not from raw contour pixels, which makes it tolerant to
small contour deformations).

Each boundary cell contributes (angle, distance) of its center relative
to the grid center, measured in the grid-aligned frame; per angle bin the
outermost distance wins, gaps are filled by circular interpolation, and
the result is normalized by its maximum.
"""

from __future__ import annotations

import numpy as np

from .labeledgrid import CellLabel, LabeledGrid

DEFAULT_BINS = 128


class CdfSignature:
    """Normalized centroid distances over M angle bins, values in [0, 1]."""

    __slots__ = ("bins",)

    def __init__(self, bins):
        arr = np.asarray(bins, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("signature bins must be a 1-D vector")
        arr.setflags(write=False)
        self.bins = arr

    def __len__(self):
        return len(self.bins)

    def __eq__(self, other):
        if not isinstance(other, CdfSignature):
            return NotImplemented
        return np.array_equal(self.bins, other.bins)

    def __repr__(self):
        return f"CdfSignature(M={len(self.bins)})"


def _fill_circular(values: np.ndarray, filled: np.ndarray) -> np.ndarray:
    """Linear interpolation across empty bins, wrapping around."""
    m = len(values)
    known = np.nonzero(filled)[0]
    if len(known) == m:
        return values
    # extend the known samples one period left and right for wraparound
    xp = np.concatenate([known - m, known, known + m])
    fp = np.tile(values[known], 3)
    return np.interp(np.arange(m), xp, fp)


def cdf_from_grid(g: LabeledGrid, m: int = DEFAULT_BINS) -> CdfSignature:
    """Build the M-bin centroid distance signature from boundary cells.

    Zero boundary cells (or boundary mass only at the exact center) yield
    an all-zero signature, flagged degenerate but still comparable.
    """
    if m < 8:
        raise ValueError("signature needs at least 8 angle bins")
    n = g.config.n
    rows, cols = np.nonzero(g.labels == CellLabel.BOUNDARY)
    if len(rows) == 0:
        return CdfSignature(np.zeros(m))
    c = (n - 1) // 2
    du = cols.astype(np.float64) - c
    dv = rows.astype(np.float64) - c
    dist = np.hypot(du, dv)
    angle = np.mod(np.arctan2(dv, du), 2.0 * np.pi)
    idx = np.minimum((angle * m / (2.0 * np.pi)).astype(np.int64), m - 1)

    values = np.zeros(m)
    np.maximum.at(values, idx, dist)  # outermost boundary per bin
    filled = np.zeros(m, dtype=bool)
    filled[idx] = True

    values = _fill_circular(values, filled)
    peak = values.max()
    if peak <= 0.0:
        return CdfSignature(np.zeros(m))
    return CdfSignature(values / peak)

"""Binary raster input: loading, thresholding, connected components and
pixel-level geometry (contour, perimeter, convex hull).

Pixel coordinates are (x, y) = (column, row) with y growing downward.
All functions are pure; BinaryImage and Contour are immutable once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.ndimage as ndi
from PIL import Image, UnidentifiedImageError

from .errors import EmptyShapeError, ImageFormatError

SUPPORTED_FORMATS = {"PNG", "PPM", "BMP"}  # Pillow reports PGM (P5) as "PPM"

# Moore neighborhood in clockwise order (dy, dx), starting north, y down.
_CLOCKWISE = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


@dataclass(eq=False)
class BinaryImage:
    """Rectangular bitmask: mask[y, x] is True on shape pixels."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.ascontiguousarray(np.asarray(self.mask, dtype=bool))
        if mask.ndim != 2 or mask.shape[0] < 1 or mask.shape[1] < 1:
            raise ValueError("mask must be a 2-D array with positive dimensions")
        mask.setflags(write=False)
        self.mask = mask

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def pixel_count(self) -> int:
        return int(self.mask.sum())

    def pixel_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (xs, ys) integer arrays of shape-pixel coordinates in
        row-major order."""
        ys, xs = np.nonzero(self.mask)
        return xs, ys

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.mask.shape == other.mask.shape and bool(
            np.array_equal(self.mask, other.mask)
        )


@dataclass(eq=False)
class Contour:
    """Closed cycle of 8-connected boundary pixels, as (x, y) tuples."""

    points: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, Contour):
            return NotImplemented
        return self.points == other.points


def load_image(path, threshold: float = 0.5, invert: bool = False) -> BinaryImage:
    """Load a PNG/PGM/BMP raster and binarize it.

    A pixel is shape iff its luminance (0..1) >= threshold; `invert`
    flips the polarity for black-on-white inputs. Alpha is ignored.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    try:
        with Image.open(path) as im:
            fmt = im.format
            if fmt not in SUPPORTED_FORMATS:
                raise ImageFormatError(
                    f"unsupported image format {fmt!r} for {path} "
                    "(supported: PNG, PGM, BMP)"
                )
            gray = np.asarray(im.convert("L"), dtype=np.float64)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"cannot decode {path}: {exc}") from exc
    mask = gray >= threshold * 255.0
    if invert:
        mask = ~mask
    if not mask.any():
        raise EmptyShapeError(f"empty shape after binarization: {path}")
    return BinaryImage(mask)


def largest_component(img: BinaryImage) -> BinaryImage:
    """Keep only the largest 8-connected component.

    Ties are broken by the smallest (row, col) of each component's
    first pixel in row-major order.
    """
    if img.pixel_count == 0:
        raise EmptyShapeError("image has no shape pixels")
    labels, count = ndi.label(img.mask, structure=np.ones((3, 3), dtype=int))
    if count == 1:
        return img
    sizes = np.bincount(labels.ravel())[1:]
    best = sizes.max()
    candidates = np.nonzero(sizes == best)[0] + 1
    if len(candidates) > 1:
        # first row-major pixel per candidate decides the tie
        flat = labels.ravel()
        winner = min(candidates, key=lambda lab: int(np.argmax(flat == lab)))
    else:
        winner = candidates[0]
    return BinaryImage(labels == winner)


def _next_boundary_pixel(mask, p, backtrack):
    """Scan the Moore neighborhood of p clockwise, starting just after
    `backtrack`; return (next shape pixel, last background examined)."""
    h, w = mask.shape
    py, px = p
    dy, dx = backtrack[0] - py, backtrack[1] - px
    start = _CLOCKWISE.index((dy, dx))
    prev = backtrack
    for k in range(1, 9):
        oy, ox = _CLOCKWISE[(start + k) % 8]
        q = (py + oy, px + ox)
        if 0 <= q[0] < h and 0 <= q[1] < w and mask[q]:
            return q, prev
        prev = q
    return None, backtrack


def trace_contour(img: BinaryImage) -> Contour:
    """Trace the outer boundary of a single 8-connected component
    (Moore-neighbor tracing; stops on repeating the initial transition).

    Interior holes are not traced. A single-pixel shape yields a
    one-point contour.
    """
    mask = img.mask
    ys, xs = np.nonzero(mask)
    if len(ys) == 0:
        raise EmptyShapeError("cannot trace an empty image")
    start = (int(ys[0]), int(xs[0]))  # topmost-leftmost shape pixel
    first_next, backtrack = _next_boundary_pixel(mask, start, (start[0], start[1] - 1))
    if first_next is None:
        return Contour([(start[1], start[0])])

    points = [start]
    p, b = first_next, backtrack
    limit = 8 * len(ys) + 8
    for _ in range(limit):
        if p == start:
            nxt, nb = _next_boundary_pixel(mask, p, b)
            if nxt == first_next:
                break
            points.append(p)  # genuine revisit through a thin spur
            p, b = nxt, nb
        else:
            points.append(p)
            p, b = _next_boundary_pixel(mask, p, b)
    else:
        raise RuntimeError("contour tracing did not terminate")
    return Contour([(x, y) for y, x in points])


def perimeter(c: Contour) -> float:
    """Closed-cycle length: 1 per 4-neighbor step, sqrt(2) per diagonal."""
    pts = c.points
    n = len(pts)
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        dx, dy = abs(x1 - x0), abs(y1 - y0)
        if dx == 0 and dy == 0:
            continue
        total += math.sqrt(2.0) if dx + dy == 2 else 1.0
    return total


def _convex_hull(points):
    """Andrew's monotone chain on integer points; returns hull CCW."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _row_extremes(xs: np.ndarray, ys: np.ndarray):
    """Leftmost/rightmost pixel per row; only these can lie on the hull.

    Relies on row-major ordering from np.nonzero (ys ascending, xs
    ascending within each row).
    """
    rows, first = np.unique(ys, return_index=True)
    last = np.append(first[1:], len(ys)) - 1
    pts = set()
    for y, lo, hi in zip(rows.tolist(), first.tolist(), last.tolist()):
        pts.add((int(xs[lo]), int(y)))
        pts.add((int(xs[hi]), int(y)))
    return list(pts)


def convex_hull_area(img: BinaryImage) -> float:
    """Area of the convex hull of shape-pixel centers (shoelace formula).

    Collinear or single-pixel shapes have zero hull area. Exact integer
    arithmetic keeps the result translation-invariant bit for bit.
    """
    xs, ys = img.pixel_coords()
    if len(xs) == 0:
        raise EmptyShapeError("image has no shape pixels")
    hull = _convex_hull(_row_extremes(xs, ys))
    if len(hull) < 3:
        return 0.0
    twice = 0
    for i in range(len(hull)):
        x0, y0 = hull[i]
        x1, y1 = hull[(i + 1) % len(hull)]
        twice += x0 * y1 - x1 * y0
    return abs(twice) / 2.0

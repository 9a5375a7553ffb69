"""Geometric moments, principal orientation and the five global shape
statistics (eccentricity, circularity, aspect ratio, extent, solidity).

First and second order sums are accumulated as exact integers before any
float division, so central moments, orientation and everything derived
from them are bit-identical under integer translation of the shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyShapeError
from .raster import BinaryImage, Contour, convex_hull_area, perimeter

# Normalized-skew magnitudes below this are treated as exactly symmetric.
SKEW_EPS = 1e-9


@dataclass(frozen=True)
class MomentSet:
    """Area, centroid, second-order central moments and principal angle."""

    m00: int
    cx: float
    cy: float
    mu20: float
    mu02: float
    mu11: float
    theta: float  # radians in [0, pi)


@dataclass(frozen=True)
class GlobalFeatures:
    eccentricity: float
    circularity: float
    aspect_ratio: float
    extent: float
    solidity: float

    def as_vector(self) -> np.ndarray:
        return np.array(
            [self.eccentricity, self.circularity, self.aspect_ratio,
             self.extent, self.solidity],
            dtype=np.float64,
        )


def _integer_sums(img: BinaryImage):
    """Exact integer pixel sums: (n, sx, sy, sxx, syy, sxy)."""
    xs, ys = img.pixel_coords()
    n = len(xs)
    if n == 0:
        raise EmptyShapeError("cannot compute moments of an empty image")
    x = xs.astype(np.int64)
    y = ys.astype(np.int64)
    return (
        n,
        int(x.sum()), int(y.sum()),
        int((x * x).sum()), int((y * y).sum()), int((x * y).sum()),
    )


def centered_pixel_coords(img: BinaryImage) -> tuple[np.ndarray, np.ndarray]:
    """Shape-pixel centers relative to the centroid, as float arrays.

    Computed as (x*n - sum_x)/n from integers, which is exactly invariant
    under integer translation of the shape.
    """
    xs, ys = img.pixel_coords()
    n = len(xs)
    if n == 0:
        raise EmptyShapeError("cannot compute coordinates of an empty image")
    sx = int(xs.astype(np.int64).sum())
    sy = int(ys.astype(np.int64).sum())
    dx = (xs.astype(np.int64) * n - sx) / float(n)
    dy = (ys.astype(np.int64) * n - sy) / float(n)
    return dx, dy


def compute_moments(img: BinaryImage) -> MomentSet:
    """Centroid, central second moments and principal-axis angle.

    theta = atan2(2*mu11, mu20 - mu02) / 2 folded into [0, pi); an exactly
    isotropic shape (mu20 == mu02 and mu11 == 0, tested on the integer
    numerators) gets theta = 0.
    """
    n, sx, sy, sxx, syy, sxy = _integer_sums(img)
    # numerators of mu * n: exact big-int arithmetic
    num20 = n * sxx - sx * sx
    num02 = n * syy - sy * sy
    num11 = n * sxy - sx * sy
    mu20 = float(num20) / float(n)  # = sum((x - cx)^2), exactly
    mu02 = float(num02) / float(n)
    mu11 = float(num11) / float(n)
    if num20 == num02 and num11 == 0:
        theta = 0.0
    else:
        theta = 0.5 * math.atan2(2.0 * float(num11), float(num20 - num02))
        if theta < 0.0:
            theta += math.pi
        if theta >= math.pi:
            theta -= math.pi
    return MomentSet(
        m00=n,
        cx=sx / float(n),
        cy=sy / float(n),
        mu20=mu20,
        mu02=mu02,
        mu11=mu11,
        theta=theta,
    )


def axis_skew(img: BinaryImage, angle: float) -> float:
    """Normalized third moment of pixel projections on the given axis."""
    dx, dy = centered_pixel_coords(img)
    u = dx * math.cos(angle) + dy * math.sin(angle)
    var = float((u * u).mean())
    if var <= 0.0:
        return 0.0
    return float((u ** 3).mean()) / var ** 1.5


def disambiguate_orientation(img: BinaryImage, m: MomentSet) -> float:
    """Resolve the 180-degree ambiguity of the principal axis.

    Returns theta or theta + pi, whichever makes the projected skewness
    nonnegative; symmetric shapes (|skew| < SKEW_EPS) keep theta.
    """
    skew = axis_skew(img, m.theta)
    if abs(skew) < SKEW_EPS or skew > 0.0:
        return m.theta
    return m.theta + math.pi


def oriented_bbox_area(img: BinaryImage, angle: float) -> float:
    """Area of the bounding box aligned to `angle`, treating pixels as
    unit squares (so a solid axis-aligned rectangle has extent exactly 1)."""
    dx, dy = centered_pixel_coords(img)
    c, s = math.cos(angle), math.sin(angle)
    u = dx * c + dy * s
    v = -dx * s + dy * c
    pad = abs(c) + abs(s)  # projected width of a unit pixel square
    side_u = float(u.max() - u.min()) + pad
    side_v = float(v.max() - v.min()) + pad
    return side_u * side_v


def global_features(
    img: BinaryImage,
    m: MomentSet,
    c: Contour,
    aspect_cap: float = 1e6,
) -> GlobalFeatures:
    """The five global statistics fused into the composite descriptor.

    All are translation invariant and tolerant to rotation and scaling;
    degenerate cases fall back to the pinned values documented inline.
    """
    n = float(m.m00)
    a = m.mu20 / n
    b = m.mu11 / n
    d = m.mu02 / n
    mean = 0.5 * (a + d)
    dev = math.hypot(0.5 * (a - d), b)
    lam1 = mean + dev
    lam2 = max(mean - dev, 0.0)

    eccentricity = math.sqrt(max(1.0 - lam2 / lam1, 0.0)) if lam1 > 0.0 else 0.0

    if lam2 > 0.0:
        aspect_ratio = min(math.sqrt(lam1 / lam2), aspect_cap)
    else:
        aspect_ratio = 1.0 if lam1 == 0.0 else aspect_cap

    p = perimeter(c)
    circularity = 4.0 * math.pi * n / (p * p) if p > 0.0 else 0.0

    box = oriented_bbox_area(img, m.theta)  # box is invariant to the pi flip
    extent = n / box if box > 0.0 else 1.0

    hull = convex_hull_area(img)
    # pixel-count area slightly exceeds a centers-only hull on convex
    # shapes, so cap at 1
    solidity = min(n / hull, 1.0) if hull > 0.0 else 1.0

    return GlobalFeatures(
        eccentricity=eccentricity,
        circularity=circularity,
        aspect_ratio=aspect_ratio,
        extent=extent,
        solidity=solidity,
    )

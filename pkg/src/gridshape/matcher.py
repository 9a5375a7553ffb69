"""Shape matching: per-feature similarity, weighted fusion of the three
feature scores, and ranked retrieval against a descriptor database.

The per-feature similarity of two nonnegative vectors a, b is

    Sim = 1 - (1/n) * sum_i |a_i - b_i| / max(a_i, b_i)

with a term counting 0 when both entries are 0 (identical, no
dissimilarity). For vectors in [0, inf) this lies in [0, 1] and equals 1
exactly iff a == b.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .descriptor import CompositeDescriptor
from .errors import ComparabilityError, EmptyDatabaseError

DEFAULT_WEIGHTS = (0.5, 0.3, 0.2)


@dataclass(frozen=True)
class WeightVector:
    """Convex weights for (grid, cdf, global) feature fusion."""

    w_grid: float = DEFAULT_WEIGHTS[0]
    w_cdf: float = DEFAULT_WEIGHTS[1]
    w_global: float = DEFAULT_WEIGHTS[2]

    def __post_init__(self):
        if min(self.w_grid, self.w_cdf, self.w_global) < 0.0:
            raise ValueError("weights must be nonnegative")
        if abs(self.w_grid + self.w_cdf + self.w_global - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")

    def as_tuple(self):
        return (self.w_grid, self.w_cdf, self.w_global)


@dataclass(frozen=True)
class RankedResult:
    shape_id: str
    class_label: Optional[str]
    score: float
    rank: int


def feature_similarity(a, b) -> float:
    """Similarity of two equal-length nonnegative feature vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape or len(a) < 1:
        raise ComparabilityError(
            f"feature lengths differ: {a.shape} vs {b.shape}"
        )
    if (a < 0).any() or (b < 0).any():
        raise ValueError("feature values must be nonnegative")
    den = np.maximum(a, b)
    diff = np.abs(a - b)
    terms = np.divide(diff, den, out=np.zeros_like(diff), where=den > 0)
    return float(1.0 - terms.mean())


def feature_similarity_matrix(a: np.ndarray, b: np.ndarray,
                              chunk: int = 64) -> np.ndarray:
    """All-pairs feature similarity of row vectors: (na, d) x (nb, d) ->
    (na, nb). Same formula as feature_similarity, evaluated blockwise."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ComparabilityError(
            f"feature lengths differ: {a.shape} vs {b.shape}"
        )
    if (a < 0).any() or (b < 0).any():
        raise ValueError("feature values must be nonnegative")
    na = a.shape[0]
    out = np.empty((na, b.shape[0]), dtype=np.float64)
    bb = b[None, :, :]
    for lo in range(0, na, chunk):
        hi = min(lo + chunk, na)
        block = a[lo:hi, None, :]
        den = np.maximum(block, bb)
        diff = np.abs(block - bb)
        terms = np.divide(diff, den, out=np.zeros_like(diff), where=den > 0)
        out[lo:hi] = 1.0 - terms.mean(axis=2)
    return out


def _check_comparable(p: CompositeDescriptor, q: CompositeDescriptor):
    if p.fingerprint != q.fingerprint:
        raise ComparabilityError(
            f"config fingerprints differ: {p.fingerprint} vs {q.fingerprint}"
        )


def component_similarities(p: CompositeDescriptor, q: CompositeDescriptor):
    """(grid, cdf, global) similarity scores of two descriptors."""
    _check_comparable(p, q)
    return (
        feature_similarity(p.grid.concatenated(), q.grid.concatenated()),
        feature_similarity(p.cdf.bins, q.cdf.bins),
        feature_similarity(p.global_features.as_vector(),
                           q.global_features.as_vector()),
    )


def weighted_similarity(p: CompositeDescriptor, q: CompositeDescriptor,
                        w: WeightVector = WeightVector()) -> float:
    """Final similarity: convex combination of the three feature scores."""
    s_grid, s_cdf, s_global = component_similarities(p, q)
    return w.w_grid * s_grid + w.w_cdf * s_cdf + w.w_global * s_global


def rank(
    query: CompositeDescriptor,
    db: Sequence[CompositeDescriptor],
    w: WeightVector = WeightVector(),
    k: int = 20,
) -> list[RankedResult]:
    """Top-k entries of db by weighted similarity to the query.

    Sorted by score descending, ties broken by shape_id ascending;
    insensitive to db input order.
    """
    if len(db) == 0:
        raise EmptyDatabaseError("cannot rank against an empty database")
    if k < 1:
        raise ValueError("cutoff k must be >= 1")
    scored = [(weighted_similarity(query, d, w), d) for d in db]
    scored.sort(key=lambda t: (-t[0], t[1].shape_id))
    return [
        RankedResult(shape_id=d.shape_id, class_label=d.class_label,
                     score=s, rank=i + 1)
        for i, (s, d) in enumerate(scored[: min(k, len(scored))])
    ]

"""Retrieval evaluation: precision/recall curves, the bull's-eye protocol
and an exhaustive weight search over the fusion simplex.

All-pairs scoring is vectorized: the three per-feature similarity
matrices are computed once and reused for every weight candidate, since
the fused score is just their convex combination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .descriptor import CompositeDescriptor
from .errors import EvaluationError
from .index import ShapeIndex
from .matcher import WeightVector, feature_similarity_matrix

BULLSEYE_CUTOFF = 40


@dataclass(frozen=True)
class PrPoint:
    k: int
    precision: float
    recall: float


@dataclass(eq=False)
class PrCurve:
    query_id: str
    points: list  # of PrPoint, k = 1..K


@dataclass(eq=False)
class BullseyeReport:
    per_query_hits: list  # of (shape_id, same-class count in top cutoff)
    overall_score: float
    cutoff: int


def _feature_rows(entries):
    grid = np.stack([d.grid.concatenated() for d in entries])
    cdf = np.stack([d.cdf.bins for d in entries])
    stats = np.stack([d.global_features.as_vector() for d in entries])
    return grid, cdf, stats


def component_matrices(entries) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All-pairs (grid, cdf, global) similarity matrices for an entry list."""
    grid, cdf, stats = _feature_rows(entries)
    return (
        feature_similarity_matrix(grid, grid),
        feature_similarity_matrix(cdf, cdf),
        feature_similarity_matrix(stats, stats),
    )


def fused_scores(mats, w: WeightVector) -> np.ndarray:
    g, c, s = mats
    return w.w_grid * g + w.w_cdf * c + w.w_global * s


def _class_codes(entries) -> np.ndarray:
    labels = []
    missing = [d.shape_id for d in entries if d.class_label is None]
    if missing:
        raise EvaluationError(f"unlabeled entries: {', '.join(missing)}")
    classes = {}
    for d in entries:
        labels.append(classes.setdefault(d.class_label, len(classes)))
    return np.asarray(labels, dtype=np.int64)


def _ranked_order(scores: np.ndarray) -> np.ndarray:
    """Row-wise candidate order: score descending, ties by entry position
    (entries are in canonical shape_id order, so ties break by id)."""
    return np.argsort(-scores, axis=-1, kind="stable")


def precision_recall(
    query: CompositeDescriptor,
    ix: ShapeIndex,
    w: WeightVector = WeightVector(),
    max_k: Optional[int] = None,
    include_self: bool = False,
) -> PrCurve:
    """Precision and recall at each cutoff k for one query.

    The query itself (matched by shape_id) is excluded from the ranked
    candidates unless include_self is set.
    """
    if query.class_label is None:
        raise EvaluationError(f"query {query.shape_id!r} has no class label")
    candidates = [
        d for d in ix.entries
        if include_self or d.shape_id != query.shape_id
    ]
    if not candidates:
        raise EvaluationError("no candidates to rank")
    relevant_total = sum(1 for d in candidates if d.class_label == query.class_label)
    if relevant_total == 0:
        raise EvaluationError(
            f"index has no entries of class {query.class_label!r}"
        )
    grid, cdf, stats = _feature_rows(candidates)
    sims = (
        w.w_grid * feature_similarity_matrix(query.grid.concatenated()[None, :], grid)
        + w.w_cdf * feature_similarity_matrix(query.cdf.bins[None, :], cdf)
        + w.w_global * feature_similarity_matrix(
            query.global_features.as_vector()[None, :], stats)
    )[0]
    order = _ranked_order(sims)
    flags = np.array(
        [candidates[i].class_label == query.class_label for i in order]
    )
    hits = np.cumsum(flags)
    limit = len(candidates) if max_k is None else min(max_k, len(candidates))
    points = [
        PrPoint(k=k, precision=hits[k - 1] / k, recall=hits[k - 1] / relevant_total)
        for k in range(1, limit + 1)
    ]
    return PrCurve(query_id=query.shape_id, points=points)


def precision_bands(curves, split: float = 0.5):
    """Mean precision over all (query, k) points with recall below/above
    the split. Points with recall exactly at the split count as high."""
    low, high = [], []
    for curve in curves:
        for pt in curve.points:
            (high if pt.recall >= split else low).append(pt.precision)
    mean = lambda xs: float(np.mean(xs)) if xs else 0.0
    return mean(low), mean(high)


def bullseye_from_scores(
    scores: np.ndarray,
    codes: np.ndarray,
    cutoff: int = BULLSEYE_CUTOFF,
    exclude_self: bool = False,
) -> tuple[np.ndarray, float]:
    """Per-query same-class hit counts and the overall score.

    scores[i, j] is the similarity of query i to entry j; the overall
    score divides total hits by the sum of class sizes (the maximum
    attainable when every class fits inside the cutoff).
    """
    n = len(codes)
    if scores.shape != (n, n):
        raise EvaluationError(f"score matrix {scores.shape} does not match "
                              f"{n} labels")
    if exclude_self:
        scores = scores.copy()
        np.fill_diagonal(scores, -np.inf)
    top = min(cutoff, n)
    order = _ranked_order(scores)[:, :top]
    same = codes[order] == codes[:, None]
    hits = same.sum(axis=1)
    class_sizes = np.bincount(codes)
    denominator = int(class_sizes[codes].sum())
    return hits, float(hits.sum() / denominator)


def bullseye(
    ix: ShapeIndex,
    w: WeightVector = WeightVector(),
    cutoff: int = BULLSEYE_CUTOFF,
    exclude_self: bool = False,
) -> BullseyeReport:
    """Bull's-eye retrieval score over every index entry as query.

    Each entry is ranked against the whole index (itself included, unless
    exclude_self); hits are same-class entries among the top `cutoff`.
    """
    codes = _class_codes(ix.entries)
    scores = fused_scores(component_matrices(ix.entries), w)
    hits, overall = bullseye_from_scores(scores, codes, cutoff=cutoff,
                                         exclude_self=exclude_self)
    per_query = [(d.shape_id, int(h)) for d, h in zip(ix.entries, hits)]
    return BullseyeReport(per_query_hits=per_query, overall_score=overall,
                          cutoff=cutoff)


def weight_candidates(step: float = 0.05):
    """Lattice of the weight simplex {(a, b, 1-a-b) : a, b >= 0, a+b <= 1}."""
    if not 0.0 < step <= 0.5:
        raise ValueError("step must lie in (0, 0.5]")
    imax = int(round(1.0 / step))
    out = []
    for i in range(imax + 1):
        a = min(i * step, 1.0)
        for j in range(imax - i + 1):
            b = min(j * step, 1.0 - a)
            c = max(1.0 - a - b, 0.0)  # guards float dust at the simplex edge
            out.append(WeightVector(a, b, c))
    return out


def tune_weights(
    ix: ShapeIndex,
    step: float = 0.05,
    cutoff: int = BULLSEYE_CUTOFF,
    exclude_self: bool = False,
):
    """Exhaustive bull's-eye maximization over the weight simplex.

    Returns (best WeightVector, best score, [(WeightVector, score), ...]).
    Ties prefer larger w_grid, then larger w_cdf.
    """
    codes = _class_codes(ix.entries)
    mats = component_matrices(ix.entries)
    results = []
    for w in weight_candidates(step):
        _, score = bullseye_from_scores(
            fused_scores(mats, w), codes, cutoff=cutoff,
            exclude_self=exclude_self,
        )
        results.append((w, score))
    best, best_score = max(
        results, key=lambda t: (t[1], t[0].w_grid, t[0].w_cdf)
    )
    return best, best_score, results

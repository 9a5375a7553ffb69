import math

import numpy as np
import pytest

from gridshape import (
    BinaryImage,
    CellLabel,
    DegenerateShapeError,
    GridConfig,
    build_grid,
    compute_moments,
    disambiguate_orientation,
    track_of,
    track_probabilities,
)
from gridshape.labeledgrid import GridFrame, LabeledGrid, track_index_matrix

import corpus


def grid_for(img, cfg=GridConfig()):
    m = compute_moments(img)
    return build_grid(img, m, disambiguate_orientation(img, m), cfg)


def brute_force_labels(img, cfg):
    """Independent per-pixel bucketing oracle.

    Recomputes the frame from scratch (plain float means), buckets every
    pixel one at a time, and recomputes coverage per cell. Shares only the
    published mapping rule: rotate by -angle about the centroid, divide by
    cell_size, offset by n/2, snap within 1e-9 of a boundary, floor, clamp.
    """
    xs, ys = (np.nonzero(img.mask)[1], np.nonzero(img.mask)[0])
    n_px = len(xs)
    cx = xs.mean()
    cy = ys.mean()
    m = compute_moments(img)
    angle = disambiguate_orientation(img, m)
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    us, vs = [], []
    for x, y in zip(xs.tolist(), ys.tolist()):
        dx, dy = x - cx, y - cy
        us.append(dx * cos_a + dy * sin_a)
        vs.append(-dx * sin_a + dy * cos_a)
    extent = max(max(us) - min(us), max(vs) - min(vs))
    n = cfg.n
    cell = extent / n

    def bucket(value):
        g = value / cell + n / 2.0
        nearest = round(g)
        if abs(g - nearest) <= 1e-9:
            g = nearest
        return min(max(int(math.floor(g)), 0), n - 1)

    counts = [[0] * n for _ in range(n)]
    for u, v in zip(us, vs):
        counts[bucket(v)][bucket(u)] += 1
    labels = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        for j in range(n):
            coverage = counts[i][j] / (cell * cell)
            if counts[i][j] == 0:
                labels[i, j] = CellLabel.BACKGROUND
            elif coverage >= cfg.tau:
                labels[i, j] = CellLabel.INTERIOR
            else:
                labels[i, j] = CellLabel.BOUNDARY
    return labels


# ------------------------------------------------------------------ GridConfig

@pytest.mark.parametrize("n", [2, 4, 1, 0, -3])
def test_config_rejects_even_or_small(n):
    with pytest.raises(ValueError, match="odd"):
        GridConfig(n=n)


@pytest.mark.parametrize("tau", [0.0, -0.1, 1.5])
def test_config_rejects_bad_tau(tau):
    with pytest.raises(ValueError):
        GridConfig(tau=tau)


def test_track_count():
    assert GridConfig(n=21).tracks == 11
    assert GridConfig(n=3).tracks == 2


# ------------------------------------------------------------------ build_grid

def test_solid_square_n3_all_interior():
    mask = np.zeros((40, 40), dtype=bool)
    mask[5:35, 5:35] = True
    g = grid_for(BinaryImage(mask), GridConfig(n=3))
    assert (np.array(g.labels) == CellLabel.INTERIOR).all()


def test_annulus_center_background():
    img = corpus.place(corpus.annulus_mask(1.0), 5, 5)
    g = grid_for(img, GridConfig(n=9))
    lab = np.array(g.labels)
    c = 4
    assert lab[c, c] == CellLabel.BACKGROUND
    tracks = track_index_matrix(9)
    outer = lab[tracks >= 3]
    assert (outer != CellLabel.BACKGROUND).any()


def test_single_pixel_degenerate():
    mask = np.zeros((5, 5), dtype=bool)
    mask[2, 2] = True
    img = BinaryImage(mask)
    m = compute_moments(img)
    with pytest.raises(DegenerateShapeError):
        build_grid(img, m, 0.0, GridConfig(n=3))


@pytest.mark.parametrize("family", corpus.FAMILIES)
def test_labels_match_brute_force_oracle(family):
    img = corpus.place(corpus.family_mask(family, 0.5), 4, 9)
    cfg = GridConfig(n=9)
    g = grid_for(img, cfg)
    assert np.array_equal(np.array(g.labels), brute_force_labels(img, cfg))


def test_oracle_on_rotated_and_translated():
    img = corpus.place(np.rot90(corpus.triangle_mask(0.5)), 13, 6)
    cfg = GridConfig(n=11)
    g = grid_for(img, cfg)
    assert np.array_equal(np.array(g.labels), brute_force_labels(img, cfg))


def test_90_rotation_same_descriptor():
    for family in corpus.FAMILIES:
        img = corpus.place(corpus.family_mask(family, 0.5), 4, 6)
        a = track_probabilities(grid_for(img))
        b = track_probabilities(grid_for(corpus.rotated(img, 1)))
        assert np.array_equal(a.interior_probs, b.interior_probs), family
        assert np.array_equal(a.boundary_probs, b.boundary_probs), family


def test_grid_frame_recorded():
    img = corpus.place(corpus.disk_mask(0.5), 3, 3)
    g = grid_for(img)
    assert isinstance(g.frame, GridFrame)
    assert g.frame.cell_size > 0


# -------------------------------------------------------------------- track_of

def test_track_center():
    assert track_of(2, 2, 5) == 0
    assert track_of(10, 10, 21) == 0


def test_track_matches_ring_layout():
    # 5x5 ring layout: distance-1 ring around the center, distance-2 rim
    assert track_of(0, 2, 5) == 2
    assert track_of(1, 1, 5) == 1
    assert track_of(4, 4, 5) == 2
    expected = np.array([
        [2, 2, 2, 2, 2],
        [2, 1, 1, 1, 2],
        [2, 1, 0, 1, 2],
        [2, 1, 1, 1, 2],
        [2, 2, 2, 2, 2],
    ])
    assert np.array_equal(track_index_matrix(5), expected)


@pytest.mark.parametrize("n", [3, 5, 9, 21])
def test_ring_sizes(n):
    tracks = track_index_matrix(n)
    for d in range((n - 1) // 2 + 1):
        size = int((tracks == d).sum())
        assert size == (1 if d == 0 else 8 * d)


def test_track_of_range_check():
    with pytest.raises(ValueError):
        track_of(5, 0, 5)


# --------------------------------------------------------- track_probabilities

def make_grid(labels):
    labels = np.asarray(labels, dtype=np.int8)
    n = labels.shape[0]
    return LabeledGrid(GridConfig(n=n), labels, GridFrame(0.0, 0.0, 0.0, 1.0))


def test_probabilities_center_and_ring():
    lab = np.zeros((5, 5), dtype=np.int8)
    lab[2, 2] = CellLabel.INTERIOR
    tracks = track_index_matrix(5)
    lab[tracks == 1] = CellLabel.BOUNDARY
    d = track_probabilities(make_grid(lab))
    assert d.interior_probs.tolist() == [1.0, 0.0, 0.0]
    assert d.boundary_probs.tolist() == [0.0, 1.0, 0.0]


def test_probabilities_uniform_grid():
    lab = np.full((5, 5), CellLabel.INTERIOR, dtype=np.int8)
    d = track_probabilities(make_grid(lab))
    assert d.interior_probs.tolist() == pytest.approx([1 / 25, 8 / 25, 16 / 25])
    assert d.boundary_probs.tolist() == [0.0, 0.0, 0.0]
    assert d.interior_probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_probabilities_empty_class_all_zero():
    lab = np.zeros((3, 3), dtype=np.int8)
    lab[0, 0] = CellLabel.INTERIOR
    d = track_probabilities(make_grid(lab))
    assert d.boundary_probs.tolist() == [0.0, 0.0]
    assert d.interior_probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_exclude_center_drops_track_zero():
    lab = np.zeros((5, 5), dtype=np.int8)
    lab[2, 2] = CellLabel.INTERIOR
    tracks = track_index_matrix(5)
    lab[tracks == 1] = CellLabel.INTERIOR
    d = track_probabilities(make_grid(lab), exclude_center=True)
    assert d.interior_probs.tolist() == [0.0, 1.0, 0.0]


def test_normalization_on_corpus():
    for _, _, img in corpus.retrieval_corpus(per_family=2):
        d = track_probabilities(grid_for(img))
        for vec in (d.interior_probs, d.boundary_probs):
            total = vec.sum()
            assert total == 0.0 or abs(total - 1.0) <= 1e-9
            assert (vec >= 0).all() and (vec <= 1).all()


def test_translation_invariance_exact():
    mask = corpus.family_mask("cross", 0.5)
    a = track_probabilities(grid_for(corpus.place(mask, 3, 5)))
    b = track_probabilities(grid_for(corpus.place(mask, 17, 11, 5, 8)))
    assert a == b


def test_2x_parametric_scale_l1_drift():
    for family in ("disk", "square", "rect", "triangle"):
        a = track_probabilities(grid_for(corpus.place(corpus.family_mask(family, 0.6), 5, 7)))
        b = track_probabilities(grid_for(corpus.place(corpus.family_mask(family, 1.2), 5, 7)))
        drift = (np.abs(a.interior_probs - b.interior_probs).sum()
                 + np.abs(a.boundary_probs - b.boundary_probs).sum())
        assert drift <= 0.15, (family, drift)

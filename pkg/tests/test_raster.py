import math

import numpy as np
import pytest
from PIL import Image

from gridshape import (
    BinaryImage,
    Contour,
    EmptyShapeError,
    ImageFormatError,
    convex_hull_area,
    largest_component,
    load_image,
    perimeter,
    trace_contour,
)

import corpus


def as_image(rows):
    return BinaryImage(np.array(rows, dtype=bool))


# ---------------------------------------------------------------- load_image

def save_gray(path, arr):
    Image.fromarray(np.asarray(arr, dtype=np.uint8), mode="L").save(path)


def test_load_all_white(tmp_path):
    p = tmp_path / "w.png"
    save_gray(p, np.full((4, 4), 255))
    img = load_image(p)
    assert img.pixel_count == 16
    assert (img.width, img.height) == (4, 4)


def test_load_all_black_raises(tmp_path):
    p = tmp_path / "b.png"
    save_gray(p, np.zeros((4, 4)))
    with pytest.raises(EmptyShapeError, match="empty shape after binarization"):
        load_image(p)


def test_load_checkerboard_threshold(tmp_path):
    # gray levels 0.2 and 0.8: 51 and 204 out of 255
    p = tmp_path / "c.png"
    save_gray(p, np.array([[51, 204], [204, 51]]))
    img = load_image(p, threshold=0.5)
    # oracle: per-pixel comparison 204/255 >= 0.5 > 51/255
    assert img.pixel_count == 2
    assert img.mask[0, 1] and img.mask[1, 0]


def test_load_invert(tmp_path):
    p = tmp_path / "c.png"
    save_gray(p, np.array([[51, 204], [204, 51]]))
    img = load_image(p, invert=True)
    assert img.mask[0, 0] and img.mask[1, 1]
    assert img.pixel_count == 2


@pytest.mark.parametrize("suffix", [".png", ".pgm", ".bmp"])
def test_load_supported_formats(tmp_path, suffix):
    p = tmp_path / ("x" + suffix)
    save_gray(p, np.full((3, 5), 255))
    assert load_image(p).pixel_count == 15


def test_load_rgb_with_alpha(tmp_path):
    p = tmp_path / "rgba.png"
    arr = np.zeros((2, 2, 4), dtype=np.uint8)
    arr[..., :3] = 255
    arr[..., 3] = 0  # fully transparent, must still be ignored
    Image.fromarray(arr, mode="RGBA").save(p)
    assert load_image(p).pixel_count == 4


def test_load_gif_rejected(tmp_path):
    p = tmp_path / "x.gif"
    save_gray(p, np.full((3, 3), 255))
    with pytest.raises(ImageFormatError):
        load_image(p)


def test_load_missing_file():
    with pytest.raises(OSError):
        load_image("/nonexistent/nowhere.png")


def test_load_garbage_bytes(tmp_path):
    p = tmp_path / "x.png"
    p.write_bytes(b"not an image at all")
    with pytest.raises(ImageFormatError):
        load_image(p)


# -------------------------------------------------------- largest_component

def flood_sizes(mask):
    """Independent 8-connected component sizes via BFS flood fill."""
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    h, w = mask.shape
    for sy in range(h):
        for sx in range(w):
            if mask[sy, sx] and not seen[sy, sx]:
                stack = [(sy, sx)]
                seen[sy, sx] = True
                pixels = []
                while stack:
                    y, x = stack.pop()
                    pixels.append((y, x))
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            ny, nx = y + dy, x + dx
                            if 0 <= ny < h and 0 <= nx < w and \
                                    mask[ny, nx] and not seen[ny, nx]:
                                seen[ny, nx] = True
                                stack.append((ny, nx))
                comps.append(pixels)
    return comps


def test_single_blob_unchanged():
    img = as_image([[0, 0, 0], [0, 1, 1], [0, 1, 1]])
    assert largest_component(img) == img


def test_blob_with_speck():
    mask = np.zeros((9, 9), dtype=bool)
    mask[1:6, 1:6] = True
    mask[8, 8] = True
    comps = flood_sizes(mask)
    assert sorted(len(c) for c in comps) == [1, 25]
    out = largest_component(BinaryImage(mask))
    assert out.pixel_count == 25
    assert not out.mask[8, 8]


def test_tie_break_topleft():
    mask = np.zeros((6, 6), dtype=bool)
    mask[0:2, 0:2] = True
    mask[3:5, 3:5] = True
    out = largest_component(BinaryImage(mask))
    assert out.mask[0, 0] and not out.mask[3, 3]


def test_idempotent_and_conservative():
    rng = np.random.default_rng(3)
    for _ in range(20):
        mask = rng.random((16, 16)) < 0.35
        if not mask.any():
            continue
        img = BinaryImage(mask)
        once = largest_component(img)
        assert largest_component(once) == once
        assert once.pixel_count <= img.pixel_count


def test_empty_raises():
    with pytest.raises(EmptyShapeError):
        largest_component(as_image([[0, 0], [0, 0]]))


# ------------------------------------------------------------ trace_contour

def border_pixels(mask):
    """Shape pixels with a 4-neighbor background pixel (or image border)."""
    h, w = mask.shape
    out = set()
    for y in range(h):
        for x in range(w):
            if not mask[y, x]:
                continue
            for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ny, nx = y + dy, x + dx
                if not (0 <= ny < h and 0 <= nx < w) or not mask[ny, nx]:
                    out.add((x, y))
                    break
    return out


def test_single_pixel_contour():
    img = as_image([[0, 0], [0, 1]])
    assert trace_contour(img) == Contour([(1, 1)])


def test_square_3x3_contour():
    mask = np.zeros((5, 5), dtype=bool)
    mask[1:4, 1:4] = True
    c = trace_contour(BinaryImage(mask))
    assert len(c) == 8
    assert set(c.points) == border_pixels(mask)


def test_square_10x10_contour():
    mask = np.ones((10, 10), dtype=bool)
    c = trace_contour(BinaryImage(mask))
    assert len(c) == 36  # 4*10 - 4 border pixels
    assert set(c.points) == border_pixels(mask)


def test_contour_is_closed_8_cycle():
    for _, img in corpus.all_shapes(scale=0.2):
        c = trace_contour(img)
        pts = c.points
        for i in range(len(pts)):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % len(pts)]
            assert max(abs(x1 - x0), abs(y1 - y0)) == 1
            assert img.mask[y0, x0]  # contour subset of shape


def test_contour_points_touch_background():
    for _, img in corpus.all_shapes(scale=0.2):
        border = border_pixels(img.mask)
        for p in trace_contour(img).points:
            assert p in border


# ---------------------------------------------------------------- perimeter

def step_count_oracle(points):
    """Independent classification of cycle steps into straight/diagonal."""
    straight = diagonal = 0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        d = abs(x1 - x0) + abs(y1 - y0)
        if d == 1:
            straight += 1
        elif d == 2:
            diagonal += 1
    return straight, diagonal


def test_perimeter_single_pixel():
    assert perimeter(Contour([(3, 4)])) == 0.0


def test_perimeter_3x3_square():
    mask = np.zeros((5, 5), dtype=bool)
    mask[1:4, 1:4] = True
    c = trace_contour(BinaryImage(mask))
    straight, diagonal = step_count_oracle(c.points)
    assert (straight, diagonal) == (8, 0)
    assert perimeter(c) == 8.0


def test_perimeter_diagonal_staircase():
    mask = np.zeros((4, 4), dtype=bool)
    mask[0, 0] = mask[1, 1] = mask[2, 2] = True
    c = trace_contour(BinaryImage(mask))
    straight, diagonal = step_count_oracle(c.points)
    expected = straight * 1.0 + diagonal * math.sqrt(2.0)
    assert perimeter(c) == pytest.approx(expected)
    # 2*sqrt(2) up the open path, and the same back to close the cycle
    assert perimeter(c) == pytest.approx(4 * math.sqrt(2.0))


# --------------------------------------------------------- convex_hull_area

def test_hull_single_pixel():
    assert convex_hull_area(as_image([[1]])) == 0.0


def test_hull_collinear():
    img = as_image([[1, 1, 1, 1]])
    assert convex_hull_area(img) == 0.0


def test_hull_triangle():
    mask = np.zeros((5, 6), dtype=bool)
    mask[0, 0] = True
    mask[0, 4] = True
    mask[3, 0] = True
    assert convex_hull_area(BinaryImage(mask)) == 6.0  # 0.5 * 4 * 3


@pytest.mark.parametrize("w,h", [(4, 3), (10, 10), (7, 2)])
def test_hull_solid_rectangle(w, h):
    img = BinaryImage(np.ones((h, w), dtype=bool))
    assert convex_hull_area(img) == (w - 1) * (h - 1)


# ------------------------------------------------- translation equivariance

def test_translation_equivariance():
    base = corpus.family_mask("triangle", 0.12)
    a = corpus.place(base, 3, 3)
    b = corpus.place(base, 11, 6)
    ca, cb = trace_contour(a), trace_contour(b)
    dx, dy = 6 - 3, 11 - 3
    assert [(x + dx, y + dy) for x, y in ca.points] == cb.points
    assert perimeter(ca) == perimeter(cb)
    assert convex_hull_area(a) == convex_hull_area(b)

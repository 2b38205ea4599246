import numpy as np
import pytest

from sigmil.imaging import (
    BoundingBox,
    GrayFrame,
    IntegralImage,
    Rect,
    build_integral,
    from_uint8,
    rect_sum,
    to_gray,
)


def naive_rect_sum(pixels: np.ndarray, r: Rect) -> float:
    total = 0.0
    for y in range(r.y, r.y + r.h):
        for x in range(r.x, r.x + r.w):
            total += pixels[y, x]
    return total


class TestToGray:
    def test_all_black(self):
        g = to_gray(np.zeros((4, 5, 3), dtype=np.uint8))
        assert np.all(g.pixels == 0.0)
        assert (g.width, g.height) == (5, 4)

    def test_all_white(self):
        g = to_gray(np.full((3, 3, 3), 255, dtype=np.uint8))
        np.testing.assert_allclose(g.pixels, 1.0, atol=1e-12)

    def test_pure_red(self):
        rgb = np.zeros((1, 1, 3), dtype=np.uint8)
        rgb[0, 0, 0] = 255
        assert to_gray(rgb).pixels[0, 0] == pytest.approx(0.299, abs=1e-12)

    def test_zero_sized_image(self):
        with pytest.raises(ValueError):
            to_gray(np.zeros((0, 5, 3), dtype=np.uint8))

    def test_non_rgb_shape(self):
        with pytest.raises(ValueError):
            to_gray(np.zeros((4, 5), dtype=np.uint8))


class TestGrayFrame:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            GrayFrame(np.array([[0.5, 1.5]]))

    def test_from_uint8(self):
        g = from_uint8(np.array([[0, 255], [128, 64]], dtype=np.uint8))
        assert g.pixels[0, 1] == 1.0
        assert g.pixels[1, 0] == pytest.approx(128 / 255)


class TestBuildIntegral:
    def test_zero_frame(self):
        ii = build_integral(GrayFrame(np.zeros((3, 4))))
        assert np.all(ii.sums == 0.0)
        assert (ii.width, ii.height) == (4, 3)

    def test_two_by_two_ones(self):
        ii = build_integral(GrayFrame(np.ones((2, 2))))
        assert ii.sums[2, 2] == 4.0

    def test_single_pixel(self):
        ii = build_integral(GrayFrame(np.array([[0.5]])))
        assert ii.sums[1, 1] == 0.5

    def test_zero_border(self):
        rng = np.random.default_rng(0)
        ii = build_integral(GrayFrame(rng.random((5, 7))))
        assert np.all(ii.sums[0, :] == 0.0)
        assert np.all(ii.sums[:, 0] == 0.0)

    def test_monotone_for_nonnegative(self):
        rng = np.random.default_rng(1)
        ii = build_integral(GrayFrame(rng.random((6, 6))))
        assert np.all(np.diff(ii.sums, axis=0) >= 0)
        assert np.all(np.diff(ii.sums, axis=1) >= 0)


class TestRectSum:
    def test_zero_frame(self):
        ii = build_integral(GrayFrame(np.zeros((5, 5))))
        assert rect_sum(ii, Rect(1, 2, 3, 2)) == 0.0

    def test_full_frame_of_ones(self):
        ii = build_integral(GrayFrame(np.ones((3, 3))))
        assert rect_sum(ii, Rect(0, 0, 3, 3)) == 9.0

    def test_single_pixel_identity(self):
        px = np.zeros((4, 4))
        px[2, 1] = 0.625
        ii = build_integral(GrayFrame(px))
        assert rect_sum(ii, Rect(1, 2, 1, 1)) == 0.625

    def test_out_of_bounds(self):
        ii = build_integral(GrayFrame(np.ones((4, 4))))
        with pytest.raises(ValueError):
            rect_sum(ii, Rect(2, 2, 3, 1))
        with pytest.raises(ValueError):
            rect_sum(ii, Rect(-1, 0, 2, 2))

    def test_matches_naive_summation(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            h, w = rng.integers(1, 33, size=2)
            frame = GrayFrame(rng.random((h, w)))
            ii = build_integral(frame)
            for _ in range(20):
                rw = int(rng.integers(1, w + 1))
                rh = int(rng.integers(1, h + 1))
                r = Rect(int(rng.integers(0, w - rw + 1)), int(rng.integers(0, h - rh + 1)), rw, rh)
                assert rect_sum(ii, r) == pytest.approx(naive_rect_sum(frame.pixels, r), abs=1e-9)

    def test_additive_under_split(self):
        rng = np.random.default_rng(7)
        frame = GrayFrame(rng.random((10, 12)))
        ii = build_integral(frame)
        for _ in range(50):
            w = int(rng.integers(2, 13))
            h = int(rng.integers(1, 11))
            x = int(rng.integers(0, 12 - w + 1))
            y = int(rng.integers(0, 10 - h + 1))
            cut = int(rng.integers(1, w))
            whole = rect_sum(ii, Rect(x, y, w, h))
            left = rect_sum(ii, Rect(x, y, cut, h))
            right = rect_sum(ii, Rect(x + cut, y, w - cut, h))
            assert whole == pytest.approx(left + right, abs=1e-9)


class TestBoxes:
    def test_rect_validation(self):
        with pytest.raises(ValueError):
            Rect(0, 0, 0, 3)

    def test_bounding_box_center(self):
        assert BoundingBox(2, 4, 10, 20).center == (7.0, 14.0)

    def test_integral_dims(self):
        ii = IntegralImage(np.zeros((4, 6)))
        assert (ii.width, ii.height) == (5, 3)

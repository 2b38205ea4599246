"""Frame loading, grayscale conversion, integral images and rectangle sums."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, top-left corner + size, in pixels."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValueError(f"rect must have w >= 1 and h >= 1, got {self.w}x{self.h}")


@dataclass(frozen=True)
class BoundingBox:
    """Object bounding box; width/height stay fixed for a tracker run."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box must have w >= 1 and h >= 1, got {self.w}x{self.h}")

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)


@dataclass(frozen=True, eq=False)
class GrayFrame:
    """Grayscale frame with intensities normalized into [0, 1].

    `pixels` is a (height, width) float64 array; row-major, origin top-left.
    """

    pixels: np.ndarray

    def __post_init__(self) -> None:
        p = self.pixels
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"frame must be a non-empty 2-D array, got shape {p.shape}")
        if p.dtype != np.float64:
            object.__setattr__(self, "pixels", p.astype(np.float64))
        lo, hi = float(self.pixels.min()), float(self.pixels.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"intensities must lie in [0, 1], got [{lo}, {hi}]")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class IntegralImage:
    """Cumulative-sum grid: sums[y, x] = sum of all pixels above and left of (x, y).

    Stored at (height+1, width+1) with a zero top row / left column so rectangle
    sums need no edge special-casing.
    """

    sums: np.ndarray

    @property
    def width(self) -> int:
        return self.sums.shape[1] - 1

    @property
    def height(self) -> int:
        return self.sums.shape[0] - 1


def to_gray(rgb: np.ndarray) -> GrayFrame:
    """Convert an (h, w, 3) array of 8-bit RGB triples to a normalized GrayFrame.

    Uses the ITU-R 601 luma weights, so output = (0.299 R + 0.587 G + 0.114 B) / 255.
    """
    a = np.asarray(rgb)
    if a.ndim != 3 or a.shape[2] != 3 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty (h, w, 3) RGB array, got shape {a.shape}")
    a = a.astype(np.float64)
    gray = (0.299 * a[:, :, 0] + 0.587 * a[:, :, 1] + 0.114 * a[:, :, 2]) / 255.0
    return GrayFrame(np.clip(gray, 0.0, 1.0))


def from_uint8(gray: np.ndarray) -> GrayFrame:
    """Wrap an (h, w) 8-bit grayscale array as a normalized GrayFrame."""
    a = np.asarray(gray)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty (h, w) array, got shape {a.shape}")
    return GrayFrame(a.astype(np.float64) / 255.0)


def load_frame(path: str | Path) -> GrayFrame:
    """Decode a PNG/JPEG file (8-bit grayscale or RGB) into a GrayFrame."""
    from PIL import Image

    with Image.open(path) as img:
        if img.mode == "L":
            return from_uint8(np.asarray(img))
        return to_gray(np.asarray(img.convert("RGB")))


def build_integral(frame: GrayFrame) -> IntegralImage:
    h, w = frame.pixels.shape
    sums = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(frame.pixels, axis=0, out=sums[1:, 1:])
    np.cumsum(sums[1:, 1:], axis=1, out=sums[1:, 1:])
    return IntegralImage(sums)


def rect_sum(ii: IntegralImage, r: Rect) -> float:
    """Sum of pixel intensities inside `r`, in O(1) via four corner lookups."""
    if r.x < 0 or r.y < 0 or r.x + r.w > ii.width or r.y + r.h > ii.height:
        raise ValueError(
            f"rect ({r.x},{r.y},{r.w},{r.h}) outside {ii.width}x{ii.height} frame"
        )
    s = ii.sums
    return float(
        s[r.y + r.h, r.x + r.w] - s[r.y, r.x + r.w] - s[r.y + r.h, r.x] + s[r.y, r.x]
    )

"""Circle/annulus lattice sampling of training and detection candidate boxes.

Distances are Euclidean over integer top-left-corner offsets from the current
object location, with strict inequalities. Boxes that would cross frame
borders are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .imaging import BoundingBox


@dataclass(frozen=True)
class SampleConfig:
    pos_radius: float = 4.0
    neg_inner: float = 4.0
    neg_outer: float = 50.0
    neg_count: int = 200
    neg_train_count: int = 50
    search_radius: float = 25.0

    def __post_init__(self) -> None:
        if not 0.0 < self.pos_radius <= self.neg_inner < self.neg_outer:
            raise ValueError(
                "radii must satisfy 0 < pos_radius <= neg_inner < neg_outer, got "
                f"{self.pos_radius}, {self.neg_inner}, {self.neg_outer}"
            )
        if not 0 < self.neg_train_count <= self.neg_count:
            raise ValueError(
                f"need 0 < neg_train_count <= neg_count, got {self.neg_train_count}, {self.neg_count}"
            )
        if self.search_radius <= 0.0:
            raise ValueError(f"search radius must be positive, got {self.search_radius}")


@lru_cache(maxsize=32)
def _disc_offsets(radius: float) -> np.ndarray:
    """(k, 2) integer (dx, dy) offsets with dx^2 + dy^2 < radius^2, row-major."""
    limit = int(np.ceil(radius)) - 1
    ys, xs = np.mgrid[-limit : limit + 1, -limit : limit + 1]
    mask = xs * xs + ys * ys < radius * radius
    return np.stack([xs[mask], ys[mask]], axis=1)


@lru_cache(maxsize=32)
def _annulus_offsets(inner: float, outer: float) -> np.ndarray:
    """(k, 2) integer (dx, dy) offsets with inner < dist < outer, row-major."""
    limit = int(np.ceil(outer)) - 1
    ys, xs = np.mgrid[-limit : limit + 1, -limit : limit + 1]
    d2 = xs * xs + ys * ys
    mask = (d2 > inner * inner) & (d2 < outer * outer)
    return np.stack([xs[mask], ys[mask]], axis=1)


@lru_cache(maxsize=32)
def _search_offsets(radius: float) -> np.ndarray:
    """Disc offsets ordered nearest-first (by distance, then dy, then dx).

    Argmax tie-breaking walks this order, so exact score ties resolve to the
    smallest displacement instead of a border of the tied region.
    """
    offs = _disc_offsets(radius)
    d2 = offs[:, 0] ** 2 + offs[:, 1] ** 2
    order = np.lexsort((offs[:, 0], offs[:, 1], d2))
    return offs[order]


def _in_bounds_xy(
    center: BoundingBox, offsets: np.ndarray, frame_w: int, frame_h: int
) -> tuple[np.ndarray, np.ndarray]:
    x = center.x + offsets[:, 0]
    y = center.y + offsets[:, 1]
    ok = (x >= 0) & (y >= 0) & (x + center.w <= frame_w) & (y + center.h <= frame_h)
    return x[ok], y[ok]


def _boxes(center: BoundingBox, xs: np.ndarray, ys: np.ndarray) -> list[BoundingBox]:
    return [BoundingBox(int(x), int(y), center.w, center.h) for x, y in zip(xs, ys)]


def _check_center(center: BoundingBox, frame_w: int, frame_h: int) -> None:
    if (
        center.x < 0
        or center.y < 0
        or center.x + center.w > frame_w
        or center.y + center.h > frame_h
    ):
        raise ValueError(
            f"center box ({center.x},{center.y},{center.w},{center.h}) "
            f"outside {frame_w}x{frame_h} frame"
        )


def positive_locations(
    center: BoundingBox, cfg: SampleConfig, frame_w: int, frame_h: int
) -> list[BoundingBox]:
    """All in-bounds boxes within pos_radius of `center`, row-major order."""
    _check_center(center, frame_w, frame_h)
    xs, ys = _in_bounds_xy(center, _disc_offsets(cfg.pos_radius), frame_w, frame_h)
    if xs.size == 0:
        raise ValueError("no in-bounds positive locations")
    return _boxes(center, xs, ys)


def search_locations_xy(
    center: BoundingBox, cfg: SampleConfig, frame_w: int, frame_h: int
) -> tuple[np.ndarray, np.ndarray]:
    """In-bounds search origins as coordinate arrays, nearest-first."""
    _check_center(center, frame_w, frame_h)
    return _in_bounds_xy(center, _search_offsets(cfg.search_radius), frame_w, frame_h)


def search_locations(
    center: BoundingBox, cfg: SampleConfig, frame_w: int, frame_h: int
) -> list[BoundingBox]:
    """All in-bounds boxes within search_radius of `center`, nearest-first."""
    return _boxes(center, *search_locations_xy(center, cfg, frame_w, frame_h))


def negative_locations(
    center: BoundingBox,
    cfg: SampleConfig,
    rng: np.random.Generator,
    frame_w: int,
    frame_h: int,
) -> list[BoundingBox]:
    """neg_count distinct boxes drawn uniformly from the in-bounds annulus."""
    _check_center(center, frame_w, frame_h)
    xs, ys = _in_bounds_xy(center, _annulus_offsets(cfg.neg_inner, cfg.neg_outer), frame_w, frame_h)
    if xs.size < cfg.neg_count:
        raise ValueError(
            f"annulus holds only {xs.size} in-bounds locations, need {cfg.neg_count}"
        )
    idx = rng.choice(xs.size, size=cfg.neg_count, replace=False)
    return _boxes(center, xs[idx], ys[idx])


def training_negative_subsample(negatives: list, cfg: SampleConfig, rng: np.random.Generator) -> list:
    """Uniform neg_train_count-subset of `negatives`, without replacement."""
    if len(negatives) < cfg.neg_train_count:
        raise ValueError(
            f"need at least {cfg.neg_train_count} negatives, got {len(negatives)}"
        )
    idx = rng.choice(len(negatives), size=cfg.neg_train_count, replace=False)
    return [negatives[int(i)] for i in idx]

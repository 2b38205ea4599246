"""Haar-like feature pool generation and evaluation over candidate patches."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .imaging import BoundingBox, IntegralImage, Rect, rect_sum

MIN_PATCH_SIDE = 4


@dataclass(frozen=True)
class HaarFeature:
    """2 to 4 weighted rectangles in patch-relative coordinates.

    The feature value is the weighted sum of pixel sums over the parts; each
    weight is pre-divided by (part count * part area) so values stay bounded
    regardless of rectangle size.
    """

    feature_id: int
    parts: tuple[tuple[Rect, float], ...]

    def __post_init__(self) -> None:
        if not 2 <= len(self.parts) <= 4:
            raise ValueError(f"feature needs 2-4 parts, got {len(self.parts)}")
        if any(w == 0.0 for _, w in self.parts):
            raise ValueError("part weights must be nonzero")


@dataclass(frozen=True)
class FeaturePool:
    """Fixed pool of M features, generated once per tracker run and shared."""

    features: tuple[HaarFeature, ...]
    patch_w: int
    patch_h: int

    # packed part arrays for vectorized evaluation, built once
    _part_x: np.ndarray = field(repr=False, compare=False, default=None)
    _part_y: np.ndarray = field(repr=False, compare=False, default=None)
    _part_w: np.ndarray = field(repr=False, compare=False, default=None)
    _part_h: np.ndarray = field(repr=False, compare=False, default=None)
    _part_weight: np.ndarray = field(repr=False, compare=False, default=None)
    _part_offsets: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        for i, f in enumerate(self.features):
            if f.feature_id != i:
                raise ValueError(f"feature id {f.feature_id} does not match position {i}")
            for rect, _ in f.parts:
                if rect.x + rect.w > self.patch_w or rect.y + rect.h > self.patch_h:
                    raise ValueError(f"feature {i} part exceeds patch bounds")
        rects = [(r, w) for f in self.features for (r, w) in f.parts]
        object.__setattr__(self, "_part_x", np.array([r.x for r, _ in rects], dtype=np.intp))
        object.__setattr__(self, "_part_y", np.array([r.y for r, _ in rects], dtype=np.intp))
        object.__setattr__(self, "_part_w", np.array([r.w for r, _ in rects], dtype=np.intp))
        object.__setattr__(self, "_part_h", np.array([r.h for r, _ in rects], dtype=np.intp))
        object.__setattr__(self, "_part_weight", np.array([w for _, w in rects]))
        counts = np.array([len(f.parts) for f in self.features], dtype=np.intp)
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        object.__setattr__(self, "_part_offsets", offsets)

    def __len__(self) -> int:
        return len(self.features)


def generate_pool(
    m: int, patch_w: int, patch_h: int, rng: np.random.Generator
) -> FeaturePool:
    """Draw M random Haar features fitting a patch_w x patch_h patch.

    Each feature gets a uniform-random part count in {2, 3, 4}; every part is a
    uniform-random in-patch rectangle with a uniform [-1, 1] weight divided by
    (part count * part area).
    """
    if m < 1:
        raise ValueError(f"pool size must be >= 1, got {m}")
    if patch_w < MIN_PATCH_SIDE or patch_h < MIN_PATCH_SIDE:
        raise ValueError(f"patch must be at least {MIN_PATCH_SIDE}x{MIN_PATCH_SIDE}")
    features = []
    for i in range(m):
        n_parts = int(rng.integers(2, 5))
        parts = []
        for _ in range(n_parts):
            w = int(rng.integers(1, patch_w + 1))
            h = int(rng.integers(1, patch_h + 1))
            x = int(rng.integers(0, patch_w - w + 1))
            y = int(rng.integers(0, patch_h - h + 1))
            u = 0.0
            while u == 0.0:
                u = float(rng.uniform(-1.0, 1.0))
            parts.append((Rect(x, y, w, h), u / (n_parts * w * h)))
        features.append(HaarFeature(i, tuple(parts)))
    return FeaturePool(tuple(features), patch_w, patch_h)


def evaluate(f: HaarFeature, ii: IntegralImage, at: BoundingBox) -> float:
    """Feature value at one patch location: sum of weight * rect_sum per part."""
    if at.x < 0 or at.y < 0 or at.x + at.w > ii.width or at.y + at.h > ii.height:
        raise ValueError(f"patch at ({at.x},{at.y}) outside {ii.width}x{ii.height} frame")
    total = 0.0
    for rect, weight in f.parts:
        shifted = Rect(at.x + rect.x, at.y + rect.y, rect.w, rect.h)
        total = total + weight * rect_sum(ii, shifted)
    return total


def evaluate_many_xy(
    pool: FeaturePool, ii: IntegralImage, xs: np.ndarray, ys: np.ndarray
) -> np.ndarray:
    """Feature matrix of shape (len(xs), M) at patch origins (xs[i], ys[i]).

    Rectangle corners are gathered through flat indices into the integral
    grid: per-part corner offsets are fixed for a given frame width, so each
    corner costs one add plus one take.
    """
    if np.any(xs < 0) or np.any(ys < 0) or np.any(xs + pool.patch_w > ii.width) or np.any(
        ys + pool.patch_h > ii.height
    ):
        raise ValueError(f"patch outside {ii.width}x{ii.height} frame")
    stride = ii.sums.shape[1]
    flat = ii.sums.ravel()
    base = (ys * stride + xs)[:, None]
    tl = pool._part_y * stride + pool._part_x
    tr = tl + pool._part_w
    bl = tl + pool._part_h * stride
    br = bl + pool._part_w
    part_sums = (
        flat.take(base + br)
        - flat.take(base + tr)
        - flat.take(base + bl)
        + flat.take(base + tl)
    )
    part_sums *= pool._part_weight[None, :]
    return np.add.reduceat(part_sums, pool._part_offsets, axis=1)


def evaluate_many(pool: FeaturePool, ii: IntegralImage, boxes: list[BoundingBox]) -> np.ndarray:
    """Feature matrix of shape (len(boxes), M) for all pool features at all boxes."""
    if not boxes:
        return np.zeros((0, len(pool)))
    xs = np.array([b.x for b in boxes], dtype=np.intp)
    ys = np.array([b.y for b in boxes], dtype=np.intp)
    return evaluate_many_xy(pool, ii, xs, ys)


def pool_to_json(pool: FeaturePool) -> dict:
    """JSON-ready description of the pool for reproducibility audits."""
    return {
        "patch_w": pool.patch_w,
        "patch_h": pool.patch_h,
        "features": [
            {
                "id": f.feature_id,
                "parts": [
                    {"x": r.x, "y": r.y, "w": r.w, "h": r.h, "weight": weight}
                    for r, weight in f.parts
                ],
            }
            for f in pool.features
        ],
    }


def pool_from_json(doc: dict) -> FeaturePool:
    features = tuple(
        HaarFeature(
            entry["id"],
            tuple(
                (Rect(p["x"], p["y"], p["w"], p["h"]), p["weight"])
                for p in entry["parts"]
            ),
        )
        for entry in doc["features"]
    )
    return FeaturePool(features, doc["patch_w"], doc["patch_h"])

"""Center-location-error and overlap-rate metrics with table reporting."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .imaging import BoundingBox


@dataclass(frozen=True)
class TrackResult:
    """Tracked boxes aligned with ground-truth boxes for one sequence."""

    name: str
    boxes: tuple[BoundingBox, ...]
    gt_boxes: tuple[BoundingBox, ...]

    def __post_init__(self) -> None:
        if len(self.boxes) != len(self.gt_boxes):
            raise ValueError(
                f"got {len(self.boxes)} boxes but {len(self.gt_boxes)} ground-truth boxes"
            )
        if len(self.boxes) < 1:
            raise ValueError("need at least one frame")


@dataclass(frozen=True)
class MetricReport:
    cle_per_frame: tuple[float, ...]
    vor_per_frame: tuple[float, ...]
    avg_cle: float
    avg_vor: float


def cle(a: BoundingBox, b: BoundingBox) -> float:
    """Euclidean distance between box centers, in pixels."""
    (ax, ay), (bx, by) = a.center, b.center
    return math.hypot(ax - bx, ay - by)


def vor(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of the two boxes; disjoint boxes give 0."""
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union


def report(result: TrackResult) -> MetricReport:
    cles = tuple(cle(b, g) for b, g in zip(result.boxes, result.gt_boxes))
    vors = tuple(vor(b, g) for b, g in zip(result.boxes, result.gt_boxes))
    return MetricReport(cles, vors, sum(cles) / len(cles), sum(vors) / len(vors))


def sequence_csv(result: TrackResult, rep: MetricReport) -> str:
    """Per-frame CSV body: frame, x, y, w, h, cle, vor."""
    lines = ["frame,x,y,w,h,cle,vor"]
    for i, box in enumerate(result.boxes):
        lines.append(
            f"{i},{box.x},{box.y},{box.w},{box.h},"
            f"{rep.cle_per_frame[i]:.6f},{rep.vor_per_frame[i]:.6f}"
        )
    return "\n".join(lines) + "\n"


def aggregate_rows(results: list[tuple[str, MetricReport]]) -> list[tuple[str, float, float]]:
    """Per-sequence (name, avg CLE, avg VOR) rows plus the overall Average row."""
    rows = [(name, rep.avg_cle, rep.avg_vor) for name, rep in results]
    if rows:
        rows.append(
            (
                "Average",
                sum(r[1] for r in rows) / len(rows),
                sum(r[2] for r in rows) / len(rows),
            )
        )
    return rows


def aggregate_table(rows: list[tuple[str, float, float]]) -> str:
    """Aligned text table of average CLE (pixels) and average VOR per sequence."""
    name_w = max([len(r[0]) for r in rows] + [len("Seq")])
    header = f"{'Seq':<{name_w}}  {'Avg CLE (px)':>12}  {'Avg VOR':>8}"
    lines = [header, "-" * len(header)]
    for name, avg_cle, avg_vor in rows:
        lines.append(f"{name:<{name_w}}  {avg_cle:>12.2f}  {avg_vor:>8.3f}")
    return "\n".join(lines) + "\n"


def aggregate_csv(rows: list[tuple[str, float, float]]) -> str:
    lines = ["seq,avg_cle,avg_vor"]
    for name, avg_cle, avg_vor in rows:
        lines.append(f"{name},{avg_cle:.6f},{avg_vor:.6f}")
    return "\n".join(lines) + "\n"

"""Significance-guided online multiple-instance boosting tracker."""

__version__ = "0.1.0"

from .imaging import BoundingBox, GrayFrame, IntegralImage, Rect, build_integral, load_frame, rect_sum, to_gray
from .tracker import TrackerConfig, TrackerState, init, run, step

__all__ = [
    "BoundingBox",
    "GrayFrame",
    "IntegralImage",
    "Rect",
    "TrackerConfig",
    "TrackerState",
    "build_integral",
    "init",
    "load_frame",
    "rect_sum",
    "run",
    "step",
    "to_gray",
    "__version__",
]

"""End-to-end tracking loop: detect with the refined classifier, relocate,
resample training bags, update the shared weak pool, retrain the randomized
ensemble, estimate significance, and reselect the refined classifier."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import rng as rng_streams
from .features import FeaturePool, evaluate_many, evaluate_many_xy, generate_pool
from .imaging import BoundingBox, GrayFrame, IntegralImage, build_integral
from .mil_core import Bag, Instance, StrongClassifier, accumulate_scores
from .sampling import (
    SampleConfig,
    negative_locations,
    positive_locations,
    search_locations_xy,
    training_negative_subsample,
)
from .sig_boost import AlphaConfig, select_refined
from .significance import Ensemble, estimate_bag, train_ensemble
from .weak_learners import WeakPool, log_odds_matrix, new_pool, update_pool


@dataclass(frozen=True)
class TrackerConfig:
    """All hyperparameters of a tracker run."""

    num_weak: int = 150
    num_select: int = 15
    ensemble_size: int = 3
    learning_rate: float = 0.85
    alpha_pos: float = 3.0
    alpha_neg: float = 1.0
    search_radius: float = 25.0
    pos_radius: float = 4.0
    neg_inner: float = 4.0
    neg_outer: float = 50.0
    neg_count: int = 200
    neg_train_count: int = 50
    prior: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_weak < 1:
            raise ValueError(f"num_weak must be >= 1, got {self.num_weak}")
        if not 0 <= self.num_select <= self.num_weak:
            raise ValueError(
                f"num_select must be in [0, num_weak], got {self.num_select}"
            )
        if self.ensemble_size < 1:
            raise ValueError(f"ensemble_size must be >= 1, got {self.ensemble_size}")
        if not 0.0 < self.prior < 1.0:
            raise ValueError(f"prior must lie strictly in (0, 1), got {self.prior}")
        self.sample_config()
        self.alpha_config()

    def sample_config(self) -> SampleConfig:
        return SampleConfig(
            pos_radius=self.pos_radius,
            neg_inner=self.neg_inner,
            neg_outer=self.neg_outer,
            neg_count=self.neg_count,
            neg_train_count=self.neg_train_count,
            search_radius=self.search_radius,
        )

    def alpha_config(self) -> AlphaConfig:
        return AlphaConfig(alpha_pos=self.alpha_pos, alpha_neg=self.alpha_neg)


@dataclass
class TrackerState:
    """Everything a run carries between frames.

    `trace`, when set to a list, records the per-frame training events in
    order; `significance_log` collects (frame, instance index, r) rows.
    """

    cfg: TrackerConfig
    feature_pool: FeaturePool
    weak_pool: WeakPool
    ensemble: Ensemble | None
    refined: StrongClassifier
    location: BoundingBox
    frame_w: int
    frame_h: int
    frame_index: int = 0
    trace: list[str] | None = None
    significance_log: list[tuple[int, int, float]] | None = None


def _make_instances(boxes: list[BoundingBox], feats: np.ndarray) -> list[Instance]:
    return [Instance(b, feats[i]) for i, b in enumerate(boxes)]


def _training_pass(state: TrackerState, ii: IntegralImage, location: BoundingBox) -> None:
    cfg = state.cfg
    samp = cfg.sample_config()
    t = state.frame_index

    pos_boxes = positive_locations(location, samp, state.frame_w, state.frame_h)
    neg_boxes = negative_locations(
        location, samp, rng_streams.stream(cfg.seed, "negatives", t),
        state.frame_w, state.frame_h,
    )
    feats = evaluate_many(state.feature_pool, ii, pos_boxes + neg_boxes)
    pos_feats, neg_feats = feats[: len(pos_boxes)], feats[len(pos_boxes) :]

    positive_bag = Bag(1, _make_instances(pos_boxes, pos_feats))
    negative_bags = [Bag(0, [inst]) for inst in _make_instances(neg_boxes, neg_feats)]

    # one shared subsample updates the pool and grounds the refined selection
    shared = training_negative_subsample(
        negative_bags, samp, rng_streams.stream(cfg.seed, "shared-subsample", t)
    )
    train_feats = np.concatenate(
        [pos_feats, np.stack([bag.instances[0].features for bag in shared])]
    )
    train_labels = np.concatenate(
        [np.ones(len(pos_boxes), dtype=np.intp), np.zeros(len(shared), dtype=np.intp)]
    )
    state.weak_pool = update_pool(state.weak_pool, train_feats, train_labels)
    if state.trace is not None:
        state.trace.append("update_pool")

    state.ensemble = train_ensemble(
        state.weak_pool,
        positive_bag,
        negative_bags,
        cfg.ensemble_size,
        cfg.neg_train_count,
        cfg.num_select,
        rng_streams.stream(cfg.seed, "ensemble-subsamples", t),
    )
    if state.trace is not None:
        state.trace.append("train_ensemble")

    est = estimate_bag(state.ensemble, state.weak_pool, positive_bag, cfg.prior)
    if state.significance_log is not None:
        for j, r in enumerate(est.instance_r):
            state.significance_log.append((t, j, float(r)))
    if state.trace is not None:
        state.trace.append("estimate_bag")

    bags = [positive_bag] + shared
    estimates = [est] + [None] * len(shared)
    state.refined = select_refined(
        state.weak_pool, bags, estimates, cfg.num_select, cfg.alpha_config()
    )
    if state.trace is not None:
        state.trace.append("select_refined")


def init(
    first_frame: GrayFrame,
    gt_box: BoundingBox,
    cfg: TrackerConfig,
    trace: list[str] | None = None,
    significance_log: list[tuple[int, int, float]] | None = None,
) -> TrackerState:
    """Build the feature pool and run the first training pass at `gt_box`."""
    if (
        gt_box.x < 0
        or gt_box.y < 0
        or gt_box.x + gt_box.w > first_frame.width
        or gt_box.y + gt_box.h > first_frame.height
    ):
        raise ValueError("initial box lies outside the frame")
    feature_pool = generate_pool(
        cfg.num_weak, gt_box.w, gt_box.h, rng_streams.stream(cfg.seed, "feature-pool")
    )
    state = TrackerState(
        cfg=cfg,
        feature_pool=feature_pool,
        weak_pool=new_pool(cfg.num_weak, cfg.learning_rate),
        ensemble=None,
        refined=StrongClassifier(),
        location=gt_box,
        frame_w=first_frame.width,
        frame_h=first_frame.height,
        trace=trace,
        significance_log=significance_log,
    )
    _training_pass(state, build_integral(first_frame), gt_box)
    return state


def _detect(state: TrackerState, ii: IntegralImage) -> BoundingBox:
    xs, ys = search_locations_xy(
        state.location, state.cfg.sample_config(), state.frame_w, state.frame_h
    )
    feats = evaluate_many_xy(state.feature_pool, ii, xs, ys)
    lo = log_odds_matrix(state.weak_pool, feats)
    scores = accumulate_scores(lo, state.refined.selected)
    # sigmoid is monotone, so the appearance-model argmax equals the score
    # argmax; candidates come nearest-first, so ties keep displacement small
    i = int(np.argmax(scores))
    return BoundingBox(int(xs[i]), int(ys[i]), state.location.w, state.location.h)


def step(state: TrackerState, frame: GrayFrame) -> tuple[TrackerState, BoundingBox]:
    """Advance one frame: locate the object with the refined classifier, then
    run the training pass at the new location. Returns the mutated state and
    the new box."""
    if frame.width != state.frame_w or frame.height != state.frame_h:
        raise ValueError(
            f"frame is {frame.width}x{frame.height}, tracker initialized at "
            f"{state.frame_w}x{state.frame_h}"
        )
    state.frame_index += 1
    ii = build_integral(frame)
    state.location = _detect(state, ii)
    _training_pass(state, ii, state.location)
    return state, state.location


def run(
    frames: Iterable[GrayFrame],
    gt_first: BoundingBox,
    cfg: TrackerConfig,
    trace: list[str] | None = None,
    significance_log: list[tuple[int, int, float]] | None = None,
) -> list[BoundingBox]:
    """Track through a frame sequence; the first box is the given ground truth."""
    it = iter(frames)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("need at least one frame") from None
    state = init(first, gt_first, cfg, trace=trace, significance_log=significance_log)
    boxes = [gt_first]
    for frame in it:
        _, box = step(state, frame)
        boxes.append(box)
    return boxes

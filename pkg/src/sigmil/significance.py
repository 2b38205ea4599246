"""Randomized boosting ensemble and Bayesian instance-significance estimation.

N standard MIL boosting learners are trained on the same positive bag but
independently subsampled negatives; an instance's significance is the
two-hypothesis Bayesian posterior that it is positive, combining the learners'
predictions under a conditional-independence assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .mil_core import (
    Bag,
    StrongClassifier,
    _sigmoid,
    accumulate_scores,
    greedy_select,
    stack_bag_features,
)
from .weak_learners import WeakPool, log_odds_matrix
from .mil_core import PROB_EPS


@dataclass(frozen=True)
class Ensemble:
    """N strong classifiers sharing one weak pool, used only for significance."""

    learners: tuple[StrongClassifier, ...]

    def __post_init__(self) -> None:
        if len(self.learners) < 1:
            raise ValueError("ensemble needs at least one learner")

    def __len__(self) -> int:
        return len(self.learners)


@dataclass(frozen=True, eq=False)
class SignificanceEstimate:
    """Per-instance significance values plus the bag value (their maximum)."""

    instance_r: np.ndarray
    bag_r: float

    def __post_init__(self) -> None:
        r = np.asarray(self.instance_r, dtype=np.float64)
        object.__setattr__(self, "instance_r", r)
        if r.ndim != 1 or r.size < 1:
            raise ValueError("instance_r must be a non-empty 1-D array")
        if np.any(r < 0.0) or np.any(r > 1.0):
            raise ValueError("instance significance must lie in [0, 1]")
        if self.bag_r != float(np.max(r)):
            raise ValueError("bag_r must equal the maximum instance significance")


def uniform_estimate(n_instances: int) -> SignificanceEstimate:
    """The fixed all-ones estimate used for negative bags."""
    return SignificanceEstimate(np.ones(n_instances), 1.0)


def train_ensemble(
    pool: WeakPool,
    positive_bag: Bag,
    negative_bags: Sequence[Bag],
    n: int,
    per_learner_negative_count: int,
    k: int,
    rng: np.random.Generator,
) -> Ensemble:
    """Train N learners, each on the positive bag plus its own independently
    drawn subsample of the negative bags, selected by the standard likelihood."""
    if n < 1:
        raise ValueError(f"ensemble size must be >= 1, got {n}")
    if per_learner_negative_count > len(negative_bags):
        raise ValueError(
            f"cannot subsample {per_learner_negative_count} of {len(negative_bags)} negatives"
        )
    learners = []
    for _ in range(n):
        idx = rng.choice(len(negative_bags), size=per_learner_negative_count, replace=False)
        bags = [positive_bag] + [negative_bags[int(j)] for j in idx]
        learners.append(greedy_select(pool, bags, k))
    return Ensemble(tuple(learners))


def instance_significance(preds: Sequence[float], prior: float) -> float:
    """Posterior probability of the positive label given N learner predictions.

    With prior pi, returns pi^(1-N) prod(p_k) normalized against the
    complementary hypothesis (1-pi)^(1-N) prod(1-p_k). The products are taken
    directly (so exactly complementary prediction pairs cancel to 0.5 bit for
    bit); a log-domain fallback covers ensembles large enough to underflow.
    """
    p = np.asarray(preds, dtype=np.float64)
    if p.size == 0:
        raise ValueError("need at least one prediction")
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("predictions must lie strictly in (0, 1)")
    if not 0.0 < prior < 1.0:
        raise ValueError(f"prior must lie strictly in (0, 1), got {prior}")
    n = p.size
    pos = prior ** (1 - n) * float(np.prod(p))
    neg = (1.0 - prior) ** (1 - n) * float(np.prod(1.0 - p))
    total = pos + neg
    if np.isfinite(total) and total > 0.0:
        return pos / total
    log_pos = (1 - n) * np.log(prior) + float(np.sum(np.log(p)))
    log_neg = (1 - n) * np.log1p(-prior) + float(np.sum(np.log1p(-p)))
    return float(_sigmoid(np.asarray(log_pos - log_neg)))


def ensemble_predictions(ensemble: Ensemble, pool: WeakPool, bag: Bag) -> np.ndarray:
    """(N, n_instances) clamped instance probabilities from every learner."""
    lo = log_odds_matrix(pool, stack_bag_features([bag]))
    rows = []
    for learner in ensemble.learners:
        s = accumulate_scores(lo, learner.selected)
        rows.append(np.clip(_sigmoid(s), PROB_EPS, 1.0 - PROB_EPS))
    return np.stack(rows)


def estimate_bag(
    ensemble: Ensemble, pool: WeakPool, bag: Bag, prior: float
) -> SignificanceEstimate:
    """Significance of every instance in `bag`, and the bag value (their max).

    Negative bags are fixed at significance 1 everywhere; only positive bags
    are estimated.
    """
    if bag.label == 0:
        return uniform_estimate(len(bag.instances))
    preds = ensemble_predictions(ensemble, pool, bag)
    r = np.array(
        [instance_significance(preds[:, j], prior) for j in range(preds.shape[1])]
    )
    return SignificanceEstimate(r, float(np.max(r)))

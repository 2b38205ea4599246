"""Significance-weighted bag likelihood and selection of the refined classifier.

The Noisy-OR model is extended with per-instance exponents alpha * r_j / r_bag
acting as continuous repetition counts, and the bag log-likelihood is weighted
by each bag's significance. Negative bags keep exponent 1 and weight 1, so the
extended model coincides with the standard one on them by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .mil_core import (
    Bag,
    StrongClassifier,
    _reduce_bags,
    accumulate_scores,
    bag_layout,
    greedy_select,
    stack_bag_features,
)
from .significance import SignificanceEstimate
from .weak_learners import WeakPool, log_odds_matrix


@dataclass(frozen=True)
class AlphaConfig:
    """Repetition-exponent scales: alpha_pos for positive bags, 1 for negative."""

    alpha_pos: float = 3.0
    alpha_neg: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha_pos < 1.0:
            raise ValueError(f"alpha_pos must be >= 1, got {self.alpha_pos}")
        if self.alpha_neg != 1.0:
            raise ValueError(f"alpha_neg is fixed at 1, got {self.alpha_neg}")


def extended_noisy_or(
    instance_probs: Sequence[float],
    r: Sequence[float],
    r_bag: float,
    alpha: float,
) -> float:
    """Bag probability 1 - prod (1 - p_j)^(alpha * r_j / r_bag)."""
    p = np.asarray(instance_probs, dtype=np.float64)
    rr = np.asarray(r, dtype=np.float64)
    if p.size == 0:
        raise ValueError("need at least one instance probability")
    if p.shape != rr.shape:
        raise ValueError(f"probs and r must match, got {p.shape} vs {rr.shape}")
    if r_bag <= 0.0:
        raise ValueError(f"r_bag must be positive, got {r_bag}")
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("instance probabilities must lie strictly in (0, 1)")
    w = alpha * rr / r_bag
    return float(-np.expm1(np.sum(w * np.log1p(-p))))


def _bag_weights(bags: Sequence[Bag], cfg: AlphaConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-instance exponent weights and per-bag likelihood weights."""
    inst_w = []
    bag_w = np.empty(len(bags))
    for i, bag in enumerate(bags):
        if bag.label == 1:
            est = bag.significance
            if est is None:
                raise ValueError("positive bag is missing its significance estimate")
            if len(est.instance_r) != len(bag.instances):
                raise ValueError("significance estimate does not match bag size")
            if est.bag_r > 0.0:
                inst_w.append(cfg.alpha_pos * est.instance_r / est.bag_r)
                bag_w[i] = est.bag_r
            else:
                # zero-significance bag contributes nothing
                inst_w.append(np.zeros(len(bag.instances)))
                bag_w[i] = 0.0
        else:
            inst_w.append(np.full(len(bag.instances), cfg.alpha_neg))
            bag_w[i] = 1.0
    return np.concatenate(inst_w), bag_w


def extended_likelihood_from_scores(bags: Sequence[Bag], scores: np.ndarray, cfg: AlphaConfig):
    """Significance-weighted bag log-likelihood from stacked instance scores.

    Same score layout conventions as `mil_core.likelihood_from_scores`.
    """
    starts, labels = bag_layout(bags)
    inst_w, bag_w = _bag_weights(bags, cfg)
    return _reduce_bags(labels, starts, np.asarray(scores, dtype=np.float64), inst_w, bag_w)


def extended_log_likelihood(
    bags: Sequence[Bag], sc: StrongClassifier, pool: WeakPool, cfg: AlphaConfig
) -> float:
    """sum_i r_i (y_i log p_i + (1-y_i) log(1-p_i)) with extended Noisy-OR p_i."""
    if not bags:
        raise ValueError("need at least one bag")
    lo = log_odds_matrix(pool, stack_bag_features(bags))
    return extended_likelihood_from_scores(bags, accumulate_scores(lo, sc.selected), cfg)


def select_refined(
    pool: WeakPool,
    bags: Sequence[Bag],
    estimates: Sequence[SignificanceEstimate | None] | None,
    k: int,
    cfg: AlphaConfig,
) -> StrongClassifier:
    """Greedy selection driven by the significance-weighted likelihood.

    `estimates`, when given, is aligned with `bags` and attached to them
    (negative bags may use None); positive bags must end up carrying an
    estimate either way.
    """
    if estimates is not None:
        if len(estimates) != len(bags):
            raise ValueError(f"need {len(bags)} estimates, got {len(estimates)}")
        bags = [
            replace(bag, significance=est) if est is not None else bag
            for bag, est in zip(bags, estimates)
        ]
    for bag in bags:
        if bag.label == 1 and bag.significance is None:
            raise ValueError("positive bag is missing its significance estimate")

    def likelihood(bags_: Sequence[Bag], scores: np.ndarray):
        return extended_likelihood_from_scores(bags_, scores, cfg)

    return greedy_select(pool, bags, k, likelihood)

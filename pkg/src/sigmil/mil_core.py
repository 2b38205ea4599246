"""Online multiple-instance boosting core.

Instance probabilities, Noisy-OR bag probability, bag log-likelihood, and
greedy selection of weak classifiers that maximizes a pluggable bag
likelihood. Likelihood evaluation is shared by the standard and the
significance-weighted variants: both reduce stacked per-instance scores with
identical numpy operations, so the variants coincide exactly wherever their
math does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .imaging import BoundingBox
from .weak_learners import WeakPool, log_odds, log_odds_matrix

if TYPE_CHECKING:
    from .significance import SignificanceEstimate

PROB_EPS = 1e-6


@dataclass(frozen=True, eq=False)
class Instance:
    """One candidate patch: its location plus cached pool feature values."""

    location: BoundingBox
    features: np.ndarray


@dataclass
class Bag:
    """A labeled set of instances; positive bags may carry significance."""

    label: int
    instances: list[Instance]
    significance: "SignificanceEstimate | None" = field(default=None)

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"bag label must be 0 or 1, got {self.label}")
        if not self.instances:
            raise ValueError("bag must hold at least one instance")


@dataclass(frozen=True)
class StrongClassifier:
    """Ordered indices of the selected weak classifiers in the shared pool."""

    selected: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.selected)) != len(self.selected):
            raise ValueError("selected indices must be distinct")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # overflow-safe for any score: exp only sees non-positive arguments
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def score(sc: StrongClassifier, pool: WeakPool, inst: Instance) -> float:
    """Sum of selected classifiers' log-odds on the instance's cached features."""
    total = 0.0
    for k in sc.selected:
        c = pool.classifiers[k]
        total = total + log_odds(c, float(inst.features[c.feature_id]))
    return total


def instance_prob(h_score: float) -> float:
    """Sigmoid of a strong-classifier score, clamped into [1e-6, 1 - 1e-6]."""
    p = float(_sigmoid(np.asarray(h_score, dtype=np.float64)))
    return min(max(p, PROB_EPS), 1.0 - PROB_EPS)


def predict(sc: StrongClassifier, pool: WeakPool, inst: Instance) -> float:
    return instance_prob(score(sc, pool, inst))


def noisy_or(instance_probs: Sequence[float]) -> float:
    """Bag probability 1 - prod(1 - p_j), via a log1p sum for stability."""
    p = np.asarray(instance_probs, dtype=np.float64)
    if p.size == 0:
        raise ValueError("noisy_or needs at least one instance probability")
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("instance probabilities must lie strictly in (0, 1)")
    return float(-np.expm1(np.sum(np.log1p(-p))))


def bag_layout(bags: Sequence[Bag]) -> tuple[np.ndarray, np.ndarray]:
    """Per-bag segment starts and labels for stacked-instance arrays."""
    counts = np.array([len(bag.instances) for bag in bags], dtype=np.intp)
    starts = np.zeros(len(bags), dtype=np.intp)
    np.cumsum(counts[:-1], out=starts[1:])
    labels = np.array([bag.label for bag in bags], dtype=np.intp)
    return starts, labels


def stack_bag_features(bags: Sequence[Bag]) -> np.ndarray:
    """All bags' instance features stacked into one (n, M) matrix."""
    return np.stack([inst.features for bag in bags for inst in bag.instances])


def _reduce_bags(
    labels: np.ndarray,
    starts: np.ndarray,
    scores: np.ndarray,
    instance_weights: np.ndarray | None,
    bag_weights: np.ndarray | None,
):
    """Bag log-likelihood terms from stacked instance scores.

    `scores` is (n,) for one strong classifier or (n, C) for C candidates.
    Both reductions use np.add.reduceat, whose per-column behaviour does not
    depend on C; the two shapes therefore agree bitwise.
    """
    squeeze = scores.ndim == 1
    s = scores[:, None] if squeeze else scores
    p = np.clip(_sigmoid(s), PROB_EPS, 1.0 - PROB_EPS)
    q = np.log1p(-p)
    if instance_weights is not None:
        q = q * instance_weights[:, None]
    qb = np.add.reduceat(q, starts, axis=0)
    pb = np.clip(-np.expm1(qb), PROB_EPS, 1.0 - PROB_EPS)
    pos = labels == 1
    terms = np.empty_like(pb)
    terms[pos] = np.log(pb[pos])
    terms[~pos] = np.log1p(-pb[~pos])
    if bag_weights is not None:
        terms = terms * bag_weights[:, None]
    total = np.add.reduceat(terms, np.array([0], dtype=np.intp), axis=0)[0]
    return float(total[0]) if squeeze else total


def likelihood_from_scores(bags: Sequence[Bag], scores: np.ndarray):
    """Standard bag log-likelihood sum_i [y_i log p_i + (1-y_i) log(1-p_i)].

    `scores` holds instance scores in bag concatenation order, shaped (n,) for
    a single classifier (returns float) or (n, C) for C candidate classifiers
    (returns a (C,) array). Bag probabilities come from the Noisy-OR model
    over clamped sigmoid instance probabilities.
    """
    starts, labels = bag_layout(bags)
    return _reduce_bags(labels, starts, np.asarray(scores, dtype=np.float64), None, None)


def accumulate_scores(lo: np.ndarray, selected: Sequence[int]) -> np.ndarray:
    """Instance scores for an ordered selection, added column by column."""
    s = np.zeros(lo.shape[0])
    for j in selected:
        s = s + lo[:, j]
    return s


def bag_log_likelihood(bags: Sequence[Bag], sc: StrongClassifier, pool: WeakPool) -> float:
    """Standard bag log-likelihood of `sc` over `bags` (always <= 0)."""
    if not bags:
        raise ValueError("need at least one bag")
    lo = log_odds_matrix(pool, stack_bag_features(bags))
    return likelihood_from_scores(bags, accumulate_scores(lo, sc.selected))


LikelihoodFn = Callable[[Sequence[Bag], np.ndarray], "float | np.ndarray"]


def greedy_select(
    pool: WeakPool,
    bags: Sequence[Bag],
    k: int,
    likelihood: LikelihoodFn | None = None,
) -> StrongClassifier:
    """Pick K weak classifiers, each round adding the candidate that maximizes
    the bag likelihood of the partial strong classifier.

    Selection is without replacement; ties break to the lowest candidate
    index. `likelihood` follows the `likelihood_from_scores` signature and
    defaults to the standard bag log-likelihood.
    """
    m = len(pool)
    if k > m:
        raise ValueError(f"cannot select {k} of {m} classifiers")
    if k < 0:
        raise ValueError("k must be >= 0")
    if not bags:
        raise ValueError("need at least one bag")
    if likelihood is None:
        likelihood = likelihood_from_scores
    if k == 0:
        return StrongClassifier()
    lo = log_odds_matrix(pool, stack_bag_features(bags))
    current = np.zeros(lo.shape[0])
    available = np.ones(m, dtype=bool)
    selected: list[int] = []
    for _ in range(k):
        vals = np.array(likelihood(bags, current[:, None] + lo), dtype=np.float64)
        vals[~available] = -np.inf
        j = int(np.argmax(vals))
        selected.append(j)
        available[j] = False
        current = current + lo[:, j]
    return StrongClassifier(tuple(selected))

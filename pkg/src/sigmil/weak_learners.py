"""Gaussian-ratio weak classifiers over Haar feature values, updated online."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

LOG_ODDS_CLAMP = 5.0
SIGMA_FLOOR = 1e-3


@dataclass(frozen=True)
class WeakClassifier:
    """Per-feature classifier with one Gaussian per class.

    Emits the log density ratio of the two Gaussians (uniform class prior).
    Until a class has received its first batch, its parameters keep the
    uninformative defaults (mu=0, sigma=1); the first batch replaces them
    outright instead of blending.
    """

    feature_id: int
    mu1: float = 0.0
    sigma1: float = 1.0
    mu0: float = 0.0
    sigma0: float = 1.0
    seen1: bool = False
    seen0: bool = False

    @property
    def initialized(self) -> bool:
        return self.seen1 and self.seen0


@dataclass(frozen=True)
class WeakPool:
    """One classifier per pool feature; all share one learning rate."""

    classifiers: tuple[WeakClassifier, ...]
    learning_rate: float = 0.85

    def __post_init__(self) -> None:
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ValueError(f"learning rate must be in [0, 1], got {self.learning_rate}")

    def __len__(self) -> int:
        return len(self.classifiers)


def new_pool(m: int, learning_rate: float = 0.85) -> WeakPool:
    return WeakPool(tuple(WeakClassifier(k) for k in range(m)), learning_rate)


def _log_density_ratio(fval, mu1, sigma1, mu0, sigma0):
    # log N(f; mu1, sigma1) - log N(f; mu0, sigma0), elementwise
    z1 = (fval - mu1) / sigma1
    z0 = (fval - mu0) / sigma0
    raw = np.log(sigma0) - np.log(sigma1) + 0.5 * (z0 * z0 - z1 * z1)
    return np.clip(raw, -LOG_ODDS_CLAMP, LOG_ODDS_CLAMP)


def log_odds(c: WeakClassifier, fval: float) -> float:
    """Clamped log-odds of the positive class at feature value `fval`.

    An uninitialized classifier is uninformative and returns 0.
    """
    if not c.initialized:
        return 0.0
    return float(_log_density_ratio(fval, c.mu1, c.sigma1, c.mu0, c.sigma0))


def log_odds_matrix(pool: WeakPool, feature_matrix: np.ndarray) -> np.ndarray:
    """(n, M) log-odds for every instance row and every pool classifier."""
    f = np.asarray(feature_matrix, dtype=np.float64)
    if f.ndim != 2 or f.shape[1] != len(pool):
        raise ValueError(f"feature matrix must be (n, {len(pool)}), got {f.shape}")
    cs = pool.classifiers
    mu1 = np.array([c.mu1 for c in cs])
    sigma1 = np.array([c.sigma1 for c in cs])
    mu0 = np.array([c.mu0 for c in cs])
    sigma0 = np.array([c.sigma0 for c in cs])
    ready = np.array([c.initialized for c in cs])
    out = _log_density_ratio(f, mu1[None, :], sigma1[None, :], mu0[None, :], sigma0[None, :])
    out[:, ~ready] = 0.0
    return out


def _blend(old: float, batch: float, lr: float, first: bool) -> float:
    if first:
        return batch
    return lr * old + (1.0 - lr) * batch


def update(
    c: WeakClassifier,
    positives: np.ndarray,
    negatives: np.ndarray,
    learning_rate: float,
) -> WeakClassifier:
    """Blend each class's Gaussian toward its batch mean/std.

    mu <- lr*mu + (1-lr)*mean(batch); sigma <- lr*sigma + (1-lr)*std(batch),
    except the first-ever batch for a class replaces the parameters outright.
    An empty batch leaves that class untouched. sigma is floored at 1e-3.
    """
    positives = np.asarray(positives, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64)
    if positives.size == 0 and negatives.size == 0:
        raise ValueError("update needs at least one sample in one class")
    out = c
    if positives.size:
        mu = _blend(c.mu1, float(np.mean(positives)), learning_rate, not c.seen1)
        sigma = _blend(c.sigma1, float(np.std(positives)), learning_rate, not c.seen1)
        out = replace(out, mu1=mu, sigma1=max(sigma, SIGMA_FLOOR), seen1=True)
    if negatives.size:
        mu = _blend(c.mu0, float(np.mean(negatives)), learning_rate, not c.seen0)
        sigma = _blend(c.sigma0, float(np.std(negatives)), learning_rate, not c.seen0)
        out = replace(out, mu0=mu, sigma0=max(sigma, SIGMA_FLOOR), seen0=True)
    return out


def update_pool(pool: WeakPool, feature_matrix: np.ndarray, labels: np.ndarray) -> WeakPool:
    """Update every classifier once from its own feature column.

    Rows of `feature_matrix` are instances, columns line up with the pool;
    `labels` holds the per-instance class in {0, 1}.
    """
    f = np.asarray(feature_matrix, dtype=np.float64)
    y = np.asarray(labels)
    if f.ndim != 2 or f.shape[1] != len(pool):
        raise ValueError(f"feature matrix must be (n, {len(pool)}), got {f.shape}")
    if y.shape != (f.shape[0],):
        raise ValueError(f"labels must be ({f.shape[0]},), got {y.shape}")
    if f.shape[0] == 0:
        return pool
    if np.any((y != 0) & (y != 1)):
        raise ValueError("labels must be 0 or 1")
    lr = pool.learning_rate
    cs = pool.classifiers
    params = {
        "mu1": np.array([c.mu1 for c in cs]),
        "sigma1": np.array([c.sigma1 for c in cs]),
        "mu0": np.array([c.mu0 for c in cs]),
        "sigma0": np.array([c.sigma0 for c in cs]),
        "seen1": np.array([c.seen1 for c in cs]),
        "seen0": np.array([c.seen0 for c in cs]),
    }
    for cls, suffix in ((1, "1"), (0, "0")):
        batch = f[y == cls]
        if batch.shape[0] == 0:
            continue
        mu, sigma, seen = params["mu" + suffix], params["sigma" + suffix], params["seen" + suffix]
        bm = np.mean(batch, axis=0)
        bs = np.std(batch, axis=0)
        params["mu" + suffix] = np.where(seen, lr * mu + (1.0 - lr) * bm, bm)
        params["sigma" + suffix] = np.maximum(
            np.where(seen, lr * sigma + (1.0 - lr) * bs, bs), SIGMA_FLOOR
        )
        params["seen" + suffix] = np.ones_like(seen)
    updated = tuple(
        WeakClassifier(
            c.feature_id,
            float(params["mu1"][k]),
            float(params["sigma1"][k]),
            float(params["mu0"][k]),
            float(params["sigma0"][k]),
            bool(params["seen1"][k]),
            bool(params["seen0"][k]),
        )
        for k, c in enumerate(cs)
    )
    return WeakPool(updated, pool.learning_rate)

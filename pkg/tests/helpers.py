"""Shared brute-force oracles and random-problem builders for the test suite.

The oracles deliberately recompute everything through the public scalar
operations so they stay independent of the vectorized selection engine.
"""

from __future__ import annotations

import numpy as np

from sigmil.imaging import BoundingBox
from sigmil.mil_core import Bag, Instance, StrongClassifier, bag_log_likelihood
from sigmil.sig_boost import AlphaConfig, extended_log_likelihood
from sigmil.weak_learners import WeakClassifier, WeakPool


def random_ready_pool(rng: np.random.Generator, m: int, learning_rate: float = 0.85) -> WeakPool:
    return WeakPool(
        tuple(
            WeakClassifier(
                k,
                mu1=float(rng.normal()),
                sigma1=float(abs(rng.normal()) + 0.05),
                mu0=float(rng.normal()),
                sigma0=float(abs(rng.normal()) + 0.05),
                seen1=True,
                seen0=True,
            )
            for k in range(m)
        ),
        learning_rate,
    )


def random_bags(
    rng: np.random.Generator,
    m: int,
    n_pos_bags: int = 1,
    n_neg_bags: int = 4,
    max_instances: int = 5,
) -> list[Bag]:
    def make_bag(label: int) -> Bag:
        n = int(rng.integers(1, max_instances + 1))
        instances = [
            Instance(BoundingBox(0, 0, 4, 4), rng.normal(size=m)) for _ in range(n)
        ]
        return Bag(label, instances)

    return [make_bag(1) for _ in range(n_pos_bags)] + [make_bag(0) for _ in range(n_neg_bags)]


def brute_force_greedy(pool: WeakPool, bags, k: int) -> tuple[int, ...]:
    """Per-round exhaustive argmax of the standard bag log-likelihood."""
    selected: list[int] = []
    for _ in range(k):
        best_j, best_val = None, None
        for j in range(len(pool)):
            if j in selected:
                continue
            val = bag_log_likelihood(bags, StrongClassifier(tuple(selected + [j])), pool)
            if best_val is None or val > best_val:
                best_j, best_val = j, val
        selected.append(best_j)
    return tuple(selected)


def brute_force_refined(pool: WeakPool, bags, k: int, cfg: AlphaConfig) -> tuple[int, ...]:
    """Per-round exhaustive argmax of the significance-weighted log-likelihood."""
    selected: list[int] = []
    for _ in range(k):
        best_j, best_val = None, None
        for j in range(len(pool)):
            if j in selected:
                continue
            val = extended_log_likelihood(bags, StrongClassifier(tuple(selected + [j])), pool, cfg)
            if best_val is None or val > best_val:
                best_j, best_val = j, val
        selected.append(best_j)
    return tuple(selected)


def bayes_significance(preds, prior: float) -> float:
    """Direct two-hypothesis Bayes rule, no log-domain tricks."""
    preds = list(preds)
    n = len(preds)
    num = prior ** (1 - n) * float(np.prod(preds))
    den = (1 - prior) ** (1 - n) * float(np.prod([1 - p for p in preds]))
    return num / (num + den)


def checker_frame(
    x: int,
    y: int,
    frame_w: int = 160,
    frame_h: int = 120,
    target_w: int = 32,
    target_h: int = 32,
    cell: int = 8,
    contrast: float = 0.2,
):
    """Noise-free checkerboard target on a mid-gray background (a GrayFrame)."""
    from sigmil.imaging import GrayFrame

    ys, xs = np.mgrid[0:target_h, 0:target_w]
    checker = ((xs // cell + ys // cell) % 2).astype(np.float64)
    img = np.full((frame_h, frame_w), 0.5)
    img[y : y + target_h, x : x + target_w] = 0.5 - contrast + checker * 2 * contrast
    return GrayFrame(img)


def synth_static_frame(seed: int):
    """One noise-free generator frame plus its target box."""
    from sigmil.cli_harness import synth_sequence
    from sigmil.imaging import from_uint8

    frames, boxes = synth_sequence(1, seed=seed, noise_sigma=0.0, walk_step=0)
    return from_uint8(frames[0]), boxes[0]


def translate_target(frame, box, dx: int, dy: int):
    """The same scene with the target patch moved by (dx, dy)."""
    from sigmil.imaging import BoundingBox, GrayFrame

    shifted = np.full_like(frame.pixels, 0.5)
    patch = frame.pixels[box.y : box.y + box.h, box.x : box.x + box.w]
    shifted[box.y + dy : box.y + dy + box.h, box.x + dx : box.x + dx + box.w] = patch
    return GrayFrame(shifted), BoundingBox(box.x + dx, box.y + dy, box.w, box.h)

"""Deterministic RNG streams derived from one global seed by labeled splits.

Every stochastic component (feature pool, negative sampling, per-learner
subsamples, synthetic sequences) pulls its own generator via `stream`, so
results are reproducible regardless of call order between components.
"""

from __future__ import annotations

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a(data: bytes) -> int:
    # Python's hash() is salted per process; FNV-1a is stable across runs.
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def _label_word(label: int | str) -> int:
    if isinstance(label, int):
        return label & _MASK64
    return _fnv1a(label.encode("utf-8"))


def stream(seed: int, *labels: int | str) -> np.random.Generator:
    """Generator for the sub-stream identified by `labels` under `seed`."""
    entropy = [seed & _MASK64] + [_label_word(lbl) for lbl in labels]
    return np.random.default_rng(np.random.SeedSequence(entropy))

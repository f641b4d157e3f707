"""Seeded random streams.

All randomness goes through :func:`make_rng`, which wraps numpy's Philox
counter-based bit generator keyed by a ``SeedSequence``.  Philox output is
defined by the key and the counter only, so a given seed reproduces the same
stream on every platform.  Independent sub-streams come from
``SeedSequence.spawn``.
"""
from __future__ import annotations

import numpy as np


def seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed_sequence(seed)))


def spawn(seed, n: int) -> list[np.random.Generator]:
    return [make_rng(s) for s in seed_sequence(seed).spawn(n)]

"""Deterministic randomness plumbing.

Every random draw in this package flows from an explicit integer seed
through numpy's PCG64 generator.  Sub-streams (per trial, per repetition,
per scheme) are derived with ``SeedSequence`` spawn keys, so results are
identical regardless of execution order or degree of parallelism.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed, *key):
    """Return a PCG64 generator for ``seed``, optionally sub-keyed.

    ``key`` is a tuple of non-negative integers identifying a sub-stream,
    e.g. ``make_rng(seed, trial)`` or ``make_rng(seed, rep, frac, scheme)``.
    Streams with distinct keys are statistically independent.
    """
    if key:
        ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    else:
        ss = np.random.SeedSequence(entropy=seed)
    return np.random.default_rng(ss)


def as_generator(seed_or_rng):
    """Accept either an integer seed or an existing Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return make_rng(int(seed_or_rng))


def derive_seed(seed, *key):
    """A plain integer sub-seed for code that reseeds on every call."""
    return int(make_rng(seed, *key).integers(1 << 63))

"""Seeded, splittable random streams.

Every sampler takes a 64-bit integer seed.  Trials of a Monte Carlo campaign
derive their own seed from ``(master_seed, trial_index)`` so that trials are
independent and can run in any order or in any process.
"""
from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def make_rng(seed) -> np.random.Generator:
    """Counter-based Philox generator for a seed.

    ``seed`` may be an int, a tuple of ints (hashed into one stream) or an
    existing Generator, which is returned unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        entropy = [int(s) & _MASK64 for s in seed]
    else:
        entropy = int(seed) & _MASK64
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def trial_seed(master_seed: int, trial_index: int) -> int:
    """64-bit seed of one trial, a hash of the master seed and the index."""
    payload = f"{int(master_seed) & _MASK64}:{int(trial_index)}".encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")

"""
Deterministic seed derivation
"""

import zlib

import numpy as np


def stage_key(name: str) -> int:
    """Stable integer key for a stage or entity name"""
    return zlib.crc32(name.encode("utf-8"))


def derive_seed(master: int, *keys: int | str) -> int:
    """Derive a 64-bit seed from the master seed and a path of keys"""
    entropy = [int(master)] + [k if isinstance(k, int) else stage_key(k) for k in keys]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def rng_for(master: int, *keys: int | str) -> np.random.Generator:
    """Generator seeded from the master seed and a path of keys"""
    return np.random.default_rng(derive_seed(master, *keys))

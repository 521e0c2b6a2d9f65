"""Seed handling. Every random draw in the package goes through :func:`rng`."""

import hashlib
import math

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def rng(seed):
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(seed, stage):
    """Mix a stage name into a top-level seed.

    The child seed is the first 8 bytes (little endian) of
    ``blake2b(f"{seed}:{stage}")``, so it is stable across platforms and
    Python versions (unlike ``hash()``).
    """
    digest = hashlib.blake2b(f"{check_seed(seed)}:{stage}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def round_half_up(x):
    """Round to the nearest integer, halves away from zero for x >= 0."""
    return int(math.floor(x + 0.5))

"""Deterministic, platform-portable random streams.

All randomness in the package flows through counter-based Philox generators
keyed by the caller's integer seed. Uniform and Gaussian variates are
produced by explicit transforms of the raw integer stream (53-bit uniforms,
inverse normal CDF), not by distribution samplers whose internals may change
between library versions, so every draw is reproducible bit-for-bit from the
seed alone.

Stream splitting: a consumer that needs several independent streams from one
user seed derives per-lane keys with :func:`derive_key`, a splitmix-style
mix of (seed, lane). Lanes are documented at each call site (e.g. the video
codec uses lane = frame index).
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed) & _MASK64


def derive_key(seed: int, lane: int) -> int:
    """64-bit stream key for (seed, lane); splitmix64 finalizer."""
    z = (check_seed(seed) + (lane + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def generator(key: int) -> np.random.Generator:
    """Philox generator for a 64-bit key."""
    return np.random.Generator(np.random.Philox(key=check_seed(key)))


def uniform_open01(gen: np.random.Generator, shape) -> np.ndarray:
    """Uniforms on the open interval (0, 1): (k + 1/2) / 2**53, k 53-bit."""
    k = gen.integers(0, 1 << 53, size=shape, dtype=np.uint64)
    return (k.astype(np.float64) + 0.5) / float(1 << 53)


def standard_normal(gen: np.random.Generator, shape) -> np.ndarray:
    """Gaussian variates via the inverse CDF of open-interval uniforms."""
    return ndtri(uniform_open01(gen, shape))

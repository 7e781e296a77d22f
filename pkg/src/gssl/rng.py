"""Portable random number streams.

All randomness in the package flows through Philox, a counter-based 64-bit
PRNG whose output is identical across platforms and numpy builds. Each
purpose gets its own stream so that, e.g., changing how labels are sampled
never perturbs the generated point cloud for the same seed.

Streams:
    GENERATE  - synthetic dataset generation
    SUBSAMPLE - balanced subsampling of real datasets
    LABELS    - labeled-set sampling for trials
    INIT      - random method initializations
"""

from __future__ import annotations

import numpy as np

GENERATE = 1
SUBSAMPLE = 2
LABELS = 3
INIT = 4


def stream(seed: int, purpose: int) -> np.random.Generator:
    """Generator for the given (seed, purpose) pair, independent across purposes."""
    return np.random.Generator(np.random.Philox(key=[int(seed) % 2**64, int(purpose)]))


def normal_pairs(rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw `count` standard normals via Box-Muller on the portable uniforms.

    Avoids the platform-tuned ziggurat sampler so that golden values stay
    reproducible. Returns a 1-D float64 array.
    """
    half = (count + 1) // 2
    u1 = 1.0 - rng.random(half)  # in (0, 1], log is finite
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.empty(2 * half)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:count]

"""Deterministic random streams.

Every stochastic component draws from a counter-based Philox generator keyed
by (seed, stream name), so independent streams never interact and results are
reproducible across platforms and process boundaries.
"""

import hashlib

import numpy as np


def rng_stream(seed: int, name: str) -> np.random.Generator:
    """Return an independent generator for the given seed and stream name."""
    digest = hashlib.sha256(f"{int(seed)}:{name}".encode()).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

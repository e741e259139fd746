"""
Reproducible random streams for Monte Carlo sampling
"""

import hashlib
from typing import Tuple

import numpy as np

CHUNK_SIZE = 65536


def stable_stream_id(name: str) -> int:
    """Fixed 64-bit hash of a name, independent of PYTHONHASHSEED"""
    digest = hashlib.sha256(name.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'little')


def stream_generator(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for the sub-stream identified by (seed, key...)"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def chunk_plan(n_samples: int, chunk_size: int = CHUNK_SIZE) -> Tuple[int, ...]:
    """Sizes of the fixed chunks covering n_samples; independent of worker count"""
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    full, rest = divmod(n_samples, chunk_size)
    return (chunk_size,) * full + ((rest,) if rest else ())

"""
Seed handling.

One master seed drives a run. Each consumer (pool, generation, sampling,
simulator, agents, bias) gets its own stream derived by hashing the
master seed with the stream name; per-item streams XOR the item index
into the stream seed.
"""

import hashlib
import os
from typing import Optional

import numpy as np

from .exceptions import InvariantError

SEED_ENV_VAR = "ORGYM_SEED"
_SEED_MASK = (1 << 63) - 1


def resolve_seed(cli_seed: Optional[int] = None) -> int:
    """--seed if given, else $ORGYM_SEED, else 0."""
    if cli_seed is not None:
        seed = cli_seed
    else:
        raw = os.environ.get(SEED_ENV_VAR)
        if raw is None or not raw.strip():
            return 0
        try:
            seed = int(raw.strip())
        except ValueError:
            raise InvariantError("Seed must be an integer", variable=SEED_ENV_VAR, value=raw)
    if seed < 0:
        raise InvariantError("Seed must be non-negative", seed=seed)
    return seed


def named_seed(master: int, stream: str) -> int:
    digest = hashlib.sha256(f"{master}:{stream}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & _SEED_MASK


def stream_rng(master: int, stream: str, index: Optional[int] = None) -> np.random.Generator:
    seed = named_seed(master, stream)
    if index is not None:
        seed ^= index
    return np.random.default_rng(seed)

"""
Shared fixtures: a small seed pool and a one-instance-per-type benchmark.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import pytest

from src.saboteur import ErrorType, SabotageConfig, generate_benchmark, generate_pool
from src.seeding import stream_rng

TEST_SEED = 7
TEST_CONFIG = SabotageConfig(max_regenerations=10, rng_seed=TEST_SEED)


@pytest.fixture(scope="session")
def pool():
    return generate_pool(9, stream_rng(TEST_SEED, "pool"))


@pytest.fixture(scope="session")
def bench(pool):
    counts = {t: 1 for t in ErrorType}
    return generate_benchmark(pool, counts, TEST_CONFIG)

"""Seeded random streams for reproducible, order-independent Monte Carlo.

Every simulated path owns a family of independent named generators derived
from ``(master_seed, path_index)``. Results therefore do not depend on how
paths are distributed across workers.
"""

import numpy as np

STREAM_NAMES = ("jumps", "brownian", "sampling", "bootstrap")


def path_streams(master_seed: int, path_index: int) -> dict[str, np.random.Generator]:
    """Independent generators for one path, keyed by stream name."""
    return {
        name: np.random.default_rng(
            np.random.SeedSequence(master_seed, spawn_key=(path_index, k))
        )
        for k, name in enumerate(STREAM_NAMES)
    }

"""Reproducible random streams keyed by integer tuples.

Every logical consumer of randomness (a DP grid node, a simulated path, an
OLFC decision epoch) owns a stream derived from ``(root_seed, *key)`` through
``numpy.random.SeedSequence`` spawn keys, backed by the counter-based Philox
bit generator. Streams never depend on evaluation order.
"""

from __future__ import annotations

import numpy as np

# first element of every key; keeps consumers from colliding
DP_NODE = 0
SIM_PATH = 1
OLFC_EPOCH = 2
SWEEP_CELL = 3


def stream(root_seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for ``key`` under ``root_seed``."""
    seq = np.random.SeedSequence(int(root_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(root_seed: int, *key: int) -> int:
    """Derive a child root seed (a 63-bit integer) for ``key``."""
    seq = np.random.SeedSequence(int(root_seed), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))

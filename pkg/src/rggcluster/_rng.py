"""Counter-based splittable random streams for reproducible parallel Monte Carlo.

Every sampler in this package draws from a Philox generator keyed by
``(master seed, replicate index, stream role)``.  Distinct key triples give
statistically independent streams, so replicates can be generated in any
order, split across processes, or re-run individually without any sequential
state handoff.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1

# Stream roles.  Each (sampler, purpose) pair gets its own role so that two
# different draws made from the same (seed, replicate) never collide.
ROLE_COUNT = 1
ROLE_POINTS = 2
ROLE_ACCEPT = 3
ROLE_VOLUME = 4
ROLE_SPHERE = 5
ROLE_SHELL = 6
ROLE_PROPOSAL = 7
ROLE_WEIGHT = 8
ROLE_INNER_VOLUME = 9
ROLE_MASS = 10
ROLE_CHAIN = 11
ROLE_BOOTSTRAP = 12


def stream(seed: int, replicate: int = 0, role: int = 0) -> np.random.Generator:
    """Return an independent generator keyed by (seed, replicate, role)."""
    if replicate < 0 or role < 0:
        raise ValueError("replicate and role must be non-negative")
    key = np.array(
        [seed & _MASK64, ((replicate & _MASK32) << 32) | (role & _MASK32)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))

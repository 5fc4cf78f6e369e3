"""Deterministic counter-based random substreams.

All randomness in this package flows through :func:`substream`.  A substream is
a Philox generator keyed by ``(seed, namespace, *indices)`` through
``numpy.random.SeedSequence`` spawn keys, so the stream assigned to a unit of
work (a bootstrap replicate, an observation row, a Monte Carlo replication)
depends only on its key and never on execution order or worker count.

Namespaces keep consumers that share one user-facing seed on independent
streams: a sample generated with seed ``s`` and a bootstrap run with the same
``s`` never touch the same generator state.
"""

import numpy as np

# Stream namespaces.  One per consumer of a user-facing seed.
NS_DATA = 0          # synthetic observation rows
NS_BOOT_MEDIAN = 1   # multiplier bootstrap replicates, spatial-median target
NS_BOOT_MEAN = 2     # multiplier bootstrap replicates, mean target
NS_BLOCKS = 3        # block partitioning for median-of-means
NS_HARNESS = 4       # per-replication seed derivation in the simulation harness


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return an independent generator keyed by ``(seed, *path)``.

    Identical arguments always yield an identical stream, on every platform
    and regardless of how many other substreams are in use.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in path))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *path: int) -> int:
    """Derive an integer seed keyed by ``(seed, *path)``.

    Used where a component takes a seed of its own (e.g. one seed per
    Monte Carlo replication) and will namespace its substreams internally.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rademacher(rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` independent random signs, each +1 or -1 with probability 1/2."""
    return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0

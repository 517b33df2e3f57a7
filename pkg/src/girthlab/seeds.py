"""Deterministic seed derivation.

Every randomized run has exactly one 64-bit master seed; every internal
consumer (matching draw, restart, gadget attempt, sweep cell) derives its
own seed by hashing the master seed together with a string label, so the
final output depends only on the master seed and not on scheduling.
"""

import hashlib

import numpy as np


def derive_seed(master: int, *labels) -> int:
    """Map (master, labels...) to a stable 64-bit seed."""
    text = "girthlab|%d|%s" % (master, "/".join(str(x) for x in labels))
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "little")


def rng_for(master: int, *labels) -> np.random.Generator:
    """Seeded PCG64 generator for the given derivation path."""
    return np.random.Generator(np.random.PCG64(derive_seed(master, *labels)))

"""Seeded substream derivation.

Every random draw in the package comes from a counter-based Philox
(philox4x64-10) generator whose 128-bit key is derived from the user seed
and a purpose tag:

    key = little-endian uint128 of SHA-256(f"{seed}:{tag}")[:16]

Distinct tags give statistically independent streams, and the derivation
is reproducible in any language with SHA-256 and a Philox implementation.
The algorithm name below is recorded in experiment records so saved runs
stay replayable.
"""

import hashlib

import numpy as np

RNG_ALGORITHM = "philox4x64-10/sha256-keyed-substreams"


def substream(seed: int, tag: str) -> np.random.Generator:
    """Return the generator for (seed, tag)."""
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    digest = hashlib.sha256(f"{seed}:{tag}".encode("ascii")).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))

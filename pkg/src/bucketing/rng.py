"""Deterministic, order-independent random stream derivation.

Every randomized operation in the package takes an explicit 64-bit seed and
derives independent sub-streams by hashing ``(seed, purpose_tag, index...)``
with SHA-256.  The resulting 128-bit digest seeds numpy's PCG64, so results
never depend on the order in which sub-streams are consumed.
"""

import hashlib

import numpy as np


def derive_rng(seed: int, *tags) -> np.random.Generator:
    """Return a Generator for the sub-stream identified by (seed, *tags).

    Tags may be strings or integers; the same tuple always yields the same
    stream, on any platform.
    """
    h = hashlib.sha256()
    h.update(int(seed).to_bytes(8, "little", signed=False))
    for tag in tags:
        if isinstance(tag, str):
            h.update(b"s" + tag.encode("utf-8") + b"\x00")
        else:
            h.update(b"i" + int(tag).to_bytes(8, "little", signed=True))
    entropy = int.from_bytes(h.digest()[:16], "little")
    return np.random.default_rng(np.random.PCG64(entropy))

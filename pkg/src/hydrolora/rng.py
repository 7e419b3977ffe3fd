"""Purpose-keyed random substreams.

Traffic, shadowing, and placement draws must come from independent generators
derived from one master seed, so that changing the gateway layout never
perturbs the traffic timeline of a paired run.  Keys are hashed with SHA-256,
not Python's salted ``hash``, to keep streams stable across processes.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(*keys) -> np.random.Generator:
    """Return a generator seeded deterministically from the given keys.

    Keys may be ints or strings; the same key tuple always yields the same
    stream, and distinct tuples yield statistically independent streams.
    """
    text = "\x1f".join(str(k) for k in keys)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4)]
    return np.random.default_rng(np.random.SeedSequence(words))

"""Labeled, counter-based random streams.

All randomness in the package flows through :func:`stream`, which maps a
root seed plus an arbitrary tuple of labels to an independent Philox
generator.  Because the stream for trial ``i`` depends only on
``(seed, label, i)``, results are identical no matter how work is split
across workers or in which order it runs.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["stream", "label_key"]

_MASK64 = (1 << 64) - 1


def label_key(label) -> int:
    """Stable 64-bit integer for a label (ints pass through, strings hashed)."""
    if isinstance(label, (int, np.integer)):
        return int(label) & _MASK64
    digest = hashlib.blake2b(str(label).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def stream(seed: int, *labels) -> np.random.Generator:
    """Generator for the sub-stream ``seed / labels[0] / labels[1] / ...``."""
    entropy = [int(seed) & _MASK64] + [label_key(lab) for lab in labels]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

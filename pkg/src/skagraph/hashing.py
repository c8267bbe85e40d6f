"""Affine hash functions over GF(2) and the linear algebra they need.

A hash ``h(x) = M x + c`` maps ``in_bits``-bit integers to ``out_bits``-bit
integers.  Row ``i`` of ``M`` is stored as an integer mask; output bit ``i``
is the parity of ``row_i & x`` XOR bit ``i`` of ``c``.  Drawing ``M`` and
``c`` uniformly gives a pairwise-independent family.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import UsageError

__all__ = ["AffineHash", "gf2_rank", "weight_masks", "syndrome_table"]


def gf2_rank(rows) -> int:
    """Rank over GF(2) of a list of integer row masks."""
    pivots: dict[int, int] = {}
    rank = 0
    for r in rows:
        r = int(r)
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def _random_bits(rng: np.random.Generator, nbits: int) -> int:
    if nbits == 0:
        return 0
    words = rng.integers(0, 1 << 32, size=(nbits + 31) // 32, dtype=np.uint64)
    v = 0
    for wd in words:
        v = (v << 32) | int(wd)
    return v & ((1 << nbits) - 1)


@dataclass(frozen=True)
class AffineHash:
    rows: tuple[int, ...]
    offset: int
    in_bits: int

    @property
    def out_bits(self) -> int:
        return len(self.rows)

    @classmethod
    def random(cls, rng: np.random.Generator, out_bits: int, in_bits: int) -> "AffineHash":
        if in_bits > 64:
            raise UsageError("affine hashes take at most 64 input bits")
        rows = tuple(_random_bits(rng, in_bits) for _ in range(out_bits))
        return cls(rows, _random_bits(rng, out_bits), in_bits)

    @classmethod
    def constant(cls, out_bits: int, in_bits: int, value: int = 0) -> "AffineHash":
        return cls((0,) * out_bits, value, in_bits)

    def __call__(self, x: int) -> int:
        out = self.offset
        for i, row in enumerate(self.rows):
            out ^= ((row & x).bit_count() & 1) << i
        return out

    def apply(self, xs) -> np.ndarray:
        xs = np.asarray(xs).astype(np.uint64)
        out = np.full(xs.shape, self.offset, dtype=np.uint64)
        for i, row in enumerate(self.rows):
            par = np.bitwise_count(xs & np.uint64(row)) & np.uint8(1)
            out ^= par.astype(np.uint64) << np.uint64(i)
        return out

    def columns(self) -> list[int]:
        """Column ``j`` of M as an ``out_bits``-bit integer (the image of bit j)."""
        cols = []
        for j in range(self.in_bits):
            c = 0
            for i, row in enumerate(self.rows):
                c |= ((row >> j) & 1) << i
            cols.append(c)
        return cols

    def to_bits(self) -> str:
        """Row-major matrix bits (bit j of row i at offset i*in_bits + j), then the offset bits."""
        parts = ["".join(str((row >> j) & 1) for j in range(self.in_bits)) for row in self.rows]
        parts.append("".join(str((self.offset >> i) & 1) for i in range(self.out_bits)))
        return "".join(parts)

    @classmethod
    def from_bits(cls, bits: str, out_bits: int, in_bits: int) -> "AffineHash":
        if len(bits) != out_bits * (in_bits + 1):
            raise UsageError("seed bit-length does not match the declared shape")
        rows = tuple(
            sum(int(bits[i * in_bits + j]) << j for j in range(in_bits)) for i in range(out_bits)
        )
        tail = bits[out_bits * in_bits :]
        return cls(rows, sum(int(b) << i for i, b in enumerate(tail)), in_bits)

    @property
    def seed_bits(self) -> int:
        return self.out_bits * (self.in_bits + 1)


@lru_cache(maxsize=256)
def weight_masks(width: int, weight: int) -> np.ndarray:
    """All ``width``-bit masks of the given weight, ascending (uint64)."""
    if weight < 0 or weight > width:
        return np.empty(0, dtype=np.uint64)
    if weight == 0:
        return np.zeros(1, dtype=np.uint64)
    parts = [weight_masks(top, weight - 1) | np.uint64(1 << top) for top in range(weight - 1, width)]
    out = np.concatenate(parts)
    out.flags.writeable = False
    return out


def syndrome_table(cols: list[int]):
    """Vectorized ``mask -> XOR of cols[j] over set bits j`` via byte lookups."""
    tables = []
    for start in range(0, len(cols), 8):
        t = np.zeros(1, dtype=np.uint64)
        for c in cols[start : start + 8]:
            t = np.concatenate([t, t ^ np.uint64(c)])
        tables.append(t)

    def apply(masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        out = np.zeros(masks.shape, dtype=np.uint64)
        for k, t in enumerate(tables):
            idx = (masks >> np.uint64(8 * k)) & np.uint64(len(t) - 1)
            out ^= t[idx.astype(np.int64)]
        return out

    return apply

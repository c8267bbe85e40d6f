"""Implicit regular bipartite graphs.

Families
--------
``point-line``
    Points of F_q^2 (left, index ``x*q + y``) against non-vertical lines
    ``y = a*x - b`` (right, index ``a*q + b``).  Degree q.
``euclidean``
    F_q^2 on both sides, joined when ``(x1-y1)^2 + (x2-y2)^2 == r``.  q odd.
``hamming``
    {0,1}^n on both sides, joined at Hamming distance exactly ``w``.
``complete``
    K_{M,M} with M = 2^m_bits.
``tensor``
    ``base (x) K_{M,M}``: vertex ``(b, aux)`` has index ``b*M + aux`` and
    ``((x, rA), (y, rB))`` is an edge iff ``(x, y)`` is a base edge.

Nothing is ever materialized as an adjacency list.  Everything is built on
:meth:`GraphSpec.neighbor_block`, which returns the neighbors of a batch of
vertices for a batch of "slots" (a slot ``j`` in ``[0, D)`` picks the j-th
neighbor in a fixed per-family enumeration).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterator

import numpy as np

from .errors import ConfigurationError, InvariantViolation, UsageError
from .field import FieldSpec

__all__ = [
    "Side",
    "VertexId",
    "Edge",
    "GraphSpec",
    "point_line",
    "euclidean",
    "hamming",
    "hamming_theta",
    "complete_bipartite",
    "tensor_with_complete",
    "is_edge",
    "neighbors",
    "degree",
    "sample_edge",
    "biadjacency_matvec",
    "dense_biadjacency",
    "edge_test_arr",
    "sample_edges",
    "check_regularity",
]

FAMILIES = ("point-line", "euclidean", "hamming", "complete", "tensor")


class Side(str, Enum):
    LEFT = "L"
    RIGHT = "R"


@dataclass(frozen=True, order=True)
class VertexId:
    side: Side
    index: int


@dataclass(frozen=True)
class Edge:
    left: VertexId
    right: VertexId


@dataclass(frozen=True)
class GraphSpec:
    """Immutable description of one graph instance.

    Build instances with the family helpers (:func:`point_line`,
    :func:`hamming`, ...); they validate the parameters.
    """

    family: str
    field: FieldSpec | None = None
    r: int = 1
    n_bits: int = 0
    w: int = 0
    base: "GraphSpec | None" = None
    m_bits: int = 0

    def __post_init__(self):
        fam = self.family
        if fam not in FAMILIES:
            raise ConfigurationError(f"unknown graph family {fam!r}")
        if fam in ("point-line", "euclidean") and self.field is None:
            raise ConfigurationError(f"{fam} needs a field")
        if fam == "euclidean":
            if self.field.characteristic == 2:
                raise ConfigurationError("euclidean distance graph needs odd q")
            if not 0 < self.r < self.field.q:
                raise ConfigurationError("euclidean distance graph needs r != 0")
        if fam == "hamming":
            if not 0 < self.w < self.n_bits:
                raise ConfigurationError(f"hamming graph needs 0 < w < n, got w={self.w}, n={self.n_bits}")
            if self.n_bits > 62:
                raise ConfigurationError("hamming graph vertices must fit in 62 bits")
        if fam == "tensor":
            if self.base is None:
                raise ConfigurationError("tensor family needs a base graph")
            if self.m_bits < 0:
                raise ConfigurationError("m_bits must be >= 0")
        if fam == "complete" and self.m_bits < 0:
            raise ConfigurationError("m_bits must be >= 0")

    # -- sizes -------------------------------------------------------------

    @property
    def M(self) -> int:
        return 1 << self.m_bits

    @cached_property
    def N(self) -> int:
        """Vertices per side."""
        fam = self.family
        if fam in ("point-line", "euclidean"):
            return self.field.q**2
        if fam == "hamming":
            return 1 << self.n_bits
        if fam == "complete":
            return self.M
        return self.base.N * self.M

    @cached_property
    def degree(self) -> int:
        fam = self.family
        if fam == "point-line":
            return self.field.q
        if fam == "euclidean":
            return len(self._circle)
        if fam == "hamming":
            return math.comb(self.n_bits, self.w)
        if fam == "complete":
            return self.M
        return self.base.degree * self.M

    @property
    def num_edges(self) -> int:
        return self.N * self.degree

    @property
    def q(self) -> int | None:
        return self.field.q if self.field is not None else None

    # -- per-family precomputation ------------------------------------------

    @cached_property
    def _circle(self) -> np.ndarray:
        """Offsets d with d1^2 + d2^2 == r, shape (D, 2), sorted by index."""
        F = self.field
        q = F.q
        sq = F.square_arr(np.arange(q))
        d1, d2 = np.divmod(np.arange(q * q), q)
        hit = F.add_arr(sq[d1], sq[d2]) == self.r
        return np.stack([d1[hit], d2[hit]], axis=1)

    @cached_property
    def _masks(self) -> np.ndarray:
        """All n-bit words of weight w in increasing order."""
        n, w = self.n_bits, self.w
        out = np.zeros(math.comb(n, w), dtype=np.int64)
        # colex generation via Gosper's hack keeps the list sorted
        v = (1 << w) - 1
        for i in range(out.size):
            out[i] = v
            c = v & -v
            r = v + c
            v = (((r ^ v) >> 2) // c) | r
        return out

    # -- neighbor enumeration ---------------------------------------------

    def neighbor_block(self, side: Side, u, slots=None) -> np.ndarray:
        """Neighbors of vertices ``u`` (1-D int array) at the given slots.

        Returns an int64 array of shape ``(len(u), len(slots))``; ``slots``
        defaults to all ``D`` slots.
        """
        u = np.asarray(u, dtype=np.int64).reshape(-1)
        if slots is None:
            slots = np.arange(self.degree, dtype=np.int64)
        slots = np.asarray(slots, dtype=np.int64).reshape(1, -1)
        fam = self.family
        if fam == "point-line":
            F, q = self.field, self.field.q
            first, second = np.divmod(u[:, None], q)
            if side is Side.LEFT:
                # point (x0, y0) lies on line (a, b) with b = a*x0 - y0
                b = F.sub_arr(F.mul_arr(slots, first), second)
                return slots * q + b
            # line (a, b) contains point (x0, a*x0 - b)
            y0 = F.sub_arr(F.mul_arr(first, slots), second)
            return slots * q + y0
        if fam == "euclidean":
            F, q = self.field, self.field.q
            x1, x2 = np.divmod(u[:, None], q)
            d = self._circle[slots[0]]
            op = F.add_arr if side is Side.LEFT else F.sub_arr
            return op(x1, d[None, :, 0]) * q + op(x2, d[None, :, 1])
        if fam == "hamming":
            return u[:, None] ^ self._masks[slots]
        if fam == "complete":
            return np.broadcast_to(slots, (u.size, slots.shape[1])).copy()
        M = self.M
        base_nb = self.base.neighbor_block(side, u // M, slots[0] // M)
        return base_nb * M + (slots % M)

    def to_dict(self) -> dict:
        d = {
            "family": self.family,
            "q": self.q,
            "modulus": self.field.canonical if self.field is not None else None,
            "r": self.r if self.family == "euclidean" else None,
            "n": self.n_bits if self.family == "hamming" else None,
            "w": self.w if self.family == "hamming" else None,
            "m_bits": self.m_bits if self.family in ("tensor", "complete") else None,
        }
        if self.base is not None:
            d["base"] = self.base.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GraphSpec":
        fam = d["family"]
        if fam == "point-line":
            return point_line(FieldSpec.parse(d["modulus"]) if d.get("modulus") else d["q"])
        if fam == "euclidean":
            return euclidean(FieldSpec.parse(d["modulus"]) if d.get("modulus") else d["q"], d.get("r") or 1)
        if fam == "hamming":
            return hamming(d["n"], d["w"])
        if fam == "complete":
            return complete_bipartite(d["m_bits"])
        if fam == "tensor":
            return tensor_with_complete(cls.from_dict(d["base"]), d["m_bits"])
        raise ConfigurationError(f"unknown graph family {fam!r}")

    def describe(self) -> str:
        fam = self.family
        if fam == "point-line":
            return f"PointLine(F_{self.q})"
        if fam == "euclidean":
            return f"EuclideanDist(F_{self.q}, r={self.r})"
        if fam == "hamming":
            return f"HammingDist(n={self.n_bits}, w={self.w})"
        if fam == "complete":
            return f"K_{{{self.M},{self.M}}}"
        return f"{self.base.describe()} x K_{{{self.M},{self.M}}}"


def _field(q) -> FieldSpec:
    return q if isinstance(q, FieldSpec) else FieldSpec.of_order(int(q))


def point_line(q) -> GraphSpec:
    return GraphSpec("point-line", field=_field(q))


def euclidean(q, r: int = 1) -> GraphSpec:
    return GraphSpec("euclidean", field=_field(q), r=int(r))


def hamming(n_bits: int, w: int) -> GraphSpec:
    return GraphSpec("hamming", n_bits=int(n_bits), w=int(w))


def hamming_theta(n_bits: int, theta: float | None = None) -> GraphSpec:
    """Hamming graph at distance ``round(theta * n)``; theta defaults to h^-1(1/2)."""
    if theta is None:
        from .info import solve_entropy

        theta = solve_entropy(0.5)
    return hamming(n_bits, int(round(theta * n_bits)))


def complete_bipartite(m_bits: int) -> GraphSpec:
    return GraphSpec("complete", m_bits=int(m_bits))


def tensor_with_complete(base: GraphSpec, m_bits: int) -> GraphSpec:
    if m_bits < 0:
        raise UsageError("m_bits must be >= 0")
    return GraphSpec("tensor", base=base, m_bits=int(m_bits))


# --- operations ---------------------------------------------------------


def _check_vertex(g: GraphSpec, v: VertexId):
    if not 0 <= v.index < g.N:
        raise UsageError(f"vertex index {v.index} out of range [0, {g.N})")


def is_edge(g: GraphSpec, u: VertexId, v: VertexId) -> bool:
    """Direct incidence test (independent of the neighbor enumeration)."""
    if u.side is not Side.LEFT or v.side is not Side.RIGHT:
        raise UsageError("is_edge expects (left vertex, right vertex)")
    _check_vertex(g, u)
    _check_vertex(g, v)
    return _edge_test(g, u.index, v.index)


def _edge_test(g: GraphSpec, x: int, y: int) -> bool:
    fam = g.family
    if fam == "point-line":
        F, q = g.field, g.field.q
        x0, y0 = divmod(x, q)
        a, b = divmod(y, q)
        return y0 == F.sub(F.mul(a, x0), b)
    if fam == "euclidean":
        F, q = g.field, g.field.q
        x1, x2 = divmod(x, q)
        y1, y2 = divmod(y, q)
        d1, d2 = F.sub(x1, y1), F.sub(x2, y2)
        return F.add(F.mul(d1, d1), F.mul(d2, d2)) == g.r
    if fam == "hamming":
        return (x ^ y).bit_count() == g.w
    if fam == "complete":
        return True
    return _edge_test(g.base, x // g.M, y // g.M)


def neighbors(g: GraphSpec, u: VertexId) -> Iterator[VertexId]:
    """Neighbors of ``u`` in ascending index order."""
    _check_vertex(g, u)
    other = Side.RIGHT if u.side is Side.LEFT else Side.LEFT
    nb = np.sort(g.neighbor_block(u.side, [u.index])[0])
    return (VertexId(other, int(i)) for i in nb)


def degree(g: GraphSpec) -> int:
    return g.degree


def check_regularity(g: GraphSpec) -> int:
    """Brute-force degree of every left and right vertex via :func:`is_edge`.

    Returns the common degree; raises :class:`InvariantViolation` when the
    graph is irregular or disagrees with ``g.degree``.  Quadratic in N.
    """
    N = g.N
    degs = set()
    for side in (Side.LEFT, Side.RIGHT):
        for u in range(N):
            if side is Side.LEFT:
                degs.add(sum(_edge_test(g, u, v) for v in range(N)))
            else:
                degs.add(sum(_edge_test(g, v, u) for v in range(N)))
    if len(degs) != 1 or degs != {g.degree}:
        raise InvariantViolation(f"{g.describe()}: observed degrees {sorted(degs)}, expected {g.degree}")
    return g.degree


def sample_edge(g: GraphSpec, rng: np.random.Generator) -> Edge:
    """Uniform edge: uniform left vertex, then a uniform one of its D neighbors."""
    x = int(rng.integers(g.N))
    j = int(rng.integers(g.degree))
    y = int(g.neighbor_block(Side.LEFT, [x], [j])[0, 0])
    return Edge(VertexId(Side.LEFT, x), VertexId(Side.RIGHT, y))


def sample_edges(g: GraphSpec, rng: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`sample_edge`: arrays of left and right indices."""
    x = rng.integers(g.N, size=count).astype(np.int64)
    j = rng.integers(g.degree, size=count).astype(np.int64)
    y = np.empty(count, dtype=np.int64)
    step = max(1, (1 << 22) // g.degree)
    for s in range(0, count, step):
        nb = g.neighbor_block(Side.LEFT, x[s : s + step])
        y[s : s + step] = np.take_along_axis(nb, j[s : s + step, None], axis=1)[:, 0]
    return x, y


def biadjacency_matvec(g: GraphSpec, vec, transpose: bool = False, chunk_slots: int | None = None) -> np.ndarray:
    """``J @ vec`` (or ``J.T @ vec``) streamed over neighbor slots.

    ``J[x, y] = 1`` iff left ``x`` and right ``y`` are adjacent.  Memory is
    O(N * chunk_slots); the matrix is never formed.
    """
    vec = np.asarray(vec)
    N, D = g.N, g.degree
    side = Side.RIGHT if transpose else Side.LEFT
    if chunk_slots is None:
        chunk_slots = max(1, min(D, (1 << 22) // max(N, 1)))
    u = np.arange(N, dtype=np.int64)
    out = np.zeros(N, dtype=np.result_type(vec.dtype, np.float64))
    for start in range(0, D, chunk_slots):
        slots = np.arange(start, min(D, start + chunk_slots))
        out += vec[g.neighbor_block(side, u, slots)].sum(axis=1)
    return out


def edge_test_arr(g: GraphSpec, x, y) -> np.ndarray:
    """Vectorized direct incidence test; broadcasts ``x`` (left) against ``y`` (right)."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    fam = g.family
    if fam == "point-line":
        F, q = g.field, g.field.q
        x0, y0 = np.divmod(x, q)
        a, b = np.divmod(y, q)
        return y0 == F.sub_arr(F.mul_arr(a, x0), b)
    if fam == "euclidean":
        F, q = g.field, g.field.q
        x1, x2 = np.divmod(x, q)
        y1, y2 = np.divmod(y, q)
        d1, d2 = F.sub_arr(x1, y1), F.sub_arr(x2, y2)
        return F.add_arr(F.square_arr(d1), F.square_arr(d2)) == g.r
    if fam == "hamming":
        return np.bitwise_count(x ^ y) == g.w
    if fam == "complete":
        return np.ones(np.broadcast(x, y).shape, dtype=bool)
    return edge_test_arr(g.base, x // g.M, y // g.M)


def dense_biadjacency(g: GraphSpec, limit: int = 1 << 13) -> np.ndarray:
    """Materialized 0/1 bi-adjacency matrix from the direct incidence test.

    Independent of the slot enumeration, so it can serve as an oracle for
    anything built on :meth:`GraphSpec.neighbor_block`.  Small N only.
    """
    N = g.N
    if N > limit:
        raise UsageError(f"dense bi-adjacency refused for N={N} > {limit}")
    idx = np.arange(N, dtype=np.int64)
    return edge_test_arr(g, idx[:, None], idx[None, :]).astype(np.float64)

"""Exact edge counting between vertex subsets and mixing-lemma audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, ResourceBudgetError, UsageError
from .graphs import GraphSpec, Side

__all__ = [
    "SubsetPair",
    "MixingAudit",
    "DensityAudit",
    "edge_count",
    "mixing_check",
    "density_threshold",
    "density_bound_check",
    "spectral_gap_claim_audit",
    "uniform_pair",
    "neighbor_ball",
    "prefix_cylinder",
    "line_pencil",
    "hamming_cylinder_counterexample",
    "EDGE_BUDGET",
]

EDGE_BUDGET = 1 << 27
_CHUNK = 1 << 21


@dataclass(frozen=True)
class SubsetPair:
    A: np.ndarray  # sorted unique left indices
    B: np.ndarray  # sorted unique right indices
    provenance: dict = field(default_factory=lambda: {"kind": "explicit"})

    @classmethod
    def make(cls, A, B, provenance=None) -> "SubsetPair":
        A = np.unique(np.asarray(A, dtype=np.int64))
        B = np.unique(np.asarray(B, dtype=np.int64))
        if A.size == 0 or B.size == 0:
            raise UsageError("subsets must be nonempty")
        return cls(A, B, provenance or {"kind": "explicit"})


def _mask(N: int, idx: np.ndarray) -> np.ndarray:
    m = np.zeros(N, dtype=bool)
    m[idx] = True
    return m


def edge_count(g: GraphSpec, pair: SubsetPair, budget: int = EDGE_BUDGET) -> int:
    """Exact |E(A, B)|.

    Streams the neighbors of whichever side has the smaller ``|set| * D`` and
    tests membership of the other side in a boolean mask.
    """
    A, B = pair.A, pair.B
    N, D = g.N, g.degree
    if A[-1] >= N or B[-1] >= N or A[0] < 0 or B[0] < 0:
        raise UsageError("subset index out of range")
    if A.size <= B.size:
        walk, side, other = A, Side.LEFT, B
    else:
        walk, side, other = B, Side.RIGHT, A
    if walk.size * D > budget:
        raise ResourceBudgetError(
            f"exact count needs {walk.size * D} neighbor visits (budget {budget}); use sampling mode"
        )
    member = _mask(N, other)
    rows = max(1, _CHUNK // D)
    total = 0
    for s in range(0, walk.size, rows):
        total += int(np.count_nonzero(member[g.neighbor_block(side, walk[s : s + rows])]))
    return total


def density_threshold(g: GraphSpec) -> float:
    """Minimum |A| |B| for the density bound: N^2 / D, or (MN)^2 / D_base for tensors."""
    if g.family == "tensor":
        return g.N**2 / g.base.degree
    return g.N**2 / g.degree


@dataclass(frozen=True)
class MixingAudit:
    size_a: int
    size_b: int
    e_count: int
    expected: float
    bound: float
    deviation: float
    density_ratio: float
    large_pair: bool

    @property
    def holds(self) -> bool:
        # tiny relative slack absorbs rounding in a numerically computed lambda_2
        return self.deviation <= self.bound * (1 + 1e-9) + 1e-9

    def as_row(self) -> dict:
        return {
            "size_a": self.size_a,
            "size_b": self.size_b,
            "e_count": self.e_count,
            "expected": self.expected,
            "bound": self.bound,
            "deviation": self.deviation,
            "density_ratio": self.density_ratio,
            "large_pair": self.large_pair,
        }


def mixing_check(g: GraphSpec, pair: SubsetPair, lambda2: float, strict: bool = True) -> MixingAudit:
    """Audit |E(A,B) - D|A||B|/N| <= lambda2 sqrt(|A||B|) with an exact count."""
    e = edge_count(g, pair)
    a, b = int(pair.A.size), int(pair.B.size)
    expected = g.degree * a * b / g.N
    audit = MixingAudit(
        size_a=a,
        size_b=b,
        e_count=e,
        expected=expected,
        bound=lambda2 * math.sqrt(a * b),
        deviation=abs(e - expected),
        density_ratio=e / expected,
        large_pair=a * b >= density_threshold(g),
    )
    if e > min(a, b) * g.degree:
        raise InvariantViolation(f"edge count {e} exceeds min(|A|,|B|)*D")
    if strict and not audit.holds:
        raise InvariantViolation(
            f"mixing lemma violated on {g.describe()}: deviation {audit.deviation} > bound {audit.bound}"
        )
    return audit


@dataclass(frozen=True)
class DensityAudit:
    audit: MixingAudit
    threshold: float
    ratio_cap: float
    ceiling: float | None

    @property
    def ok(self) -> bool:
        return self.audit.density_ratio <= self.ratio_cap


def density_bound_check(
    g: GraphSpec, pair: SubsetPair, lambda2: float | None = None, ratio_cap: float = 2.0
) -> DensityAudit:
    """Density ratio of a qualifying pair against the cap (2 by default).

    ``ceiling`` is what the mixing lemma itself guarantees for this pair,
    ``1 + lambda2 * N / (D * sqrt(|A||B|))``, when ``lambda2`` is given.
    """
    a, b = int(pair.A.size), int(pair.B.size)
    thr = density_threshold(g)
    if a * b < thr:
        raise UsageError(f"pair too small for the density bound: |A||B| = {a * b} < N^2/D = {thr:g}")
    e = edge_count(g, pair)
    expected = g.degree * a * b / g.N
    audit = MixingAudit(
        size_a=a,
        size_b=b,
        e_count=e,
        expected=expected,
        bound=(lambda2 or 0.0) * math.sqrt(a * b),
        deviation=abs(e - expected),
        density_ratio=e / expected,
        large_pair=True,
    )
    ceiling = None if lambda2 is None else 1.0 + lambda2 * g.N / (g.degree * math.sqrt(a * b))
    return DensityAudit(audit, thr, ratio_cap, ceiling)


# --- subset generators ----------------------------------------------------


def uniform_pair(g: GraphSpec, size_a: int, size_b: int, rng: np.random.Generator) -> SubsetPair:
    N = g.N
    if not (1 <= size_a <= N and 1 <= size_b <= N):
        raise UsageError(f"subset sizes must lie in [1, {N}]")
    A = rng.choice(N, size=size_a, replace=False)
    B = rng.choice(N, size=size_b, replace=False)
    return SubsetPair.make(A, B, {"kind": "uniform", "size_a": size_a, "size_b": size_b})


def neighbor_ball(g: GraphSpec, center: int, radius: int) -> SubsetPair:
    """A = left vertices within distance 2*radius of ``center``; B = N(A)."""
    A = np.array([center], dtype=np.int64)
    for step in range(radius + 1):
        B = np.unique(g.neighbor_block(Side.LEFT, A))
        if step < radius:
            A = np.unique(g.neighbor_block(Side.RIGHT, B))
    return SubsetPair.make(A, B, {"kind": "ball", "center": int(center), "radius": radius})


def prefix_cylinder(g: GraphSpec, prefix: int, prefix_len: int) -> SubsetPair:
    """A = B = Hamming strings whose top ``prefix_len`` bits equal ``prefix``."""
    if g.family != "hamming":
        raise UsageError("prefix cylinders are defined for the hamming family")
    n = g.n_bits
    if not 0 <= prefix_len <= n or not 0 <= prefix < (1 << prefix_len):
        raise UsageError("invalid prefix")
    lo = prefix << (n - prefix_len)
    block = np.arange(lo, lo + (1 << (n - prefix_len)), dtype=np.int64)
    return SubsetPair.make(block, block, {"kind": "cylinder", "prefix": prefix, "prefix_len": prefix_len})


def line_pencil(g: GraphSpec, point: int, k: int, rng: np.random.Generator | None = None) -> SubsetPair:
    """B = k of the q lines through ``point``; A = every point on those lines."""
    if g.family != "point-line":
        raise UsageError("line pencils are defined for the point-line family")
    through = g.neighbor_block(Side.LEFT, [point])[0]
    if rng is not None:
        through = rng.permutation(through)
    B = through[:k]
    A = np.unique(g.neighbor_block(Side.RIGHT, B))
    return SubsetPair.make(A, B, {"kind": "pencil", "point": int(point), "k": k})


def hamming_cylinder_counterexample(g: GraphSpec) -> tuple[SubsetPair, DensityAudit]:
    """Qualifying all-zero-prefix cylinder pair with the largest density ratio.

    For prefix length p the pair qualifies when 4^p <= C(n, w), and its
    density ratio is 2^p C(n-p, w) / C(n, w).
    """
    if g.family != "hamming":
        raise UsageError("counterexample search is for the hamming family")
    n, w = g.n_bits, g.w
    qualifying = [p for p in range(n + 1) if (1 << (2 * (n - p))) >= density_threshold(g)]
    # pick p by the closed form, then certify the winner by exact counting
    best_p = max(qualifying, key=lambda p: (1 << p) * math.comb(n - p, w) / math.comb(n, w))
    pair = prefix_cylinder(g, 0, best_p)
    return pair, density_bound_check(g, pair)


@dataclass
class ClaimAudit:
    a_bits: int
    b_bits: int
    log_bound: float
    log_counts: list[float]

    @property
    def ok(self) -> bool:
        return all(c <= self.log_bound + 1e-12 for c in self.log_counts)

    @property
    def max_log_count(self) -> float:
        return max(self.log_counts)


def spectral_gap_claim_audit(
    g_hat: GraphSpec, a_bits: int, b_bits: int, draws: int = 100, rng: np.random.Generator | None = None
) -> ClaimAudit:
    """log2 |E(A,B)| <= a + b + log2(D/N) + 1 for random A, B of sizes 2^a, 2^b.

    The size precondition is 2^(a+b) >= (MN)^2 / D with D the base degree.
    """
    if g_hat.family != "tensor":
        raise UsageError("the claim audit is stated for a tensor graph")
    thr = density_threshold(g_hat)
    if 2.0 ** (a_bits + b_bits) < thr:
        raise UsageError(f"2^(a+b) = 2^{a_bits + b_bits} is below (MN)^2/D = {thr:g}")
    N = g_hat.N
    if (1 << a_bits) > N or (1 << b_bits) > N:
        raise UsageError("subset sizes exceed the vertex count")
    rng = rng if rng is not None else np.random.default_rng(0)
    bound = a_bits + b_bits + math.log2(g_hat.degree / N) + 1
    counts = []
    for _ in range(draws):
        e = edge_count(g_hat, uniform_pair(g_hat, 1 << a_bits, 1 << b_bits, rng))
        counts.append(math.log2(e) if e else float("-inf"))
    return ClaimAudit(a_bits, b_bits, bound, counts)

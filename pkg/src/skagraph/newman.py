"""Randomness reduction for private-coin protocols by grid sampling.

A protocol is a pure map ``(x, y, r_A, r_B) -> (z1, z2, t)``.  Replacing the
random strings by a uniformly chosen pair from a fixed ``k x k`` grid
``(a_i, b_j)`` cuts each party's randomness to ``ceil(log2 k)`` bits; if the
grid samples every outcome event to precision ``delta``, the outcome
probabilities move by less than ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, ResourceBudgetError, UsageError

__all__ = [
    "SampleGrid",
    "OutcomeTable",
    "BlackBoxProtocol",
    "FailureRate",
    "DerandomizedProtocol",
    "draw_grid",
    "grid_density",
    "delta_precise_check",
    "sampling_failure_rate",
    "hoeffding_grid_bound",
    "outcome_tables",
    "outcome_tables_by_simulation",
    "derandomize_protocol",
    "choose_k",
    "parity_toy_protocol",
    "ska_validity_transfer",
    "EXACT_RANDOMNESS_LIMIT",
    "RETRY_CAP",
]

EXACT_RANDOMNESS_LIMIT = 1 << 16
RETRY_CAP = 64


@dataclass(frozen=True)
class SampleGrid:
    a_list: np.ndarray
    b_list: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if len(self.a_list) != len(self.b_list) or len(self.a_list) < 1:
            raise UsageError("grid needs k >= 1 entries on each side")

    @property
    def k(self) -> int:
        return len(self.a_list)

    @property
    def random_bits(self) -> int:
        """Private random bits per party under the derandomized protocol."""
        return math.ceil(math.log2(self.k)) if self.k > 1 else 0

    def counts(self, size_a: int, size_b: int) -> tuple[np.ndarray, np.ndarray]:
        return np.bincount(self.a_list, minlength=size_a), np.bincount(self.b_list, minlength=size_b)


def draw_grid(size_a: int, size_b: int, k: int, rng: np.random.Generator, seed: int | None = None) -> SampleGrid:
    """k independent uniform picks from each side (with replacement)."""
    if k < 1:
        raise UsageError("k must be >= 1")
    return SampleGrid(rng.integers(0, size_a, k), rng.integers(0, size_b, k), seed)


def hoeffding_grid_bound(delta: float, k: int) -> float:
    """Probability bound 4 exp(-delta^2 k / 2) for a grid to miss delta-precision."""
    return 4.0 * math.exp(-delta * delta * k / 2.0)


def grid_density(S: np.ndarray, grid: SampleGrid) -> float:
    """Fraction of the k^2 grid cells (a_i, b_j) inside S, exactly."""
    S = np.asarray(S)
    ca, cb = grid.counts(*S.shape)
    hits = int(ca @ S.astype(np.int64) @ cb)
    return hits / grid.k**2


def delta_precise_check(S, grid: SampleGrid, delta: float, true_density: float | None = None) -> bool:
    """Whether the grid estimates the density of S (a 0/1 matrix over A x B) to within delta."""
    S = np.asarray(S)
    if true_density is None:
        true_density = float(S.mean())
    return abs(grid_density(S, grid) - true_density) < delta


@dataclass(frozen=True)
class FailureRate:
    delta: float
    k: int
    draws: int
    failures: int
    bound: float
    max_deviation: float
    max_column_deviation: float

    @property
    def rate(self) -> float:
        return self.failures / self.draws

    @property
    def sigma(self) -> float:
        p = min(max(self.bound, 0.0), 1.0)
        return math.sqrt(p * (1 - p) / self.draws)

    @property
    def within_bound(self) -> bool:
        return self.rate <= self.bound + 3 * self.sigma

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "k": self.k,
            "draws": self.draws,
            "failures": self.failures,
            "rate": self.rate,
            "bound": self.bound,
            "sigma": self.sigma,
            "within_bound": self.within_bound,
            "max_deviation": self.max_deviation,
            "max_column_deviation": self.max_column_deviation,
        }


def sampling_failure_rate(
    S, delta: float, k: int, grid_draws: int, rng: np.random.Generator, batch: int = 512
) -> FailureRate:
    """Empirical fraction of random k x k grids that miss delta-precision on S.

    Also tracks the column-only deviation: the error left after sampling the
    k columns but averaging each over all rows.
    """
    if grid_draws < 1:
        raise UsageError("grid_draws must be >= 1")
    S = np.asarray(S, dtype=np.float64)
    na, nb = S.shape
    rho = float(S.mean())
    col_density = S.mean(axis=0)
    failures, max_dev, max_col = 0, 0.0, 0.0
    done = 0
    while done < grid_draws:
        bsz = min(batch, grid_draws - done)
        ia = rng.integers(0, na, (bsz, k))
        ib = rng.integers(0, nb, (bsz, k))
        ca = np.zeros((bsz, na))
        cb = np.zeros((bsz, nb))
        rows = np.repeat(np.arange(bsz), k)
        np.add.at(ca, (rows, ia.ravel()), 1.0)
        np.add.at(cb, (rows, ib.ravel()), 1.0)
        dens = np.einsum("ij,ij->i", ca @ S, cb) / (k * k)
        dev = np.abs(dens - rho)
        col_dev = np.abs(cb @ col_density / k - rho)
        failures += int(np.count_nonzero(dev >= delta))
        max_dev = max(max_dev, float(dev.max()))
        max_col = max(max_col, float(col_dev.max()))
        done += bsz
    return FailureRate(delta, k, grid_draws, failures, min(hoeffding_grid_bound(delta, k), 1.0), max_dev, max_col)


# --- protocols and outcome tables ---------------------------------------------


@dataclass(frozen=True)
class BlackBoxProtocol:
    """A protocol given as a pure function of (x, y, r_A, r_B).

    Inputs and random strings are integers in ``range(2**bits)``; ``fn``
    returns a hashable outcome ``(z1, z2, t)``.
    """

    name: str
    fn: Callable[[int, int, int, int], tuple]
    x_bits: int
    y_bits: int
    ra_bits: int
    rb_bits: int

    def __call__(self, x, y, ra, rb):
        return self.fn(x, y, ra, rb)

    @property
    def randomness_size(self) -> int:
        return 1 << (self.ra_bits + self.rb_bits)


@dataclass
class OutcomeTable:
    """Probabilities p[(x, y)][outcome] and the exact integer counts behind them."""

    outcomes: list
    counts: np.ndarray  # (X, Y, n_outcomes) integers
    denominator: int
    mode: str

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.denominator

    def check_normalized(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.probabilities.sum(axis=2) - 1.0) <= tol))

    def as_map(self, x: int, y: int) -> dict:
        p = self.probabilities[x, y]
        return {o: float(p[i]) for i, o in enumerate(self.outcomes) if p[i] > 0}


def _outcome_matrix(pi: BlackBoxProtocol) -> tuple[list, np.ndarray]:
    """Index of pi(x, y, r_A, r_B) in a sorted outcome list, for every argument."""
    if pi.randomness_size > EXACT_RANDOMNESS_LIMIT:
        raise ResourceBudgetError(
            f"exact tables need 2^(ra_bits + rb_bits) <= 2^16, got 2^{pi.ra_bits + pi.rb_bits}"
        )
    X, Y, RA, RB = 1 << pi.x_bits, 1 << pi.y_bits, 1 << pi.ra_bits, 1 << pi.rb_bits
    raw = [[[[pi(x, y, a, b) for b in range(RB)] for a in range(RA)] for y in range(Y)] for x in range(X)]
    outcomes = sorted({o for bx in raw for by in bx for ba in by for o in ba})
    index = {o: i for i, o in enumerate(outcomes)}
    mat = np.array([[[[index[o] for o in ba] for ba in by] for by in bx] for bx in raw], dtype=np.int64)
    return outcomes, mat


def outcome_tables(pi: BlackBoxProtocol, grid: SampleGrid | None = None, outcomes_matrix=None) -> OutcomeTable:
    """Exact outcome probabilities of pi, or of the grid protocol built from it.

    With a grid the probability of outcome o is
    ``sum_{a,b} c_a[a] c_b[b] 1[pi(x,y,a,b) = o] / k^2`` with ``c`` the grid
    multiplicities.
    """
    outcomes, mat = outcomes_matrix if outcomes_matrix is not None else _outcome_matrix(pi)
    X, Y, RA, RB = mat.shape
    n_out = len(outcomes)
    if grid is None:
        wa, wb, den = np.ones(RA, np.int64), np.ones(RB, np.int64), RA * RB
        mode = "exact"
    else:
        wa, wb = grid.counts(RA, RB)
        den = grid.k**2
        mode = "exact-grid"
    counts = np.zeros((X, Y, n_out), dtype=np.int64)
    for o in range(n_out):
        ind = (mat == o).astype(np.int64)
        counts[:, :, o] = np.einsum("xyab,a,b->xy", ind, wa, wb)
    return OutcomeTable(outcomes, counts, den, mode)


def outcome_tables_by_simulation(pi: BlackBoxProtocol, grid: SampleGrid, outcomes: list) -> OutcomeTable:
    """Grid-protocol table by running pi on every (a_i, b_j) pair directly."""
    X, Y = 1 << pi.x_bits, 1 << pi.y_bits
    index = {o: i for i, o in enumerate(outcomes)}
    counts = np.zeros((X, Y, len(outcomes)), dtype=np.int64)
    for x in range(X):
        for y in range(Y):
            for a in grid.a_list:
                for b in grid.b_list:
                    counts[x, y, index[pi(x, y, int(a), int(b))]] += 1
    return OutcomeTable(outcomes, counts, grid.k**2, "simulated-grid")


@dataclass
class DerandomizedProtocol:
    """pi' : Alice picks i, Bob picks j, both run pi with (a_i, b_j)."""

    pi: BlackBoxProtocol
    grid: SampleGrid
    delta: float
    max_gap: float
    tries: int
    mode: str
    original: OutcomeTable
    derived: OutcomeTable
    gap_history: list[float] = field(default_factory=list)

    def __call__(self, x, y, i, j):
        return self.pi(x, y, int(self.grid.a_list[i]), int(self.grid.b_list[j]))

    @property
    def random_bits(self) -> int:
        return self.grid.random_bits

    def as_dict(self) -> dict:
        return {
            "protocol": self.pi.name,
            "k": self.grid.k,
            "delta": self.delta,
            "max_gap": self.max_gap,
            "tries": self.tries,
            "mode": self.mode,
            "random_bits_per_party": self.random_bits,
            "original_random_bits": [self.pi.ra_bits, self.pi.rb_bits],
        }


def derandomize_protocol(
    pi: BlackBoxProtocol,
    k: int,
    rng: np.random.Generator,
    delta: float = 0.05,
    verify: bool = True,
    retry_cap: int = RETRY_CAP,
) -> DerandomizedProtocol:
    """Pick a k x k grid for pi; with ``verify`` redraw until every outcome gap is < delta.

    Raises :class:`ConvergenceError` (carrying the best gap seen) if no grid
    passes within ``retry_cap`` draws.
    """
    om = _outcome_matrix(pi)
    RA, RB = 1 << pi.ra_bits, 1 << pi.rb_bits
    original = outcome_tables(pi, outcomes_matrix=om)
    best = None
    history = []
    for attempt in range(1, retry_cap + 1):
        grid = draw_grid(RA, RB, k, rng)
        derived = outcome_tables(pi, grid, outcomes_matrix=om)
        gap = float(np.abs(derived.probabilities - original.probabilities).max())
        history.append(gap)
        if best is None or gap < best[0]:
            best = (gap, grid, derived)
        if not verify or gap < delta:
            return DerandomizedProtocol(pi, grid, delta, gap, attempt, "exact", original, derived, history)
    raise ConvergenceError(
        f"no grid with all gaps < {delta} in {retry_cap} draws (best {best[0]:.4g})",
        residual=best[0],
        estimate=best[0],
    )


def choose_k(n_outcome_bits: int, n_input_bits: int, eps2: float) -> tuple[float, int]:
    """delta = eps2 / 2^n_outcome_bits and the least k with 4 e^(-delta^2 k/2) 2^(in+out) < 1."""
    if eps2 <= 0:
        raise UsageError("eps2 must be positive")
    delta = eps2 / 2.0**n_outcome_bits
    # 4 e^{-d^2 k / 2} 2^B < 1  <=>  k > 2 (ln 4 + B ln 2) / d^2
    lim = 2.0 * (math.log(4.0) + (n_input_bits + n_outcome_bits) * math.log(2.0)) / delta**2
    k = math.floor(lim) + 1
    while k > 1 and 4.0 * math.exp(-delta * delta * (k - 1) / 2.0) * 2.0 ** (n_input_bits + n_outcome_bits) < 1:
        k -= 1
    return delta, k


def _parity(v: int) -> int:
    return v.bit_count() & 1


def parity_toy_protocol() -> BlackBoxProtocol:
    """2-bit inputs, 4-bit private randomness per party, one message.

    Alice sends ``t = x_0 xor parity(r_A)``; she outputs ``z1 = parity(r_A)``,
    Bob outputs ``z2 = t xor y_0 xor parity(r_B)``.
    """

    def fn(x, y, ra, rb):
        t = (x & 1) ^ _parity(ra)
        return (_parity(ra), t ^ (y & 1) ^ _parity(rb), t)

    return BlackBoxProtocol("parity-toy", fn, 2, 2, 4, 4)


def ska_validity_transfer(
    q: int = 16,
    slack_s: int = 1,
    s_bits: int = 10,
    k: int = 256,
    n_edges: int = 32,
    eps2: float = 0.05,
    seed: int = 0,
) -> dict:
    """Success of the point-line key agreement before and after grid sampling.

    Alice's hash seeds are derived from an ``s_bits``-bit private string.
    The original success rate averages over all ``2^s_bits`` strings; the
    derandomized one over a ``k``-entry list of them.  Both use the same
    sampled edges, and each success indicator is computed exactly.
    """
    from .graphs import Side, point_line, sample_edges
    from .rng import stream
    from .ska import ProtocolConfig, draw_seeds

    if s_bits > 16:
        raise ResourceBudgetError("exhaustive audit over Alice's randomness needs s_bits <= 16")
    g = point_line(q)
    cfg = ProtocolConfig(g, slack_s=slack_s)
    lefts, rights = sample_edges(g, stream(seed, "newman-ska", "edges"), n_edges)
    cand = g.neighbor_block(Side.RIGHT, rights).astype(np.uint64)
    xs = np.asarray(lefts, dtype=np.uint64)
    R = 1 << s_bits
    success = np.zeros((R, n_edges), dtype=bool)
    for r in range(R):
        seeds = draw_seeds(stream(seed, "newman-ska", "alice", r), cfg.message_bits, cfg.key_bits, cfg.in_bits)
        v = seeds.h1.apply(xs)
        hits = np.count_nonzero(seeds.h1.apply(cand) == v[:, None], axis=1)
        # x itself is always among the hits, so one hit means a unique, correct decode
        success[r] = hits == 1
    p_orig = float(success.mean())
    grid = stream(seed, "newman-ska", "grid").integers(0, R, k)
    p_new = float(success[grid].mean())
    sigma = math.sqrt(max(p_orig * (1 - p_orig), 1e-12) / n_edges)
    return {
        "q": q,
        "slack_s": slack_s,
        "s_bits": s_bits,
        "k": k,
        "random_bits_after": math.ceil(math.log2(k)),
        "edges": n_edges,
        "eps2": eps2,
        "success_original": p_orig,
        "success_derandomized": p_new,
        "sigma": sigma,
        "holds": p_new >= p_orig - eps2 - 3 * sigma,
    }

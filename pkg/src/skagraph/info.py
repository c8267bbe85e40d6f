"""Computable stand-ins for complexity-theoretic quantities.

Kolmogorov complexity is not computable, so every "complexity" reported here
is a log-cardinality proxy: ``C(x)`` becomes ``log2 |L|``, ``C(x|y)`` becomes
``log2 D`` and so on.  Reports label these values as proxies.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import UsageError
from .graphs import GraphSpec

__all__ = [
    "binary_entropy",
    "solve_entropy",
    "log_binomial",
    "LogBinomial",
    "binom_slack_allowance",
    "ComplexityProfileProxy",
    "profile_proxy",
    "hamming_profile_proxy",
    "hoeffding_band",
    "PrefixReport",
    "prefix_distance_check",
    "sample_fixed_distance_pair",
    "prefix_concentration",
]


def binary_entropy(t: float) -> float:
    """h(t) = -t log2 t - (1-t) log2 (1-t), with h(0) = h(1) = 0."""
    if not 0.0 <= t <= 1.0:
        raise UsageError(f"binary entropy needs t in [0, 1], got {t}")
    if t == 0.0 or t == 1.0:
        return 0.0
    return -t * math.log2(t) - (1.0 - t) * math.log2(1.0 - t)


def solve_entropy(target: float, tol: float = 1e-12) -> float:
    """The unique theta in (0, 1/2] with h(theta) = target, by bisection."""
    if not 0.0 < target <= 1.0:
        raise UsageError(f"target entropy must lie in (0, 1], got {target}")
    lo, hi = 0.0, 0.5
    # h is strictly increasing on [0, 1/2]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class LogBinomial:
    bits: float
    entropy_estimate: float
    deviation: float


def binom_slack_allowance(m: int) -> float:
    """Allowed |log2 C(m, w) - m h(w/m)| for m >= 8."""
    return 0.75 * math.log2(m) + 3.0


def log_binomial(m: int, w: int) -> LogBinomial:
    """Exact log2 C(m, w) with its deviation from the entropy estimate m h(w/m)."""
    if not 0 <= w <= m:
        raise UsageError(f"need 0 <= w <= m, got m={m}, w={w}")
    bits = math.log2(math.comb(m, w))
    est = m * binary_entropy(w / m) if m else 0.0
    return LogBinomial(bits, est, bits - est)


def log_binomial_arr(m, w) -> np.ndarray:
    """Vectorized log2 C(m, w) through log-gamma (abs. error ~1e-11 for m <= 4096)."""
    from scipy.special import gammaln

    m = np.asarray(m, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    return (gammaln(m + 1) - gammaln(w + 1) - gammaln(m - w + 1)) / math.log(2)


@dataclass(frozen=True)
class ComplexityProfileProxy:
    """Log-cardinality profile of a regular bipartite graph (all values in bits)."""

    c_x: float
    c_y: float
    c_xy: float
    c_x_given_y: float
    c_y_given_x: float
    mutual: float
    proxy: bool = True

    def as_dict(self) -> dict:
        return asdict(self)


def profile_proxy(g: GraphSpec) -> ComplexityProfileProxy:
    log_n = math.log2(g.N)
    log_d = math.log2(g.degree)
    # |E| = N * D exactly by regularity, so the chain rule holds with no slack
    return ComplexityProfileProxy(
        c_x=log_n,
        c_y=log_n,
        c_xy=log_n + log_d,
        c_x_given_y=log_d,
        c_y_given_x=log_d,
        mutual=log_n - log_d,
    )


def hamming_profile_proxy(n_bits: int, w: int) -> ComplexityProfileProxy:
    """Profile of the distance-w Hamming graph from counts alone (any n, no vertex indexing)."""
    if not 0 < w < n_bits:
        raise UsageError(f"need 0 < w < n, got w={w}, n={n_bits}")
    log_d = math.log2(math.comb(n_bits, w))
    return ComplexityProfileProxy(
        c_x=float(n_bits),
        c_y=float(n_bits),
        c_xy=n_bits + log_d,
        c_x_given_y=log_d,
        c_y_given_x=log_d,
        mutual=n_bits - log_d,
    )


def hoeffding_band(m: int, eps: float) -> float:
    """Half-width sqrt(m ln(2/eps) / 2) of the two-sided concentration band."""
    return math.sqrt(m * math.log(2.0 / eps) / 2.0)


@dataclass(frozen=True)
class PrefixReport:
    n: int
    w: int
    m: int
    prefix_distance: int
    expected: float
    deviation: float
    band: float
    typical: bool
    trials: int = 0
    pass_rate: float | None = None


def _bits(v) -> np.ndarray:
    return np.asarray(v, dtype=np.uint8).reshape(-1)


def prefix_distance_check(
    x,
    y,
    m: int,
    eps: float = 0.01,
    trials: int = 0,
    rng: np.random.Generator | None = None,
) -> PrefixReport:
    """Distance between the m-bit prefixes of x and y against its expectation.

    ``x`` and ``y`` are 0/1 arrays of equal length ``n``.  With ``trials > 0``
    the report also carries the fraction of uniformly random pairs at the
    same full distance whose prefix distance lands inside the band.
    """
    x, y = _bits(x), _bits(y)
    if x.size != y.size:
        raise UsageError("x and y must have equal length")
    n = x.size
    if not 0 <= m <= n:
        raise UsageError(f"prefix length {m} outside [0, {n}]")
    w = int(np.count_nonzero(x != y))
    d = int(np.count_nonzero(x[:m] != y[:m]))
    expected = w * m / n if n else 0.0
    band = hoeffding_band(m, eps)
    pass_rate = None
    if trials:
        if rng is None:
            raise UsageError("pass-rate estimation needs an rng")
        devs = prefix_concentration(n, w, m, trials, rng)
        pass_rate = float(np.mean(devs <= band))
    return PrefixReport(n, w, m, d, expected, abs(d - expected), band, abs(d - expected) <= band, trials, pass_rate)


def sample_fixed_distance_pair(n: int, w: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    x = rng.integers(0, 2, size=n, dtype=np.uint8)
    y = x.copy()
    flip = rng.choice(n, size=w, replace=False)
    y[flip] ^= 1
    return x, y


def prefix_concentration(n: int, w: int, m: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """|prefix distance - w m / n| over random pairs at distance w.

    The flipped positions of a uniform pair form a uniform w-subset, so only
    the positions are drawn (a random permutation per trial).
    """
    keys = rng.random((trials, n))
    flipped = np.argpartition(keys, w - 1, axis=1)[:, :w] if w else np.empty((trials, 0), dtype=np.int64)
    d = np.count_nonzero(flipped < m, axis=1)
    return np.abs(d - w * m / n)

"""One-message secret key agreement on graph-correlated inputs.

Alice holds the left end ``x`` of a uniformly random edge and Bob the right
end ``y``.  Alice draws two affine GF(2) hashes (her private randomness) and
sends, in the clear, ``seed1 || seed2 || v`` with ``v = H1(x)`` of
``ceil(log2 D) + slack`` bits.  Bob keeps the neighbors ``x'`` of ``y`` with
``H1(x') = v``; on a unique survivor both output ``H2(x)`` as the key.

``seed2`` is redrawn until the stacked matrix ``[M1; M2]`` has rank
``rank(M1) + key_len``.  With that condition ``H2`` restricted to any coset
``{x : H1(x) = v}`` is onto, so for N a power of two the key is exactly
uniform given the transcript.

The Hamming-prefix variant (:func:`hamming_prefix_protocol`) works on the
``m``-bit prefixes of a pair of strings at a fixed distance and decodes by a
meet-in-the-middle syndrome search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation, ResourceBudgetError, UsageError
from .graphs import Edge, GraphSpec, Side, sample_edge
from .hashing import AffineHash, gf2_rank, syndrome_table, weight_masks
from .info import hoeffding_band
from .rng import stream

__all__ = [
    "ProtocolConfig",
    "Seeds",
    "Transcript",
    "AgreementOutcome",
    "SecrecyReport",
    "draw_seeds",
    "run_agreement",
    "eavesdrop_audit",
    "batch_stats",
    "HammingPrefixConfig",
    "hamming_prefix_protocol",
    "hamming_batch",
    "mitm_decode",
    "brute_force_decode",
]

SEED_RETRY_CAP = 64
AUDIT_VERTEX_BUDGET = 1 << 26


@dataclass(frozen=True)
class ProtocolConfig:
    graph: GraphSpec
    slack_s: int = 2
    key_len: int | None = None

    def __post_init__(self):
        if self.slack_s < 1:
            raise UsageError("slack_s must be >= 1")
        if self.in_bits > 64:
            raise UsageError("vertex indices must fit in 64 bits")
        if self.key_len is not None and self.key_len < 0:
            raise UsageError("key_len must be >= 0")

    @property
    def in_bits(self) -> int:
        return max(1, math.ceil(math.log2(self.graph.N)))

    @property
    def message_bits(self) -> int:
        return math.ceil(math.log2(self.graph.degree)) + self.slack_s

    @property
    def key_bits(self) -> int:
        if self.key_len is not None:
            return self.key_len
        g = self.graph
        return max(0, math.floor(math.log2(g.N) - math.log2(g.degree) - 2 * self.slack_s))

    def as_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "slack_s": self.slack_s,
            "key_len": self.key_bits,
            "message_bits": self.message_bits,
            "in_bits": self.in_bits,
        }


@dataclass(frozen=True)
class Seeds:
    h1: AffineHash
    h2: AffineHash

    @property
    def well_formed(self) -> bool:
        """H2 adds key_len rows independent of H1 (the key is then uniform on every coset of H1)."""
        return gf2_rank(self.h1.rows + self.h2.rows) == gf2_rank(self.h1.rows) + self.h2.out_bits


def draw_seeds(rng: np.random.Generator, message_bits: int, key_bits: int, in_bits: int) -> Seeds:
    """Uniform H1; H2 redrawn until it is independent of H1 (see module docstring)."""
    h1 = AffineHash.random(rng, message_bits, in_bits)
    r1 = gf2_rank(h1.rows)
    if r1 + key_bits > in_bits:
        # no independent completion exists; take H2 as drawn
        return Seeds(h1, AffineHash.random(rng, key_bits, in_bits))
    for _ in range(SEED_RETRY_CAP):
        h2 = AffineHash.random(rng, key_bits, in_bits)
        if gf2_rank(h1.rows + h2.rows) == r1 + key_bits:
            return Seeds(h1, h2)
    return Seeds(h1, h2)


@dataclass(frozen=True)
class Transcript:
    """Messages in order; bit layout ``[seed1][seed2][v]`` for the single Alice message."""

    messages: tuple[tuple[str, str, str], ...]  # (sender, part label, bits)

    @property
    def total_bits(self) -> int:
        return sum(len(b) for _, _, b in self.messages)

    @property
    def payload_bits(self) -> int:
        """Bits that depend on the input (everything except the hash seeds)."""
        return sum(len(b) for _, lab, b in self.messages if not lab.startswith("seed"))

    @property
    def seed_bits(self) -> int:
        return self.total_bits - self.payload_bits

    def header(self) -> dict:
        return {lab: len(b) for _, lab, b in self.messages}

    def bits(self) -> str:
        return "".join(b for _, _, b in self.messages)


def _to_bits(v: int, width: int) -> str:
    return "".join(str((v >> i) & 1) for i in range(width))


def _transcript(seeds: Seeds, v: int) -> Transcript:
    return Transcript(
        (
            ("Alice", "seed1", seeds.h1.to_bits()),
            ("Alice", "seed2", seeds.h2.to_bits()),
            ("Alice", "v", _to_bits(v, seeds.h1.out_bits)),
        )
    )


@dataclass
class AgreementOutcome:
    key_alice: str | None
    key_bob: str | None
    transcript: Transcript
    decode_status: str  # "unique" | "ambiguous" | "no-candidate" | "mismatch"
    candidates: int
    seeds: Seeds
    v: int
    key_len: int
    candidate_set_size: int | None = None

    @property
    def success(self) -> bool:
        return self.decode_status == "unique" and self.key_alice == self.key_bob


def run_agreement(
    cfg: ProtocolConfig, edge: Edge, rng: np.random.Generator | None = None, seeds: Seeds | None = None
) -> AgreementOutcome:
    """One protocol run on ``edge``; ``seeds`` overrides Alice's random draw."""
    g = cfg.graph
    x, y = edge.left.index, edge.right.index
    if seeds is None:
        if rng is None:
            raise UsageError("run_agreement needs an rng or explicit seeds")
        seeds = draw_seeds(rng, cfg.message_bits, cfg.key_bits, cfg.in_bits)
    v = seeds.h1(x)
    # Bob: all neighbors of y consistent with v
    cand = g.neighbor_block(Side.RIGHT, [y])[0]
    hits = cand[seeds.h1.apply(cand) == np.uint64(v)]
    if x not in hits:
        raise InvariantViolation(f"edge precondition broken: {x} is not a neighbor of {y}")
    key_alice = _to_bits(seeds.h2(x), cfg.key_bits)
    if hits.size == 1:
        key_bob = _to_bits(seeds.h2(int(hits[0])), cfg.key_bits)
        if key_bob != key_alice:
            raise InvariantViolation("unique decode produced different keys")
        status = "unique"
    else:
        key_alice = key_bob = None
        status = "ambiguous"
    return AgreementOutcome(key_alice, key_bob, _transcript(seeds, v), status, int(hits.size), seeds, v, cfg.key_bits)


@dataclass
class SecrecyReport:
    distance: float
    candidate_set_size: int
    key_len: int
    slack_s: int
    bound: float
    condition: bool
    seed_quality_ok: bool

    @property
    def within_bound(self) -> bool:
        return self.distance <= self.bound + 1e-12

    def as_dict(self) -> dict:
        return {
            "distance": self.distance,
            "candidate_set_size": self.candidate_set_size,
            "key_len": self.key_len,
            "bound": self.bound,
            "condition": self.condition,
            "within_bound": self.within_bound,
            "seed_quality_ok": self.seed_quality_ok,
        }


def _statistical_distance(keys: np.ndarray, key_len: int) -> float:
    if key_len == 0:
        return 0.0
    counts = np.bincount(keys.astype(np.int64), minlength=1 << key_len)
    p = counts / counts.sum()
    return 0.5 * float(np.abs(p - 1.0 / (1 << key_len)).sum())


def eavesdrop_audit(cfg: ProtocolConfig, outcome: AgreementOutcome) -> SecrecyReport:
    """Exact statistical distance of the key from uniform, given the transcript.

    The eavesdropper knows the graph and both seeds.  Under a uniform edge,
    ``x`` is uniform on the left side, so given ``v`` it is uniform on
    ``X_t = {x : H1(x) = v}``; the key distribution is ``H2`` pushed forward
    from ``X_t``.  Everything is enumerated.
    """
    g = cfg.graph
    if g.N > AUDIT_VERTEX_BUDGET or g.num_edges > AUDIT_VERTEX_BUDGET:
        raise ResourceBudgetError(f"exhaustive audit needs N*D <= 2^26 (N*D = {g.num_edges})")
    xs = np.arange(g.N, dtype=np.uint64)
    consistent = xs[outcome.seeds.h1.apply(xs) == np.uint64(outcome.v)]
    keys = outcome.seeds.h2.apply(consistent)
    size = int(consistent.size)
    dist = _statistical_distance(keys, cfg.key_bits)
    outcome.candidate_set_size = size
    return SecrecyReport(
        distance=dist,
        candidate_set_size=size,
        key_len=cfg.key_bits,
        slack_s=cfg.slack_s,
        bound=2.0 ** (-cfg.slack_s / 2),
        condition=size >= 2 ** (cfg.key_bits + cfg.slack_s),
        seed_quality_ok=outcome.seeds.well_formed,
    )


def batch_stats(
    cfg: ProtocolConfig, trials: int, seed: int = 0, audit: bool = False, rows: list | None = None
) -> dict:
    """Run ``trials`` independent agreements; trial ``i`` uses stream (seed, "ska", i).

    ``rows``, when given, receives one dict per trial.
    """
    if trials < 1:
        raise UsageError("trials must be >= 1")
    g = cfg.graph
    n_ok = n_amb = 0
    payload = seed_bits = key_bits = 0
    max_dist, n_cond, n_within, n_cond_within = 0.0, 0, 0, 0
    for i in range(trials):
        rng = stream(seed, "ska", i)
        out = run_agreement(cfg, sample_edge(g, rng), rng)
        payload += out.transcript.payload_bits
        seed_bits += out.transcript.seed_bits
        if out.success:
            n_ok += 1
            key_bits += out.key_len
        elif out.decode_status == "ambiguous":
            n_amb += 1
        row = {
            "trial": i,
            "status": out.decode_status,
            "candidates": out.candidates,
            "payload_bits": out.transcript.payload_bits,
            "seed_bits": out.transcript.seed_bits,
            "key_bits": out.key_len if out.success else 0,
        }
        if audit:
            rep = eavesdrop_audit(cfg, out)
            max_dist = max(max_dist, rep.distance)
            n_cond += rep.condition
            n_within += rep.within_bound
            n_cond_within += rep.condition and rep.within_bound
            row.update(distance=rep.distance, candidate_set_size=rep.candidate_set_size, condition=rep.condition)
        if rows is not None:
            rows.append(row)
    summary = {
        "trials": trials,
        "success_rate": n_ok / trials,
        "ambiguous_rate": n_amb / trials,
        "failure_bound": 2.0 ** (-cfg.slack_s),
        "mean_payload_bits": payload / trials,
        "mean_seed_bits": seed_bits / trials,
        "mean_key_bits": key_bits / trials,
        "key_len": cfg.key_bits,
        "message_bits": cfg.message_bits,
        "log2_degree": math.log2(g.degree),
    }
    if audit:
        summary.update(
            max_distance=max_dist,
            secrecy_bound=2.0 ** (-cfg.slack_s / 2),
            condition_rate=n_cond / trials,
            # the secrecy claim only covers trials meeting the candidate-set condition
            secrecy_violations=n_cond - n_cond_within,
        )
    return summary


# --- Hamming prefix protocol ---------------------------------------------------


@dataclass(frozen=True)
class HammingPrefixConfig:
    """Parameters of the prefix protocol.

    ``band`` is the half-width (in bit flips) of the distance shell Bob
    searches around ``w m / n``; the string ``"hoeffding"`` selects
    ``sqrt(m ln(2/eps) / 2)``.
    """

    n: int
    w: int
    delta: float
    slack_s: int = 1
    band: float | str = 0.5
    eps: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise UsageError("delta must lie in [0, 1]")
        if not 0 <= self.w <= self.n:
            raise UsageError("need 0 <= w <= n")
        if self.slack_s < 0:
            raise UsageError("slack_s must be >= 0")
        if self.m > 64:
            raise UsageError("prefixes longer than 64 bits are not supported")

    @property
    def m(self) -> int:
        return int(round(self.delta * self.n))

    @property
    def center(self) -> float:
        return self.w * self.m / self.n if self.n else 0.0

    @property
    def half_width(self) -> float:
        if self.band == "hoeffding":
            return hoeffding_band(self.m, self.eps)
        return float(self.band)

    @property
    def shell(self) -> tuple[int, ...]:
        m, c, h = self.m, self.center, self.half_width
        ds = [d for d in range(m + 1) if abs(d - c) <= h + 1e-12]
        return tuple(ds) if ds else (min(m, int(round(c))),)

    @property
    def shell_size(self) -> int:
        return sum(math.comb(self.m, d) for d in self.shell)

    @property
    def message_bits(self) -> int:
        if self.m == 0:
            return 0
        return min(self.m, math.ceil(math.log2(self.shell_size)) + self.slack_s)

    @property
    def key_bits(self) -> int:
        return max(0, self.m - self.message_bits - self.slack_s)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "w": self.w,
            "delta": self.delta,
            "m": self.m,
            "slack_s": self.slack_s,
            "band": self.band,
            "shell": list(self.shell),
            "shell_size": self.shell_size,
            "message_bits": self.message_bits,
            "key_len": self.key_bits,
        }


def _prefix_int(bits: np.ndarray, m: int) -> int:
    v = 0
    for i in range(m):
        v |= int(bits[i]) << i
    return v


def brute_force_decode(h1: AffineHash, y_hat: int, v: int, m: int, shell) -> np.ndarray:
    """All x' in the shell around ``y_hat`` with H1(x') = v, by enumeration."""
    cands = np.concatenate([weight_masks(m, d) for d in shell]) ^ np.uint64(y_hat)
    return np.sort(cands[h1.apply(cands) == np.uint64(v)])


def mitm_decode(h1: AffineHash, y_hat: int, v: int, m: int, shell) -> np.ndarray:
    """Same result as :func:`brute_force_decode` by meet-in-the-middle.

    Writes x' = y_hat ^ e and solves M1 e = v ^ H1(y_hat) for e of weight in
    ``shell``; e splits into a low half (``lo`` bits) and a high half, whose
    syndromes are matched by sorting.
    """
    target = np.uint64(v ^ h1(y_hat))
    cols = h1.columns()
    lo = m // 2
    hi = m - lo
    syn_lo = syndrome_table(cols[:lo])
    syn_hi = syndrome_table(cols[lo:])
    found = []
    for d in shell:
        for a in range(max(0, d - hi), min(d, lo) + 1):
            el = weight_masks(lo, a)
            eh = weight_masks(hi, d - a)
            sl = syn_lo(el)
            sh = syn_hi(eh) ^ target
            # sort the smaller side and query it with the larger one
            if sl.size <= sh.size:
                small, big, small_m, big_m, small_is_lo = sl, sh, el, eh, True
            else:
                small, big, small_m, big_m, small_is_lo = sh, sl, eh, el, False
            order = np.argsort(small, kind="stable")
            ss = small[order]
            left = np.searchsorted(ss, big, side="left")
            right = np.searchsorted(ss, big, side="right")
            hit = np.nonzero(right > left)[0]
            for bi in hit:
                for si in order[left[bi] : right[bi]]:
                    e_lo = small_m[si] if small_is_lo else big_m[bi]
                    e_hi = big_m[bi] if small_is_lo else small_m[si]
                    found.append(int(e_lo) | (int(e_hi) << lo))
    return np.sort(np.array([f ^ y_hat for f in found], dtype=np.uint64))


def hamming_prefix_protocol(x, y, cfg: HammingPrefixConfig, rng: np.random.Generator) -> AgreementOutcome:
    """Key agreement on the m-bit prefixes of ``x`` and ``y`` (0/1 arrays).

    ``decode_status`` is ``"mismatch"`` when Bob decodes a unique candidate
    that is not Alice's prefix (possible only when the true prefix distance
    falls outside the shell); the simulator knows the ground truth, Bob does
    not.
    """
    x = np.asarray(x, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    if x.size != cfg.n or y.size != cfg.n:
        raise UsageError(f"inputs must have length n={cfg.n}")
    m = cfg.m
    x_hat, y_hat = _prefix_int(x, m), _prefix_int(y, m)
    seeds = draw_seeds(rng, cfg.message_bits, cfg.key_bits, max(m, 1))
    v = seeds.h1(x_hat)
    tr = _transcript(seeds, v)
    if m == 0:
        return AgreementOutcome("", "", tr, "unique", 1, seeds, v, 0)
    hits = mitm_decode(seeds.h1, y_hat, v, m, cfg.shell)
    key_alice = _to_bits(seeds.h2(x_hat), cfg.key_bits)
    if hits.size == 0:
        return AgreementOutcome(None, None, tr, "no-candidate", 0, seeds, v, cfg.key_bits)
    if hits.size > 1:
        return AgreementOutcome(None, None, tr, "ambiguous", int(hits.size), seeds, v, cfg.key_bits)
    key_bob = _to_bits(seeds.h2(int(hits[0])), cfg.key_bits)
    if int(hits[0]) == x_hat:
        if key_bob != key_alice:
            raise InvariantViolation("unique decode produced different keys")
        return AgreementOutcome(key_alice, key_bob, tr, "unique", 1, seeds, v, cfg.key_bits)
    return AgreementOutcome(key_alice, key_bob, tr, "mismatch", 1, seeds, v, cfg.key_bits)


def hamming_batch(cfg: HammingPrefixConfig, trials: int, seed: int = 0, rows: list | None = None) -> dict:
    """Independent runs on uniform pairs at distance ``cfg.w``."""
    from .info import sample_fixed_distance_pair

    if trials < 1:
        raise UsageError("trials must be >= 1")
    counts = {"unique": 0, "ambiguous": 0, "no-candidate": 0, "mismatch": 0}
    in_shell = 0
    for i in range(trials):
        rng = stream(seed, "ska-hamming", i)
        x, y = sample_fixed_distance_pair(cfg.n, cfg.w, rng)
        out = hamming_prefix_protocol(x, y, cfg, rng)
        counts[out.decode_status] += 1
        d = int(np.count_nonzero(x[: cfg.m] != y[: cfg.m]))
        in_shell += d in cfg.shell or cfg.m == 0
        if rows is not None:
            rows.append(
                {
                    "trial": i,
                    "status": out.decode_status,
                    "prefix_distance": d,
                    "payload_bits": out.transcript.payload_bits,
                    "seed_bits": out.transcript.seed_bits,
                    "key_bits": out.key_len if out.success else 0,
                }
            )
    target = cfg.delta * cfg.n / 2
    return {
        "trials": trials,
        "success_rate": counts["unique"] / trials,
        "status_counts": counts,
        "in_shell_rate": in_shell / trials,
        "key_len": cfg.key_bits,
        "message_bits": cfg.message_bits,
        "seed_bits": (cfg.message_bits + cfg.key_bits) * (cfg.m + 1) if cfg.m else 0,
        "target_bits": target,
        "key_rel_error": abs(cfg.key_bits - target) / target if target else 0.0,
        "comm_rel_error": abs(cfg.message_bits - target) / target if target else 0.0,
        **cfg.as_dict(),
    }

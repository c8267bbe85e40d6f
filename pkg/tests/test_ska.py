import math

import numpy as np
import pytest

from skagraph.errors import InvariantViolation, ResourceBudgetError, UsageError
from skagraph.graphs import Edge, Side, VertexId, euclidean, hamming, point_line, sample_edge, tensor_with_complete
from skagraph.hashing import AffineHash
from skagraph.info import sample_fixed_distance_pair
from skagraph.rng import stream
from skagraph.ska import (
    HammingPrefixConfig,
    ProtocolConfig,
    Seeds,
    batch_stats,
    brute_force_decode,
    draw_seeds,
    eavesdrop_audit,
    hamming_batch,
    hamming_prefix_protocol,
    mitm_decode,
    run_agreement,
)

PL256 = point_line(256)


def test_config_defaults():
    cfg = ProtocolConfig(PL256, slack_s=2)
    assert (cfg.message_bits, cfg.key_bits, cfg.in_bits) == (10, 4, 16)
    assert ProtocolConfig(PL256, slack_s=4).key_bits == 0
    assert cfg.key_bits + math.log2(PL256.degree) + 2 * cfg.slack_s <= math.log2(PL256.N) + 1
    with pytest.raises(UsageError):
        ProtocolConfig(PL256, slack_s=0)


@pytest.mark.parametrize("g", [point_line(16), euclidean(13), hamming(12, 3), tensor_with_complete(point_line(8), 2)], ids=lambda g: g.describe())
def test_completeness_and_payload_ceiling(g):
    cfg = ProtocolConfig(g, slack_s=2, key_len=2)
    for i in range(200):
        rng = stream(9, "t", i)
        out = run_agreement(cfg, sample_edge(g, rng), rng)
        assert out.transcript.payload_bits <= math.ceil(math.log2(g.degree)) + cfg.slack_s
        if out.decode_status == "unique":
            assert out.key_alice == out.key_bob and len(out.key_alice) == 2
        else:
            assert out.decode_status == "ambiguous" and out.key_alice is None


def test_zero_key_len_still_needs_unique_decode():
    cfg = ProtocolConfig(PL256, slack_s=4)
    rng = stream(0, "zero")
    out = run_agreement(cfg, sample_edge(PL256, rng), rng)
    if out.success:
        assert out.key_alice == out.key_bob == ""
    assert eavesdrop_audit(cfg, out).distance == 0.0


def test_replay_is_identical():
    cfg = ProtocolConfig(PL256)
    e = sample_edge(PL256, stream(1, "e"))
    a = run_agreement(cfg, e, stream(1, "r"))
    b = run_agreement(cfg, e, stream(1, "r"))
    assert a.transcript == b.transcript and a.key_alice == b.key_alice
    c = run_agreement(cfg, e, seeds=a.seeds)
    assert c.transcript == a.transcript


def test_transcript_layout():
    cfg = ProtocolConfig(PL256)
    out = run_agreement(cfg, sample_edge(PL256, stream(2, "e")), stream(2, "r"))
    hdr = out.transcript.header()
    assert list(hdr) == ["seed1", "seed2", "v"]
    assert hdr == {"seed1": 10 * 17, "seed2": 4 * 17, "v": 10}
    assert out.transcript.total_bits == len(out.transcript.bits()) == sum(hdr.values())
    bits = out.transcript.bits()
    assert AffineHash.from_bits(bits[:170], 10, 16) == out.seeds.h1


def test_non_edge_is_rejected():
    cfg = ProtocolConfig(point_line(5))
    g = cfg.graph
    y = next(v for v in range(g.N) if v not in set(g.neighbor_block(Side.LEFT, [0])[0].tolist()))
    with pytest.raises(InvariantViolation):
        run_agreement(cfg, Edge(VertexId(Side.LEFT, 0), VertexId(Side.RIGHT, y)), stream(0, "x"))


def test_seed_rejection_gives_independent_rows():
    rng = np.random.default_rng(0)
    for _ in range(200):
        s = draw_seeds(rng, 10, 4, 16)
        assert s.well_formed or not Seeds(s.h1, s.h1).well_formed


def test_audit_matches_brute_force_and_bound():
    cfg = ProtocolConfig(PL256, slack_s=2)
    for i in range(30):
        rng = stream(4, "audit", i)
        out = run_agreement(cfg, sample_edge(PL256, rng), rng)
        rep = eavesdrop_audit(cfg, out)
        # independent oracle: python loop over all points
        hist = [0] * 16
        size = 0
        for x in range(PL256.N):
            if out.seeds.h1(x) == out.v:
                hist[out.seeds.h2(x)] += 1
                size += 1
        sd = 0.5 * sum(abs(c / size - 1 / 16) for c in hist)
        assert rep.candidate_set_size == size
        assert math.isclose(rep.distance, sd, abs_tol=1e-12)
        assert rep.condition and rep.within_bound and rep.seed_quality_ok


def test_adversarial_constant_seed_is_flagged():
    cfg = ProtocolConfig(PL256, slack_s=2)
    rng = stream(5, "adv")
    e = sample_edge(PL256, rng)
    good = draw_seeds(rng, cfg.message_bits, cfg.key_bits, cfg.in_bits)
    bad = Seeds(AffineHash.constant(cfg.message_bits, 16), AffineHash.constant(cfg.key_bits, 16))
    out = run_agreement(cfg, e, seeds=bad)
    rep = eavesdrop_audit(cfg, out)
    assert rep.distance == pytest.approx(1 - 2**-4)
    assert not rep.seed_quality_ok and not rep.within_bound
    assert out.decode_status == "ambiguous"
    assert eavesdrop_audit(cfg, run_agreement(cfg, e, seeds=good)).seed_quality_ok


def test_audit_budget():
    cfg = ProtocolConfig(point_line(1 << 14), slack_s=2)
    rng = stream(0, "big")
    out = run_agreement(cfg, sample_edge(cfg.graph, rng), rng)
    with pytest.raises(ResourceBudgetError):
        eavesdrop_audit(cfg, out)


def test_batch_stats_reduces_to_single_run():
    cfg = ProtocolConfig(point_line(16), slack_s=1)
    s = batch_stats(cfg, 1, seed=3)
    rng = stream(3, "ska", 0)
    out = run_agreement(cfg, sample_edge(cfg.graph, rng), rng)
    assert s["success_rate"] == float(out.success)
    assert batch_stats(cfg, 50, seed=8) == batch_stats(cfg, 50, seed=8)


def test_batch_payload_window():
    cfg = ProtocolConfig(point_line(64), slack_s=2)
    s = batch_stats(cfg, 300, seed=1, audit=True)
    ld = math.log2(64)
    assert ld <= s["mean_payload_bits"] <= ld + cfg.slack_s + 1
    assert s["secrecy_violations"] == 0


# --- Hamming prefix protocol ---------------------------------------------


def test_prefix_config_examples():
    cfg = HammingPrefixConfig(64, 7, 0.5, slack_s=2)
    assert cfg.m == 32 and cfg.shell == (3, 4)
    assert cfg.shell_size == math.comb(32, 3) + math.comb(32, 4)
    assert cfg.key_bits >= 12
    assert HammingPrefixConfig(64, 7, 0.5, slack_s=1).key_bits >= 12


def test_hoeffding_band_option():
    cfg = HammingPrefixConfig(64, 7, 0.5, band="hoeffding")
    assert cfg.half_width == pytest.approx(math.sqrt(32 * math.log(200) / 2))
    assert cfg.key_bits <= 1  # the wide band swallows nearly the whole prefix at this n


def test_mitm_matches_brute_force():
    rng = np.random.default_rng(6)
    for m, shell in [(10, (1, 2)), (17, (2, 3)), (24, (3,)), (1, (0, 1))]:
        for _ in range(20):
            h = AffineHash.random(rng, min(m, 5), m)
            y = int(rng.integers(0, 1 << m))
            v = int(rng.integers(0, 1 << h.out_bits))
            assert np.array_equal(mitm_decode(h, y, v, m, shell), brute_force_decode(h, y, v, m, shell))


def test_delta_zero_gives_empty_key():
    x, y = sample_fixed_distance_pair(64, 7, np.random.default_rng(0))
    out = hamming_prefix_protocol(x, y, HammingPrefixConfig(64, 7, 0.0), stream(0, "d0"))
    assert out.key_alice == out.key_bob == "" and out.success


def test_equal_strings_decode_uniquely():
    x = np.random.default_rng(1).integers(0, 2, 40).astype(np.uint8)
    cfg = HammingPrefixConfig(40, 0, 0.5, slack_s=1)
    assert cfg.shell == (0,)
    for i in range(20):
        out = hamming_prefix_protocol(x, x.copy(), cfg, stream(i, "eq"))
        assert out.success
    assert cfg.key_bits >= cfg.m - 2 * cfg.slack_s - 1


def test_prefix_statuses_follow_ground_truth():
    cfg = HammingPrefixConfig(48, 6, 0.5, slack_s=1)
    rows = []
    s = hamming_batch(cfg, 200, seed=2, rows=rows)
    for r in rows:
        if r["prefix_distance"] not in cfg.shell:
            # Bob can never find the true prefix outside his shell
            assert r["status"] != "unique"
    assert s["success_rate"] > 0
    assert sum(s["status_counts"].values()) == 200


def test_prefix_input_validation():
    with pytest.raises(UsageError):
        hamming_prefix_protocol(np.zeros(10), np.zeros(10), HammingPrefixConfig(12, 2, 0.5), stream(0, "v"))
    with pytest.raises(UsageError):
        HammingPrefixConfig(64, 7, 1.5)

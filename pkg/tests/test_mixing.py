import math

import numpy as np
import pytest

from skagraph.errors import InvariantViolation, ResourceBudgetError, UsageError
from skagraph.graphs import Side, dense_biadjacency, euclidean, hamming, hamming_theta, point_line, tensor_with_complete
from skagraph.mixing import (
    SubsetPair,
    density_bound_check,
    density_threshold,
    edge_count,
    hamming_cylinder_counterexample,
    line_pencil,
    mixing_check,
    neighbor_ball,
    prefix_cylinder,
    spectral_gap_claim_audit,
    uniform_pair,
)
from skagraph.rng import stream
from skagraph.spectral import closed_form_lambda2, numeric_spectrum


def _dense_count(g, pair):
    J = dense_biadjacency(g)
    return int(J[np.ix_(pair.A, pair.B)].sum())


def test_edge_count_examples():
    g = point_line(3)
    full = SubsetPair.make(np.arange(g.N), np.arange(g.N))
    assert edge_count(g, full) == g.N * g.degree
    u = 4
    one = SubsetPair.make([u], g.neighbor_block(Side.LEFT, [u])[0])
    assert edge_count(g, one) == g.degree
    # two parallel lines (same slope a = 1) against all nine points
    lines = [1 * 3 + 0, 1 * 3 + 1]
    assert edge_count(g, SubsetPair.make(np.arange(9), lines)) == 6


@pytest.mark.parametrize("g", [point_line(7), euclidean(7), hamming(8, 3), tensor_with_complete(point_line(3), 2)], ids=lambda g: g.describe())
def test_edge_count_matches_dense(g):
    rng = np.random.default_rng(3)
    for _ in range(40):
        pair = uniform_pair(g, int(rng.integers(1, g.N + 1)), int(rng.integers(1, g.N + 1)), rng)
        assert edge_count(g, pair) == _dense_count(g, pair)


def test_edge_count_budget():
    g = hamming(20, 10)
    with pytest.raises(ResourceBudgetError):
        edge_count(g, SubsetPair.make(np.arange(g.N), np.arange(g.N)))


def test_full_sets_have_zero_deviation():
    g = point_line(5)
    lam = closed_form_lambda2(g)
    a = mixing_check(g, SubsetPair.make(np.arange(g.N), np.arange(g.N)), lam)
    assert a.deviation == 0 and a.bound == lam * g.N


def test_mixing_point_line_uniform_64():
    g = point_line(16)
    lam = closed_form_lambda2(g)
    for i in range(1000):
        rng = stream(5, "pl16", i)
        mixing_check(g, uniform_pair(g, 64, 64, rng), lam)


def test_mixing_violation_is_raised():
    g = point_line(5)
    pair = SubsetPair.make([0], g.neighbor_block(Side.LEFT, [0])[0])
    with pytest.raises(InvariantViolation):
        mixing_check(g, pair, lambda2=0.0)
    assert not mixing_check(g, pair, lambda2=0.0, strict=False).holds


@pytest.mark.parametrize("g", [point_line(8), euclidean(7), hamming(10, 3)], ids=lambda g: g.describe())
def test_adversarial_generators_respect_the_lemma(g):
    lam = closed_form_lambda2(g) or numeric_spectrum(g).lambda2
    rng = np.random.default_rng(0)
    for _ in range(30):
        mixing_check(g, neighbor_ball(g, int(rng.integers(g.N)), int(rng.integers(0, 2))), lam)
    if g.family == "point-line":
        for k in range(1, g.q + 1):
            mixing_check(g, line_pencil(g, int(rng.integers(g.N)), k, rng), lam)
    if g.family == "hamming":
        for p in range(g.n_bits + 1):
            mixing_check(g, prefix_cylinder(g, 0, p), lam)


def test_monotone_in_a():
    g = euclidean(11)
    rng = np.random.default_rng(1)
    B = rng.choice(g.N, 40, replace=False)
    A = rng.permutation(g.N)
    prev = 0
    for s in range(1, g.N, 7):
        c = edge_count(g, SubsetPair.make(A[:s], B))
        assert c >= prev
        prev = c


def test_cylinder_density_closed_form():
    g = hamming(12, 2)
    a = mixing_check(g, prefix_cylinder(g, 0, 4), closed_form_lambda2(g))
    assert math.isclose(a.density_ratio, 2**4 * math.comb(8, 2) / math.comb(12, 2))
    assert a.density_ratio > 1


@pytest.mark.parametrize("n,expected", [(12, 11 / 6), (16, 5.2), (20, 2**3 * math.comb(17, 2) / math.comb(20, 2))])
def test_hamming_counterexample(n, expected):
    g = hamming_theta(n)
    pair, dens = hamming_cylinder_counterexample(g)
    assert dens.audit.size_a * dens.audit.size_b >= density_threshold(g)
    assert math.isclose(dens.audit.density_ratio, expected)
    assert dens.audit.density_ratio >= 1.5
    if n == 16:
        assert not dens.ok  # ratio above 2


def test_density_bound_point_line_and_tensor():
    g = point_line(16)
    lam = closed_form_lambda2(g)
    rng = stream(0, "density")
    side = math.ceil(math.sqrt(density_threshold(g)))
    for _ in range(100):
        d = density_bound_check(g, uniform_pair(g, side, side, rng), lam)
        assert d.ok and d.audit.density_ratio <= d.ceiling + 1e-12
    t = tensor_with_complete(point_line(4), 2)
    thr = density_threshold(t)
    assert thr == (t.N) ** 2 / 4
    side = math.ceil(math.sqrt(thr))
    for _ in range(50):
        assert density_bound_check(t, uniform_pair(t, side, side, rng)).ok


def test_density_precondition():
    g = point_line(8)
    with pytest.raises(UsageError, match="N\\^2/D"):
        density_bound_check(g, SubsetPair.make([0], [0]))


def test_spectral_gap_claim():
    t = tensor_with_complete(point_line(16), 2)
    audit = spectral_gap_claim_audit(t, 9, 9, draws=100, rng=stream(0, "claim"))
    assert audit.ok
    assert math.isclose(audit.log_bound, 9 + 9 - 4 + 1)
    full = spectral_gap_claim_audit(t, 10, 10, draws=1, rng=stream(0, "claim"))
    # A, B = everything: log2 |E| = log2(N D) = a + b + log2(D/N), one bit under the bound
    assert math.isclose(full.log_counts[0], full.log_bound - 1)
    with pytest.raises(UsageError):
        spectral_gap_claim_audit(t, 4, 4)

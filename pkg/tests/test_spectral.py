import math

import numpy as np
import pytest

from skagraph.errors import ConvergenceError, UsageError
from skagraph.graphs import complete_bipartite, euclidean, hamming, hamming_theta, point_line, tensor_with_complete
from skagraph.spectral import (
    character_sum_spectrum,
    closed_form_lambda2,
    closed_form_singular_values,
    krawtchouk,
    krawtchouk_table,
    numeric_spectrum,
    power_iteration_singular,
    tensor_spectrum_check,
)


def test_krawtchouk_examples():
    assert krawtchouk(4, 2, 0) == 6
    assert krawtchouk(4, 2, 1) == 0
    assert all(krawtchouk(7, 0, i) == 1 for i in range(8))
    assert krawtchouk_table(4, 2) == [6, 0, -2, 0, 6]
    with pytest.raises(UsageError):
        krawtchouk(4, 2, 5)


@pytest.mark.parametrize("n", range(2, 13))
def test_krawtchouk_first_value(n):
    for w in range(1, n):
        assert krawtchouk(n, w, 1) == math.comb(n - 1, w) - math.comb(n - 1, w - 1)


def test_closed_form_examples():
    assert closed_form_lambda2(point_line(16)) == 4.0
    assert closed_form_lambda2(hamming(4, 2)) == 6
    assert closed_form_lambda2(tensor_with_complete(point_line(16), 3)) == 32.0
    assert closed_form_lambda2(euclidean(7)) is None
    assert closed_form_lambda2(complete_bipartite(3)) == 0.0


def test_dense_examples():
    rep = numeric_spectrum(point_line(4), method="dense")
    assert abs(rep.lambda1 - 4) < 1e-9 and abs(rep.lambda2 - 2) < 1e-6
    k = numeric_spectrum(complete_bipartite(3), method="dense")
    assert abs(k.lambda1 - 8) < 1e-9 and abs(k.lambda2) < 1e-9


def test_hamming_full_spectrum_matches_krawtchouk():
    g = hamming(6, 3)
    ev = np.array(numeric_spectrum(g, method="dense", full=True).full_spectrum)
    K = krawtchouk_table(6, 3)
    pred = sorted([s * k for i, k in enumerate(K) for s in (1, -1) for _ in range(math.comb(6, i))], reverse=True)
    assert np.allclose(ev, pred, atol=1e-6)


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
def test_point_line_all_methods(q):
    g = point_line(q)
    d = numeric_spectrum(g, method="dense")
    p = numeric_spectrum(g, method="power")
    for rep in (d, p):
        assert abs(rep.lambda1 - q) <= 1e-9 * q
        assert abs(rep.lambda2 - math.sqrt(q)) < 1e-6


@pytest.mark.parametrize("g", [point_line(5), hamming(6, 2), euclidean(5), tensor_with_complete(point_line(3), 1)], ids=lambda g: g.describe())
def test_bipartite_symmetry(g):
    ev = np.array(numeric_spectrum(g, method="dense", full=True).full_spectrum)
    assert np.allclose(ev, -ev[::-1], atol=1e-9)


@pytest.mark.parametrize("g", [point_line(5), hamming(8, 3), tensor_with_complete(hamming(4, 2), 1)], ids=lambda g: g.describe())
def test_closed_form_multiset_matches_dense(g):
    sv = closed_form_singular_values(g)
    pred = np.sort(np.concatenate([np.full(m, v) for v, m in sv] + [np.full(m, -v) for v, m in sv]))[::-1]
    ev = np.array(numeric_spectrum(g, method="dense", full=True).full_spectrum)
    assert np.allclose(ev, pred, atol=1e-6)


@pytest.mark.parametrize("q", [5, 7, 9, 13])
def test_euclidean_character_sums_match_dense_and_power(q):
    g = euclidean(q)
    sv = character_sum_spectrum(g)
    d = numeric_spectrum(g, method="dense")
    p = numeric_spectrum(g, method="power")
    assert abs(sv[0] - g.degree) < 1e-9
    assert abs(sv[1] - d.lambda2) < 1e-6
    assert abs(p.lambda2 - d.lambda2) < 1e-6


def test_euclidean_lambda2_within_three_sqrt_q():
    ratios = {}
    for q in range(5, 102, 2):
        if all(q % d for d in range(3, int(q**0.5) + 1, 2)):
            g = euclidean(q)
            ratios[q] = character_sum_spectrum(g)[1] / math.sqrt(q)
    assert max(ratios.values()) <= 3.0


@pytest.mark.parametrize("n", range(8, 21))
def test_hamming_spectral_gap_fails(n):
    g = hamming_theta(n)
    assert closed_form_lambda2(g) / g.degree >= 0.1


def test_hamming_character_sum_matches_krawtchouk():
    g = hamming(10, 3)
    sv = character_sum_spectrum(g)
    pred = sorted([abs(krawtchouk(10, 3, i)) for i in range(11) for _ in range(math.comb(10, i))], reverse=True)
    assert np.allclose(sv, pred, atol=1e-9)


def test_power_iteration_reports_non_convergence():
    with pytest.raises(ConvergenceError) as info:
        power_iteration_singular(euclidean(11), max_iter=2, tol=0.0)
    assert info.value.estimate is not None


def test_size_limits():
    with pytest.raises(UsageError):
        numeric_spectrum(point_line(64), method="dense")
    with pytest.raises(UsageError):
        numeric_spectrum(point_line(64), method="power", full=True)


def test_tensor_examples():
    chk = tensor_spectrum_check(point_line(3), 1)
    assert chk.ok
    assert abs(chk.top[0] - 6) < 1e-6 and abs(chk.top[1] - 2 * math.sqrt(3)) < 1e-6
    assert tensor_spectrum_check(point_line(4), 0).max_error < 1e-9
    chk = tensor_spectrum_check(hamming(4, 2), 2)
    assert chk.ok and abs(chk.top[0] - 24) < 1e-6


def test_power_mode_on_larger_graph():
    g = point_line(32)
    rep = numeric_spectrum(g, method="power", tol=1e-13)
    assert rep.method == "NumericPowerIteration"
    assert abs(rep.lambda2 - math.sqrt(32)) < 1e-6
    assert rep.iterations > 0

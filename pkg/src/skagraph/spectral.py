"""Spectra of the bipartite adjacency operator H = [[0, J], [J^T, 0]].

The eigenvalues of H are plus/minus the singular values of the bi-adjacency
matrix J, so "lambda_2" throughout is the second singular value of J.  Three
independent routes are provided:

* closed forms (point-line, Krawtchouk, tensor products);
* a dense symmetric eigensolve of H built from the direct incidence test;
* matrix-free power iteration on J J^T with deflation, driven only by the
  neighbor enumeration.

Cayley graphs on (Z_p)^d (euclidean, hamming) additionally get an exact
character-sum spectrum through a multidimensional FFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, UsageError
from .graphs import GraphSpec, biadjacency_matvec, dense_biadjacency

__all__ = [
    "SpectrumReport",
    "krawtchouk",
    "krawtchouk_table",
    "closed_form_lambda2",
    "closed_form_singular_values",
    "numeric_spectrum",
    "character_sum_spectrum",
    "power_iteration_singular",
    "TensorCheck",
    "tensor_spectrum_check",
    "DENSE_LIMIT",
    "POWER_LIMIT",
]

DENSE_LIMIT = 1 << 12  # max 2N for the dense solve
POWER_LIMIT = 1 << 22  # max 2N for power iteration


@dataclass
class SpectrumReport:
    lambda1: float
    lambda2: float
    method: str
    tol: float
    full_spectrum: list[float] | None = None
    iterations: int | None = None
    residual: float | None = None

    @property
    def spectral_ratio(self) -> float:
        return self.lambda2 / self.lambda1 if self.lambda1 else float("nan")

    def as_dict(self) -> dict:
        d = {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "spectral_ratio": self.spectral_ratio,
            "method": self.method,
            "tol": self.tol,
            "iterations": self.iterations,
            "residual": self.residual,
        }
        if self.full_spectrum is not None:
            d["full_spectrum"] = self.full_spectrum
        return d


def krawtchouk(n: int, w: int, i: int) -> int:
    """K_w(i) = sum_h (-1)^h C(i, h) C(n - i, w - h), exact."""
    if not (0 <= i <= n and 0 <= w <= n):
        raise UsageError(f"krawtchouk needs 0 <= i, w <= n; got n={n}, w={w}, i={i}")
    return sum((-1) ** h * math.comb(i, h) * math.comb(n - i, w - h) for h in range(w + 1))


def krawtchouk_table(n: int, w: int) -> list[int]:
    return [krawtchouk(n, w, i) for i in range(n + 1)]


def closed_form_singular_values(g: GraphSpec) -> list[tuple[float, int]] | None:
    """Singular values of J with multiplicities, where a formula is known.

    Point-line: q once, sqrt(q) with multiplicity q^2 - q, 0 with
    multiplicity q - 1 (the parallel classes).  Hamming: |K_w(i)| with
    multiplicity C(n, i).  Returns ``None`` for the euclidean family.
    """
    fam = g.family
    if fam == "point-line":
        q = g.q
        return [(float(q), 1), (math.sqrt(q), q * q - q), (0.0, q - 1)]
    if fam == "hamming":
        n, w = g.n_bits, g.w
        return [(float(abs(krawtchouk(n, w, i))), math.comb(n, i)) for i in range(n + 1)]
    if fam == "complete":
        return [(float(g.M), 1), (0.0, g.M - 1)]
    if fam == "tensor":
        base = closed_form_singular_values(g.base)
        if base is None:
            return None
        M = g.M
        return [(M * s, mult) for s, mult in base] + [(0.0, g.base.N * (M - 1))]
    return None


def closed_form_lambda2(g: GraphSpec) -> float | None:
    """Second eigenvalue of H from a formula, or ``None`` (no formula known)."""
    fam = g.family
    if fam == "point-line":
        return math.sqrt(g.q)
    if fam == "hamming":
        return float(max(abs(krawtchouk(g.n_bits, g.w, i)) for i in range(1, g.n_bits + 1)))
    if fam == "complete":
        return 0.0
    if fam == "tensor":
        base = closed_form_lambda2(g.base)
        return None if base is None else g.M * base
    return None


def _expand(values: list[tuple[float, int]]) -> np.ndarray:
    return np.sort(np.concatenate([np.full(m, v) for v, m in values if m]))[::-1]


def power_iteration_singular(
    g: GraphSpec,
    deflate: list[np.ndarray] | None = None,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    rng: np.random.Generator | None = None,
) -> tuple[float, np.ndarray, int, float]:
    """Largest eigenvalue of J J^T restricted to the complement of ``deflate``.

    ``deflate`` vectors must be orthonormal.  Stops when two successive
    Rayleigh quotients agree to ``tol`` (relative).  Returns
    ``(sigma, vector, iterations, residual)`` with ``sigma`` the singular
    value (square root of the Rayleigh quotient).
    """
    N = g.N
    if 2 * N > POWER_LIMIT:
        raise UsageError(f"power iteration refused for 2N={2 * N} > {POWER_LIMIT}")
    rng = rng if rng is not None else np.random.default_rng(0)
    basis = deflate or []

    def project(v):
        for b in basis:
            v = v - (b @ v) * b
        return v

    def apply(v):
        return biadjacency_matvec(g, biadjacency_matvec(g, v, transpose=True))

    scale = float(g.degree) ** 2
    v = project(rng.standard_normal(N))
    v /= np.linalg.norm(v)
    rq_prev = None
    for it in range(1, max_iter + 1):
        w = project(apply(v))
        rq = float(v @ w)
        norm = np.linalg.norm(w)
        if norm <= 1e-12 * scale:
            # v lies (numerically) in the kernel of J^T on the deflated space
            return 0.0, v, it, float(norm)
        residual = float(np.linalg.norm(w - rq * v))
        if rq_prev is not None and abs(rq - rq_prev) <= tol * max(1.0, abs(rq)):
            return math.sqrt(max(rq, 0.0)), v, it, residual
        rq_prev = rq
        v = w / norm
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps",
        residual=residual,
        estimate=math.sqrt(max(rq, 0.0)),
    )


def character_sum_spectrum(g: GraphSpec) -> np.ndarray:
    """Singular values of J for Cayley graphs on (Z_p)^d, via FFT.

    J[x, y] depends only on y - x (euclidean) or x XOR y (hamming), so its
    eigenvalues are the character sums of the connection set: a
    multidimensional DFT of the set's indicator over the additive group.
    Returns the singular values sorted in decreasing order.
    """
    if g.family == "euclidean":
        F = g.field
        p, k = F.characteristic, F.extension_degree
        ind = np.zeros(g.N)
        circle = g._circle
        ind[circle[:, 0] * F.q + circle[:, 1]] = 1.0
        # digit i of each coordinate is one Z_p axis
        shape = (p,) * (2 * k)
        cube = ind.reshape(shape)
    elif g.family == "hamming":
        ind = np.zeros(g.N)
        ind[g._masks] = 1.0
        cube = ind.reshape((2,) * g.n_bits)
    else:
        raise UsageError(f"{g.describe()} is not a supported Cayley graph")
    spec = np.fft.fftn(cube).reshape(-1)
    return np.sort(np.abs(spec))[::-1]


def numeric_spectrum(
    g: GraphSpec,
    top_k: int = 2,
    tol: float = 1e-12,
    method: str = "auto",
    full: bool = False,
    seed: int = 0,
    max_iter: int = 100_000,
) -> SpectrumReport:
    """Top eigenvalues of H computed numerically.

    ``method`` is ``"dense"`` (eigvalsh of H, 2N <= 4096), ``"power"``
    (matrix-free) or ``"auto"`` (dense when it fits).  ``full`` returns the
    whole spectrum of H and needs the dense path.
    """
    two_n = 2 * g.N
    if method == "auto":
        method = "dense" if two_n <= DENSE_LIMIT else "power"
    if full and method != "dense":
        raise UsageError("the full spectrum needs the dense method (2N <= 4096)")
    if method == "dense":
        if two_n > DENSE_LIMIT:
            raise UsageError(f"dense spectrum refused for 2N={two_n} > {DENSE_LIMIT}")
        J = dense_biadjacency(g)
        N = g.N
        H = np.zeros((2 * N, 2 * N))
        H[:N, N:] = J
        H[N:, :N] = J.T
        ev = np.linalg.eigvalsh(H)[::-1]
        return SpectrumReport(
            lambda1=float(ev[0]),
            lambda2=float(ev[1]),
            method="NumericDense",
            tol=tol,
            full_spectrum=[float(v) for v in ev] if full else [float(v) for v in ev[:top_k]],
        )
    if method != "power":
        raise UsageError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    sigma1, _, it1, _ = power_iteration_singular(g, tol=tol, max_iter=max_iter, rng=rng)
    ones = np.full(g.N, 1.0 / math.sqrt(g.N))
    basis = [ones]
    values = [sigma1]
    total_it, residual = it1, 0.0
    for _ in range(max(top_k, 2) - 1):
        s, v, it, residual = power_iteration_singular(g, deflate=basis, tol=tol, max_iter=max_iter, rng=rng)
        total_it += it
        values.append(s)
        v = v - sum((b @ v) * b for b in basis)
        basis.append(v / np.linalg.norm(v))
    return SpectrumReport(
        lambda1=values[0],
        lambda2=values[1],
        method="NumericPowerIteration",
        tol=tol,
        full_spectrum=values[:top_k],
        iterations=total_it,
        residual=residual,
    )


@dataclass
class TensorCheck:
    ok: bool
    m_bits: int
    max_error: float
    tol: float
    top: list[float]
    offending: list[tuple[float, float]] = field(default_factory=list)


def tensor_spectrum_check(base: GraphSpec, m_bits: int, tol: float = 1e-6) -> TensorCheck:
    """Dense spectrum of base (x) K_{M,M} against the product law.

    Predicted multiset: ``M * lambda`` for every eigenvalue ``lambda`` of the
    base H, plus ``2 N (M - 1)`` zeros.
    """
    from .graphs import tensor_with_complete

    M = 1 << m_bits
    g = tensor_with_complete(base, m_bits)
    base_ev = np.array(numeric_spectrum(base, method="dense", full=True).full_spectrum)
    tens_ev = np.array(numeric_spectrum(g, method="dense", full=True).full_spectrum)
    predicted = np.sort(np.concatenate([M * base_ev, np.zeros(2 * base.N * (M - 1))]))[::-1]
    err = np.abs(predicted - tens_ev)
    bad = np.nonzero(err > tol)[0]
    return TensorCheck(
        ok=bad.size == 0,
        m_bits=m_bits,
        max_error=float(err.max()),
        tol=tol,
        top=[float(v) for v in tens_ev[:2]],
        offending=[(float(predicted[i]), float(tens_ev[i])) for i in bad[:10]],
    )

"""Dense exact analysis of walk matrices on small graphs.

Builds full transition matrices for any configured sampler, computes their
eigenvalue spectra (second-largest signed eigenvalue and second-largest
eigenvalue modulus), the expected repeat probability of a walk at
stationarity, and a detailed-balance residual for reversibility checks.

Everything here is dense and exact-arithmetic-friendly on purpose: it is a
diagnostic path for small graphs (n <= 4096 by default), not a scalable
eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .estimation import Distribution
from .graph import Graph
from .samplers import SamplerError, SamplerKind, WalkConfig, jump_set, resolve_cap, transition_row

DENSE_CAP = 4096

_CROSS_CHECK_N = 4
_CROSS_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class WalkMatrix:
    """Dense row-stochastic one-step transition matrix of a configured walk."""

    n: int
    entries: np.ndarray
    config: WalkConfig

    def validate(self) -> None:
        if self.entries.shape != (self.n, self.n):
            raise ValueError("entries must be n x n")
        if np.any(self.entries < 0):
            raise ValueError("negative transition probability")
        rows = self.entries.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > 1e-12:
            raise ValueError("rows must sum to 1")


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues sorted by descending real part, with the two gap summaries.

    ``second_largest_signed`` (mu) is the real part of the second entry in
    that order; ``slem`` is the largest modulus among the non-unit
    eigenvalues. The two differ whenever the most negative eigenvalue beats
    the second-largest positive one in magnitude.
    """

    eigenvalues: np.ndarray
    second_largest_signed: float
    slem: float
    is_real_spectrum: bool

    def validate(self) -> None:
        lead = self.eigenvalues[0]
        if abs(lead - 1.0) > 1e-9:
            raise ValueError(f"leading eigenvalue {lead} is not 1")
        if self.slem > 1 + 1e-9 or self.second_largest_signed > 1 + 1e-9:
            raise ValueError("eigenvalue summary exceeds 1")


def dense_transition_matrix(graph: Graph, config: WalkConfig, cap: int = DENSE_CAP) -> WalkMatrix:
    """Assemble all n transition rows into one dense matrix (n <= cap)."""
    if graph.n > cap:
        raise SamplerError(f"graph has {graph.n} nodes; dense analysis capped at {cap}")
    entries = np.empty((graph.n, graph.n))
    for v in range(graph.n):
        entries[v] = transition_row(graph, config, v)
    matrix = WalkMatrix(n=graph.n, entries=entries, config=config)
    matrix.validate()
    return matrix


def characteristic_polynomial(entries: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Exact characteristic polynomial coefficients, leading term first.

    Faddeev-LeVerrier recurrence over Fractions; returns
    [1, c1, ..., cn] with p(x) = x^n + c1 x^(n-1) + ... + cn.
    """
    n = len(entries)
    a = [[Fraction(x) for x in row] for row in entries]
    coeffs = [Fraction(1)]
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        am = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
        if k < n:
            m = am
            for i in range(n):
                m[i][i] += c
    return coeffs


def _cross_check_small(entries: np.ndarray, eigenvalues: np.ndarray) -> None:
    """Compare the eigensolver against exact polynomial roots (tiny n only)."""
    coeffs = characteristic_polynomial([[Fraction(x) for x in row] for row in entries])
    roots = np.roots([float(c) for c in coeffs])
    got = np.sort_complex(eigenvalues)
    want = np.sort_complex(roots)
    gap = float(np.max(np.abs(got - want))) if len(got) else 0.0
    if gap > _CROSS_CHECK_TOL:
        raise ArithmeticError(
            f"eigensolver disagrees with characteristic polynomial roots by {gap:.3e}"
        )


def spectrum(matrix: WalkMatrix) -> SpectrumReport:
    """Full spectrum of a walk matrix, sorted by descending real part."""
    matrix.validate()
    eig = np.linalg.eigvals(matrix.entries)
    if matrix.n <= _CROSS_CHECK_N:
        _cross_check_small(matrix.entries, eig)
    order = np.lexsort((-eig.imag, -eig.real))
    eig = eig[order]
    lead = int(np.argmin(np.abs(eig - 1.0)))
    rest = np.delete(eig, lead)
    mu = float(eig[1].real) if len(eig) > 1 else float("nan")
    slem = float(np.max(np.abs(rest))) if len(rest) else 0.0
    report = SpectrumReport(
        eigenvalues=eig,
        second_largest_signed=mu,
        slem=slem,
        is_real_spectrum=bool(np.max(np.abs(eig.imag), initial=0.0) <= 1e-9),
    )
    report.validate()
    return report


def _dense_pi(graph: Graph, pi: Distribution) -> np.ndarray:
    out = np.zeros(graph.n)
    support = np.asarray(pi.support, dtype=np.int64)
    if len(support) and (support.min() < 0 or support.max() >= graph.n):
        raise ValueError("distribution support is not a set of node ids")
    out[support] = pi.mass
    return out


def self_transition_probabilities(graph: Graph, config: WalkConfig) -> np.ndarray:
    """Diagonal of the transition matrix, one value per node."""
    n = graph.n
    deg = graph.degrees.astype(np.float64)
    kind = config.kind
    if kind is SamplerKind.SRW:
        return np.zeros(n)
    if kind is SamplerKind.RWE:
        return config.alpha / ((deg + config.alpha) * n)
    cap = resolve_cap(graph, config)
    big = np.maximum(cap, deg)
    if kind is SamplerKind.WJRW:
        diag = np.zeros(n)
        jump = jump_set(graph, cap)
        if jump.size:
            m = jump.members
            diag[m] = (big[m] - deg[m]) / (big[m] * jump.size)
        return diag
    return (big - deg) / big


def expected_repeat_probability(graph: Graph, config: WalkConfig, pi: Distribution) -> float:
    """Chance the next sample repeats the current one, averaged under pi.

    Equals sum over nodes of pi_v times the self-transition probability of
    the configured walk at v.
    """
    weights = _dense_pi(graph, pi)
    return float(weights @ self_transition_probabilities(graph, config))


def reversibility_residual(matrix: WalkMatrix, pi: Distribution, graph: Optional[Graph] = None) -> float:
    """Worst detailed-balance violation max |pi_v P_vu - pi_u P_uv|.

    Zero (to rounding) iff the chain is reversible under pi. ``graph`` is
    only used to validate the support when given.
    """
    matrix.validate()
    support = np.asarray(pi.support, dtype=np.int64)
    if len(support) and (support.min() < 0 or support.max() >= matrix.n):
        raise ValueError("distribution support is not a set of node ids")
    weights = np.zeros(matrix.n)
    weights[support] = pi.mass
    flow = weights[:, None] * matrix.entries
    return float(np.max(np.abs(flow - flow.T)))

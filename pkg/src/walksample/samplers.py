"""Five random-walk node samplers over undirected graphs.

Transition laws (n nodes, d_v = degree, N(v) = neighbors):

* ``srw``  - simple random walk: uniform over N(v).
* ``rwe``  - random walk with escaping: with weight ``alpha`` per node, jump
  uniformly over all n nodes (self included) with probability
  alpha/(d_v+alpha), else walk to a uniform neighbor.
* ``md``   - maximum-degree walk: pad every node with virtual self-loops up
  to the graph's maximum degree; equivalently ``gmd`` with c bound to d_max.
* ``gmd``  - generalized maximum-degree walk: with M = max(c, d_v), stay put
  with probability (M-d_v)/M, else walk to a uniform neighbor.
* ``wjrw`` - weighted-jump random walk: the self-loop mass of ``gmd`` is
  routed instead to the jump set U = {u : d_u < c}, uniformly (self
  included when v is in U).

Each sampler is exposed three ways: exact per-node transition rows, a
seeded stochastic stepper, and stationary distributions (closed form and an
exact numeric fixed-point solver). The closed form for ``wjrw`` weights
each node in U by the average padding (c - d_u) over U; it coincides with
the numeric stationary when all members of U share one degree, and it is
what the ``paper`` estimation-weights mode uses even where the two disagree.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from .graph import Graph

RNG_ALGORITHM = "philox4x64"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SamplerError(ValueError):
    """Invalid sampler configuration or an impossible transition."""


class ConvergenceError(RuntimeError):
    """The fixed-point stationary solver did not reach tolerance."""


class SamplerKind(str, Enum):
    SRW = "srw"
    RWE = "rwe"
    MD = "md"
    GMD = "gmd"
    WJRW = "wjrw"


_START_POLICIES = ("uniform", "degree", "fixed")


@dataclass(frozen=True)
class WalkConfig:
    """Sampler kind plus everything needed to reproduce one walk.

    ``alpha`` is required for (and only for) ``rwe``; ``c`` for ``gmd`` and
    ``wjrw`` (``md`` binds c to the graph's maximum degree when it runs).
    ``seed`` fully determines the walk on a given graph.
    """

    kind: SamplerKind
    alpha: Optional[float] = None
    c: Optional[int] = None
    budget: int = 1
    seed: int = 0
    start_policy: str = "uniform"
    start_node: Optional[int] = None
    burn_in: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", SamplerKind(self.kind))
        if self.kind is SamplerKind.RWE:
            if self.alpha is None or self.alpha < 0:
                raise SamplerError("rwe requires a nonnegative alpha")
            object.__setattr__(self, "alpha", float(self.alpha))
        elif self.alpha is not None:
            raise SamplerError(f"alpha is not a parameter of {self.kind.value}")
        if self.kind in (SamplerKind.GMD, SamplerKind.WJRW):
            if self.c is None or int(self.c) < 1:
                raise SamplerError(f"{self.kind.value} requires a positive integer c")
            object.__setattr__(self, "c", int(self.c))
        elif self.c is not None:
            raise SamplerError(f"c is not a parameter of {self.kind.value}")
        if self.budget < 1:
            raise SamplerError("budget must be >= 1")
        if self.burn_in < 0:
            raise SamplerError("burn_in must be >= 0")
        if self.start_policy not in _START_POLICIES:
            raise SamplerError(f"unknown start policy {self.start_policy!r}")
        if (self.start_node is None) == (self.start_policy == "fixed"):
            raise SamplerError("start_node must be given exactly for the fixed policy")


@dataclass(frozen=True)
class Trace:
    """Ordered node visits of one walk, with its provenance."""

    nodes: np.ndarray
    config: WalkConfig
    start: int

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class JumpSet:
    """Nodes with degree below the padding threshold c."""

    members: np.ndarray
    size: int
    total_alpha: int


def jump_set(graph: Graph, c: int) -> JumpSet:
    """All nodes v with d_v < c, plus the total padding sum(c - d_v)."""
    if c < 1:
        raise SamplerError("c must be >= 1")
    members = np.flatnonzero(graph.degrees < c).astype(np.int64)
    total = int((c - graph.degrees[members]).sum())
    return JumpSet(members=members, size=len(members), total_alpha=total)


def derive_seed(base_seed: int, repetition: int) -> int:
    """Deterministic 64-bit per-repetition seed (SplitMix64 sequence)."""
    x = (base_seed + (repetition + 1) * _GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; independent streams for distinct seeds."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


def resolve_cap(graph: Graph, config: WalkConfig) -> Optional[int]:
    """Padding threshold in effect: c, d_max for md, None for srw/rwe."""
    if config.kind is SamplerKind.MD:
        return graph.d_max
    if config.kind in (SamplerKind.GMD, SamplerKind.WJRW):
        return config.c
    return None


class _WalkContext:
    """Resolved per-walk state shared by the stepper and the row builder."""

    __slots__ = ("kind", "n", "degrees", "indptr", "indices", "alpha", "cap", "jump")

    def __init__(self, graph: Graph, config: WalkConfig, jump: Optional[JumpSet] = None):
        self.kind = config.kind
        self.n = graph.n
        self.degrees = graph.degrees
        self.indptr = graph.indptr
        self.indices = graph.indices
        self.alpha = config.alpha
        self.cap = resolve_cap(graph, config)
        if self.kind is SamplerKind.WJRW:
            self.jump = jump if jump is not None else jump_set(graph, self.cap)
        else:
            self.jump = None


def _advance(ctx: _WalkContext, v: int, r_mode: float, r_pick: float) -> int:
    """One transition from v driven by two uniforms (mode, then target)."""
    d = int(ctx.degrees[v])
    kind = ctx.kind
    if kind is SamplerKind.SRW:
        if d == 0:
            raise SamplerError(f"no outgoing transition from isolated node {v}")
        j = int(r_pick * d)
        if j >= d:
            j = d - 1
        return int(ctx.indices[int(ctx.indptr[v]) + j])
    if kind is SamplerKind.RWE:
        denom = d + ctx.alpha
        if denom == 0:
            raise SamplerError(f"no outgoing transition from isolated node {v}")
        if r_mode * denom < ctx.alpha:
            j = int(r_pick * ctx.n)
            return j if j < ctx.n else ctx.n - 1
        j = int(r_pick * d)
        if j >= d:
            j = d - 1
        return int(ctx.indices[int(ctx.indptr[v]) + j])
    cap = ctx.cap
    pad = cap - d if cap > d else 0
    if kind is SamplerKind.WJRW:
        if pad and r_mode * (d + pad) < pad:
            size = ctx.jump.size
            j = int(r_pick * size)
            if j >= size:
                j = size - 1
            return int(ctx.jump.members[j])
    else:  # md / gmd: padding is self-loop mass
        if pad and r_mode * (d + pad) < pad:
            return v
    if d == 0:
        raise SamplerError(f"no outgoing transition from isolated node {v}")
    j = int(r_pick * d)
    if j >= d:
        j = d - 1
    return int(ctx.indices[int(ctx.indptr[v]) + j])


def transition_row(graph: Graph, config: WalkConfig, v: int) -> np.ndarray:
    """Exact one-step transition probabilities from node v (dense length n)."""
    if not 0 <= v < graph.n:
        raise SamplerError(f"node {v} out of range")
    n = graph.n
    d = int(graph.degrees[v])
    nbrs = graph.neighbors(v)
    row = np.zeros(n)
    kind = config.kind
    if kind is SamplerKind.SRW:
        if d == 0:
            raise SamplerError(f"no outgoing transition from isolated node {v}")
        row[nbrs] = 1.0 / d
        return row
    if kind is SamplerKind.RWE:
        denom = d + config.alpha
        if denom == 0:
            raise SamplerError(f"no outgoing transition from isolated node {v}")
        row[:] = config.alpha / (denom * n)
        row[nbrs] += 1.0 / denom
        return row
    cap = resolve_cap(graph, config)
    big = max(cap, d)
    if kind is SamplerKind.WJRW:
        row[nbrs] += 1.0 / big
        if big > d:
            jump = jump_set(graph, cap)
            row[jump.members] += (big - d) / (big * jump.size)
        return row
    # md / gmd
    row[v] = (big - d) / big
    row[nbrs] += 1.0 / big
    return row


def step(
    graph: Graph,
    config: WalkConfig,
    jump: Optional[JumpSet],
    v: int,
    rng: np.random.Generator,
) -> int:
    """Draw the next node from v; consumes exactly two uniform variates."""
    if not 0 <= v < graph.n:
        raise SamplerError(f"node {v} out of range")
    ctx = _WalkContext(graph, config, jump)
    r = rng.random(2)
    return _advance(ctx, v, float(r[0]), float(r[1]))


def _draw_start(graph: Graph, config: WalkConfig, rng: np.random.Generator) -> int:
    if config.start_policy == "fixed":
        v = int(config.start_node)
        if not 0 <= v < graph.n:
            raise SamplerError(f"start node {v} out of range")
        return v
    r = float(rng.random())
    if config.start_policy == "degree":
        cum = np.cumsum(graph.degrees)
        return int(np.searchsorted(cum, r * cum[-1], side="right"))
    v = int(r * graph.n)
    return v if v < graph.n else graph.n - 1


def run_walk(graph: Graph, config: WalkConfig) -> Trace:
    """Run one seeded walk; the trace has exactly ``budget`` nodes.

    Burn-in steps (if any) are taken before the first recorded node and do
    not count toward the budget. Identical (graph, config) always produce
    the identical trace.
    """
    if graph.n == 0:
        raise SamplerError("cannot walk an empty graph")
    ctx = _WalkContext(graph, config)
    rng = make_rng(config.seed)
    start = _draw_start(graph, config, rng)
    budget = config.budget
    out = np.empty(budget, dtype=np.int64)
    v = start
    total_steps = config.burn_in + budget - 1
    recorded = 0
    if config.burn_in == 0:
        out[0] = v
        recorded = 1
    chunk = 1 << 15
    done = 0
    advance = _advance
    while done < total_steps:
        k = min(chunk, total_steps - done)
        buf = rng.random(2 * k).tolist()
        for i in range(k):
            v = advance(ctx, v, buf[2 * i], buf[2 * i + 1])
            done += 1
            if done >= config.burn_in:
                out[recorded] = v
                recorded += 1
    if recorded != budget:  # burn_in landed exactly on the first record
        out[recorded:] = v
    return Trace(nodes=out, config=config, start=start)


def stationary_closed_form(graph: Graph, config: WalkConfig) -> np.ndarray:
    """Stationary distribution by formula, normalized to sum 1.

    srw: proportional to d_v; rwe: to d_v + alpha; md: uniform; gmd: to
    max(c, d_v); wjrw: to d_v plus, for members of the jump set U, the
    average padding sum(c - d_u)/|U|. The wjrw formula is exact only when
    all members of U share the same degree (see module docstring).
    """
    kind = config.kind
    deg = graph.degrees.astype(np.float64)
    if kind is SamplerKind.SRW:
        weights = deg
    elif kind is SamplerKind.RWE:
        weights = deg + config.alpha
    elif kind is SamplerKind.MD:
        weights = np.ones(graph.n)
    elif kind is SamplerKind.GMD:
        weights = np.maximum(resolve_cap(graph, config), deg)
    else:  # wjrw
        jump = jump_set(graph, config.c)
        weights = deg.copy()
        if jump.size:
            weights[jump.members] += jump.total_alpha / jump.size
    total = weights.sum()
    if total <= 0:
        raise SamplerError("graph has no edges; stationary undefined")
    return weights / total


def _is_connected(graph: Graph) -> bool:
    if graph.n <= 1:
        return True
    if np.any(graph.degrees == 0):
        return False
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    adj = csr_matrix(
        (np.ones(len(graph.indices), dtype=np.int8), graph.indices, graph.indptr),
        shape=(graph.n, graph.n),
    )
    return connected_components(adj, directed=False, return_labels=False) == 1


def _neighbor_sums(indptr: np.ndarray, indices: np.ndarray, x: np.ndarray) -> np.ndarray:
    """y[u] = sum of x over the neighbors of u (works with empty rows)."""
    n = len(indptr) - 1
    out = np.zeros(n)
    if len(indices) == 0:
        return out
    contrib = x[indices]
    nonempty = np.flatnonzero(np.diff(indptr) > 0)
    out[nonempty] = np.add.reduceat(contrib, indptr[:-1][nonempty])
    return out


def _apply_transition(graph: Graph, config: WalkConfig, pi: np.ndarray) -> np.ndarray:
    """Row-vector product pi @ P in O(m + n) using the jump structure."""
    kind = config.kind
    deg = graph.degrees
    if kind is SamplerKind.SRW:
        return _neighbor_sums(graph.indptr, graph.indices, pi / deg)
    if kind is SamplerKind.RWE:
        y = pi / (deg + config.alpha)
        out = _neighbor_sums(graph.indptr, graph.indices, y)
        out += config.alpha * y.sum() / graph.n
        return out
    cap = resolve_cap(graph, config)
    big = np.maximum(cap, deg)
    y = pi / big
    out = _neighbor_sums(graph.indptr, graph.indices, y)
    pad_mass = pi * (big - deg) / big
    if kind is SamplerKind.WJRW:
        jump = jump_set(graph, cap)
        if jump.size:
            out[jump.members] += pad_mass.sum() / jump.size
    else:
        out += pad_mass
    return out


def stationary_numeric(
    graph: Graph,
    config: WalkConfig,
    tol: float = 1e-12,
    max_iters: int = 10**6,
) -> np.ndarray:
    """Exact stationary distribution by sparse fixed-point iteration.

    Iterates pi <- pi @ (I + P)/2 (the smoothing preserves the stationary
    distribution and guarantees aperiodicity) until the L1 residual
    ||pi @ P - pi|| drops below ``tol``.
    """
    if graph.n == 0:
        raise SamplerError("empty graph")
    jumps_everywhere = config.kind is SamplerKind.RWE and config.alpha > 0
    if not jumps_everywhere and not _is_connected(graph):
        raise SamplerError("graph must be connected for a unique stationary distribution")
    pi = np.full(graph.n, 1.0 / graph.n)
    for _ in range(max_iters):
        nxt = _apply_transition(graph, config, pi)
        residual = float(np.abs(nxt - pi).sum())
        if residual <= tol:
            return pi / pi.sum()
        pi = 0.5 * (pi + nxt)
        pi /= pi.sum()
    raise ConvergenceError(
        f"stationary iteration did not reach tol={tol:g} within "
        f"{max_iters} iterations (residual={residual:.3e})"
    )


def with_seed(config: WalkConfig, seed: int) -> WalkConfig:
    """Copy of the config with a different seed."""
    return replace(config, seed=seed)

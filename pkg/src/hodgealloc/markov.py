"""Canonical Markov chain on a weighted graph and stochastic path integrals.

The chain moves from S to an adjacent T with probability
lambda(S,T) / sum of incident weights at S. It is reversible, with
stationary mass proportional to total incident weight. The value of a flow
f at a target T, started from S, is the expected sum of f along the chain's
path until it first hits T; `estimate_value` estimates it by Monte Carlo.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._workers import worker_cap
from .errors import (
    AllPathsTruncated,
    Disconnected,
    IsolatedState,
    NotAnEdge,
    NotAWalk,
    TruncatedPath,
    UnreachableTarget,
)
from .graph import CooperationGraph, EdgeFlow, StateRef, component_ids

# Per spec'd sampling policy: alias tables pay off only on dense neighborhoods.
_ALIAS_MIN_DEGREE = 9
_CHUNK = 8192
DEFAULT_MAX_STEPS = 10**6


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    """Per-state transition table of the canonical chain.

    Rows are padded to the maximum degree; `degree` gives the valid prefix
    length. States with degree above 8 carry Vose alias tables, the rest are
    sampled by cumulative scan.
    """

    graph: CooperationGraph
    degree: np.ndarray        # (n,)
    total_weight: np.ndarray  # (n,) sum of incident lambda
    nbr: np.ndarray           # (n, D) neighbor state ids
    edge: np.ndarray          # (n, D) stored edge ids
    sign: np.ndarray          # (n, D) +1 if stored orientation is (s, nbr)
    prob: np.ndarray          # (n, D) transition probabilities
    cum: np.ndarray           # (n, D) inclusive cumulative probs, padded 1
    use_alias: np.ndarray     # (n,) bool
    alias_q: np.ndarray       # (n, D) scaled acceptance probabilities
    alias_j: np.ndarray       # (n, D) alias indices
    component: np.ndarray     # (n,) connected component id

    @property
    def n_states(self) -> int:
        return self.graph.n_states

    def transition_probability(self, s: StateRef, t: StateRef) -> float:
        """p(s -> t); zero when the states are not adjacent."""
        g = self.graph
        a, b = g.index(s), g.index(t)
        try:
            e, _ = g.edge_id(a, b)
        except NotAnEdge:
            return 0.0
        return float(g.lam[e] / self.total_weight[a])

    def row(self, s: StateRef) -> tuple[np.ndarray, np.ndarray]:
        """(neighbor ids, probabilities) for one state."""
        i = self.graph.index(s)
        d = self.degree[i]
        return self.nbr[i, :d], self.prob[i, :d]


def _vose_tables(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = p.size
    q = p * d
    j = np.arange(d)
    small = [k for k in range(d) if q[k] < 1.0]
    large = [k for k in range(d) if q[k] >= 1.0]
    while small and large:
        s, l = small.pop(), large.pop()
        j[s] = l
        q[l] -= 1.0 - q[s]
        (small if q[l] < 1.0 else large).append(l)
    return q, j


def build_kernel(g: CooperationGraph) -> TransitionKernel:
    """Build the canonical transition kernel; every state needs a neighbor."""
    n = g.n_states
    degree = np.array([g.degree(s) for s in range(n)], dtype=np.int64)
    if np.any(degree == 0):
        s = int(np.argmin(degree))
        raise IsolatedState(f"state {g.labels[s]!r} has no incident edges")
    dmax = int(degree.max())
    nbr = np.zeros((n, dmax), dtype=np.int64)
    edge = np.zeros((n, dmax), dtype=np.int64)
    sign = np.zeros((n, dmax))
    prob = np.zeros((n, dmax))
    cum = np.ones((n, dmax))
    total = g.total_weight()
    use_alias = degree >= _ALIAS_MIN_DEGREE
    alias_q = np.ones((n, dmax))
    alias_j = np.zeros((n, dmax), dtype=np.int64)
    for s in range(n):
        nbrs, eids, sgns = g.incident(s)
        d = degree[s]
        nbr[s, :d], edge[s, :d], sign[s, :d] = nbrs, eids, sgns
        p = g.lam[eids] / total[s]
        prob[s, :d] = p
        c = np.cumsum(p)
        c[-1] = 1.0
        cum[s, :d] = c
        if use_alias[s]:
            alias_q[s, :d], alias_j[s, :d] = _vose_tables(p)
    return TransitionKernel(
        g, degree, total, nbr, edge, sign, prob, cum,
        use_alias, alias_q, alias_j, component_ids(g),
    )


def stationary_distribution(k: TransitionKernel) -> np.ndarray:
    """Stationary law pi with pi(S) proportional to total incident weight.

    Satisfies detailed balance pi(S) p(S,T) = pi(T) p(T,S) by construction.
    """
    if k.component.max() != 0:
        raise Disconnected("stationary distribution needs a connected graph")
    return k.total_weight / k.total_weight.sum()


def loop_probability(
    k: TransitionKernel, cycle: Sequence[StateRef]
) -> tuple[float, float]:
    """Probability of traversing a closed walk, and of its reversal."""
    g = k.graph
    states = [g.index(s) for s in cycle]
    if len(states) < 3 or states[0] != states[-1]:
        raise NotAWalk("cycle must be a closed walk with at least two steps")
    for a, b in zip(states, states[1:]):
        if not g.has_edge(a, b):
            raise NotAWalk(
                f"consecutive states {g.labels[a]!r}, {g.labels[b]!r} are not adjacent"
            )
    forward = math.prod(
        k.transition_probability(a, b) for a, b in zip(states, states[1:])
    )
    backward = math.prod(
        k.transition_probability(b, a) for a, b in zip(states, states[1:])
    )
    return forward, backward


@dataclass(frozen=True, eq=False)
class SampledPath:
    """State sequence of one chain run, stopped at the target or the step cap."""

    states: np.ndarray
    truncated: bool

    @property
    def hitting_time(self) -> int:
        """Number of steps taken (path length)."""
        return len(self.states) - 1


def _as_generator(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.Generator(np.random.Philox(rng_seed))


def sample_path(
    k: TransitionKernel,
    start: StateRef,
    target: StateRef,
    rng_seed: int | np.random.Generator | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> SampledPath:
    """Run the chain from `start` until it first visits `target`.

    Stops after `max_steps` moves and flags the path truncated if the target
    was not reached.
    """
    g = k.graph
    s, t = g.index(start), g.index(target)
    if k.component[s] != k.component[t]:
        raise UnreachableTarget(
            f"{g.labels[t]!r} is not reachable from {g.labels[s]!r}"
        )
    rng = _as_generator(rng_seed)
    states = [s]
    cur = s
    for _ in range(max_steps):
        if cur == t:
            break
        d = k.degree[cur]
        u = rng.random()
        if k.use_alias[cur]:
            j = int(u * d)
            if rng.random() >= k.alias_q[cur, j]:
                j = int(k.alias_j[cur, j])
        else:
            j = int(np.searchsorted(k.cum[cur, :d], u, side="right"))
        cur = int(k.nbr[cur, j])
        states.append(cur)
    return SampledPath(np.array(states, dtype=np.int64), cur != t)


def path_integral(path: SampledPath, f: EdgeFlow) -> float:
    """Sum of f along the path's moves; raises on truncated paths."""
    if path.truncated:
        raise TruncatedPath("cannot integrate a path that never reached its target")
    g = f.graph
    vals = f.values
    terms = []
    for a, b in zip(path.states, path.states[1:]):
        e, sign = g.edge_id(int(a), int(b))
        terms.append(sign * vals[e])
    return math.fsum(terms)


@dataclass(frozen=True)
class ValueEstimate:
    """Monte Carlo estimate of a path-integral value."""

    mean: float
    std_error: float
    n_paths: int        # paths contributing to the mean
    n_truncated: int    # paths dropped at the step cap
    seed: int

    def __str__(self) -> str:
        return (
            f"{self.mean:.6g} +/- {self.std_error:.2g} "
            f"({self.n_paths} paths, {self.n_truncated} truncated)"
        )


def _simulate_chunk(
    k: TransitionKernel,
    fvals: np.ndarray,
    s: int,
    t: int,
    n: int,
    rng: np.random.Generator,
    max_steps: int,
    antithetic: bool,
):
    """Advance n paths in lockstep; returns (integrals, taus, truncated mask)."""
    out = np.zeros(n)
    taus = np.zeros(n, dtype=np.int64)
    trunc = np.zeros(n, dtype=bool)
    if s == t:
        return out, taus, trunc
    idx = np.arange(n)
    cur = np.full(n, s, dtype=np.int64)
    acc = np.zeros(n)
    nbr, edge, sign = k.nbr, k.edge, k.sign
    cum, deg = k.cum, k.degree
    use_alias, aq, aj = k.use_alias, k.alias_q, k.alias_j
    step = 0
    while idx.size and step < max_steps:
        step += 1
        m = idx.size
        u1 = rng.random(m)
        u2 = rng.random(m)
        choice = np.empty(m, dtype=np.int64)
        am = use_alias[cur]
        if am.any():
            ca = cur[am]
            j = (u1[am] * deg[ca]).astype(np.int64)
            accept = u2[am] < aq[ca, j]
            choice[am] = np.where(accept, j, aj[ca, j])
        lm = ~am
        if lm.any():
            choice[lm] = (cum[cur[lm]] <= u1[lm, None]).sum(axis=1)
        e = edge[cur, choice]
        acc += sign[cur, choice] * fvals[e]
        nxt = nbr[cur, choice]
        if antithetic:
            returned = nxt == s
            if returned.any():
                acc[returned] = 0.0
        hit = nxt == t
        if hit.any():
            done = idx[hit]
            out[done] = acc[hit]
            taus[done] = step
            keep = ~hit
            idx, cur, acc = idx[keep], nxt[keep], acc[keep]
        else:
            cur = nxt
    trunc[idx] = True
    return out, taus, trunc


def _replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    # Counter-based Philox stream keyed by (master seed, replicate index).
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(replicate,)))
    )


def _run_chunks(k, fvals, s, t, n_paths, seed, max_steps, antithetic, workers):
    sizes = [_CHUNK] * (n_paths // _CHUNK)
    if n_paths % _CHUNK:
        sizes.append(n_paths % _CHUNK)

    def run(job):
        r, size = job
        return _simulate_chunk(
            k, fvals, s, t, size, _replicate_rng(seed, r), max_steps, antithetic
        )

    jobs = list(enumerate(sizes))
    n_workers = worker_cap(workers)
    if n_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    vals = np.concatenate([p[0] for p in parts])
    taus = np.concatenate([p[1] for p in parts])
    trunc = np.concatenate([p[2] for p in parts])
    return vals, taus, trunc


def estimate_value(
    f: EdgeFlow,
    g: CooperationGraph | None = None,
    start: StateRef = None,
    target: StateRef = None,
    n_paths: int = 10_000,
    seed: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
    *,
    antithetic: bool = False,
    workers: int | None = None,
    kernel: TransitionKernel | None = None,
) -> ValueEstimate:
    """Monte Carlo estimate of the expected path integral of f from start to target.

    Deterministic for a fixed seed regardless of worker count: replicate r
    draws from a Philox stream keyed by (seed, r) and results merge in
    replicate order. Truncated paths are excluded from the mean and counted.

    With `antithetic=True` each path is averaged with its loop-reversed
    pairing, which integrates f only over the segment after the path's last
    visit to the start state.
    """
    gg = f.graph if g is None else g
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    k = kernel if kernel is not None else build_kernel(gg)
    s, t = gg.index(start), gg.index(target)
    if k.component[s] != k.component[t]:
        raise UnreachableTarget(
            f"{gg.labels[t]!r} is not reachable from {gg.labels[s]!r}"
        )
    vals, _, trunc = _run_chunks(
        k, f.values, s, t, n_paths, seed, max_steps, antithetic, workers
    )
    used = vals[~trunc]
    n_trunc = int(trunc.sum())
    if used.size == 0:
        raise AllPathsTruncated(
            f"all {n_paths} paths hit the {max_steps}-step cap before the target"
        )
    mean = math.fsum(used) / used.size
    if used.size > 1:
        std_error = float(np.std(used, ddof=1) / math.sqrt(used.size))
    else:
        std_error = 0.0
    return ValueEstimate(mean, std_error, int(used.size), n_trunc, seed)


def sample_hitting_times(
    k: TransitionKernel,
    start: StateRef,
    target: StateRef,
    n_paths: int,
    seed: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> np.ndarray:
    """Hitting times of n independent paths (truncated ones excluded)."""
    g = k.graph
    s, t = g.index(start), g.index(target)
    if k.component[s] != k.component[t]:
        raise UnreachableTarget(
            f"{g.labels[t]!r} is not reachable from {g.labels[s]!r}"
        )
    zero_flow = np.zeros(g.n_edges)
    _, taus, trunc = _run_chunks(
        k, zero_flow, s, t, n_paths, seed, max_steps, False, None
    )
    return taus[~trunc]

"""Weighted cooperation graphs and the value/flow types living on them.

A cooperation graph is a finite set of states with oriented edges: at most
one of (S, T) and (T, S) is stored, and edge weights are symmetric. States
are interned to dense integer indices at validation time so that every
downstream solver and sampler can work with flat numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateEdge,
    DuplicateState,
    MissingNullState,
    NonpositiveWeight,
    NonzeroNullValue,
    NotAnEdge,
    SelfLoop,
)

StateRef = int | str


@dataclass(frozen=True, eq=False)
class CooperationGraph:
    """Immutable weighted graph over cooperation states.

    Attributes
    ----------
    labels : state labels; the index of a label is its state id.
    null_index : id of the distinguished null state.
    tails, heads : per-edge endpoint ids in the stored orientation.
    lam : per-edge weight (> 0), symmetric under orientation flip.
    mu : per-state weight (> 0), defaults to 1.
    """

    labels: tuple[str, ...]
    null_index: int
    tails: np.ndarray
    heads: np.ndarray
    lam: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        for arr in (self.tails, self.heads, self.lam, self.mu):
            arr.flags.writeable = False
        index = {lab: i for i, lab in enumerate(self.labels)}
        stored = {}
        for e in range(self.n_edges):
            stored[(int(self.tails[e]), int(self.heads[e]))] = e
        # CSR adjacency: incident (neighbor, edge, sign) per state, where
        # sign = +1 when the state is the tail of the stored edge.
        n, m = self.n_states, self.n_edges
        deg = np.zeros(n, dtype=np.int64)
        np.add.at(deg, self.tails, 1)
        np.add.at(deg, self.heads, 1)
        ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=ptr[1:])
        adj_state = np.zeros(m * 2, dtype=np.int64)
        adj_edge = np.zeros(m * 2, dtype=np.int64)
        adj_sign = np.zeros(m * 2, dtype=np.float64)
        fill = ptr[:-1].copy()
        for e in range(m):
            a, b = int(self.tails[e]), int(self.heads[e])
            adj_state[fill[a]], adj_edge[fill[a]], adj_sign[fill[a]] = b, e, 1.0
            fill[a] += 1
            adj_state[fill[b]], adj_edge[fill[b]], adj_sign[fill[b]] = a, e, -1.0
            fill[b] += 1
        for arr in (ptr, adj_state, adj_edge, adj_sign):
            arr.flags.writeable = False
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_stored", stored)
        object.__setattr__(self, "_adj_ptr", ptr)
        object.__setattr__(self, "_adj_state", adj_state)
        object.__setattr__(self, "_adj_edge", adj_edge)
        object.__setattr__(self, "_adj_sign", adj_sign)

    @property
    def n_states(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.tails)

    @property
    def null_label(self) -> str:
        return self.labels[self.null_index]

    def index(self, state: StateRef) -> int:
        """Resolve a label or integer id to the interned state id."""
        if isinstance(state, (int, np.integer)):
            i = int(state)
            if not 0 <= i < self.n_states:
                raise KeyError(f"state id {i} out of range")
            return i
        try:
            return self._index[state]
        except KeyError:
            raise KeyError(f"unknown state label {state!r}") from None

    def degree(self, s: StateRef) -> int:
        i = self.index(s)
        return int(self._adj_ptr[i + 1] - self._adj_ptr[i])

    def incident(self, s: StateRef) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays (neighbor states, edge ids, orientation signs) at `s`."""
        i = self.index(s)
        lo, hi = self._adj_ptr[i], self._adj_ptr[i + 1]
        return self._adj_state[lo:hi], self._adj_edge[lo:hi], self._adj_sign[lo:hi]

    def edge_id(self, s: StateRef, t: StateRef) -> tuple[int, float]:
        """Stored edge id and traversal sign for the ordered pair (s, t).

        Sign is +1 when (s, t) is the stored orientation, -1 when (t, s) is.
        Raises NotAnEdge when the states are not adjacent.
        """
        a, b = self.index(s), self.index(t)
        e = self._stored.get((a, b))
        if e is not None:
            return e, 1.0
        e = self._stored.get((b, a))
        if e is not None:
            return e, -1.0
        raise NotAnEdge(f"no edge between {self.labels[a]!r} and {self.labels[b]!r}")

    def has_edge(self, s: StateRef, t: StateRef) -> bool:
        a, b = self.index(s), self.index(t)
        return (a, b) in self._stored or (b, a) in self._stored

    def total_weight(self) -> np.ndarray:
        """Per-state sum of incident edge weights."""
        out = np.zeros(self.n_states)
        np.add.at(out, self.tails, self.lam)
        np.add.at(out, self.heads, self.lam)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, CooperationGraph):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.null_index == other.null_index
            and np.array_equal(self.tails, other.tails)
            and np.array_equal(self.heads, other.heads)
            and np.array_equal(self.lam, other.lam)
            and np.array_equal(self.mu, other.mu)
        )

    def __repr__(self) -> str:
        return (
            f"CooperationGraph({self.n_states} states, {self.n_edges} edges, "
            f"null={self.null_label!r})"
        )


def validate_graph(
    states: Sequence[str] | CooperationGraph,
    edges: Sequence[tuple[StateRef, StateRef]] | None = None,
    lam: float | Sequence[float] | Mapping[tuple[StateRef, StateRef], float] = 1.0,
    mu: float | Sequence[float] | Mapping[StateRef, float] | None = None,
    null_state: StateRef | None = None,
) -> CooperationGraph:
    """Validate raw states/edges/weights and intern them into a graph.

    `lam` may be a scalar (applied to every edge), a sequence aligned with
    `edges`, or a mapping keyed by edge pair. `mu` defaults to 1 everywhere.
    The null state defaults to the first state listed.
    """
    if isinstance(states, CooperationGraph):
        g = states
        return validate_graph(
            list(g.labels),
            [(int(a), int(b)) for a, b in zip(g.tails, g.heads)],
            list(g.lam),
            list(g.mu),
            null_state=g.null_index,
        )

    labels = tuple(str(s) for s in states)
    if not labels:
        raise MissingNullState("graph has no states")
    if len(set(labels)) != len(labels):
        seen = set()
        dup = next(l for l in labels if l in seen or seen.add(l))
        raise DuplicateState(f"state label {dup!r} occurs more than once")
    index = {lab: i for i, lab in enumerate(labels)}

    def resolve(ref: StateRef) -> int:
        if isinstance(ref, (int, np.integer)):
            i = int(ref)
            if not 0 <= i < len(labels):
                raise MissingNullState(f"state id {i} out of range")
            return i
        if str(ref) not in index:
            raise MissingNullState(f"unknown state {ref!r}")
        return index[str(ref)]

    if null_state is None:
        null_index = 0
    else:
        try:
            null_index = resolve(null_state)
        except MissingNullState:
            raise MissingNullState(f"null state {null_state!r} is not a state") from None

    edges = list(edges or [])
    m = len(edges)
    tails = np.zeros(m, dtype=np.int64)
    heads = np.zeros(m, dtype=np.int64)
    seen_pairs: dict[tuple[int, int], tuple] = {}
    for e, (a_ref, b_ref) in enumerate(edges):
        a, b = resolve(a_ref), resolve(b_ref)
        if a == b:
            raise SelfLoop(f"self-loop at state {labels[a]!r}")
        if (a, b) in seen_pairs or (b, a) in seen_pairs:
            raise DuplicateEdge(
                f"edge between {labels[a]!r} and {labels[b]!r} supplied twice"
            )
        seen_pairs[(a, b)] = (a_ref, b_ref)
        tails[e], heads[e] = a, b

    if isinstance(lam, Mapping):
        lam_arr = np.zeros(m)
        remaining = dict(lam)
        for e, pair in enumerate(edges):
            a_ref, b_ref = pair
            for key in ((a_ref, b_ref), (b_ref, a_ref)):
                if key in remaining:
                    lam_arr[e] = remaining[key]
                    break
            else:
                raise NonpositiveWeight(f"no weight given for edge {pair!r}")
    elif np.isscalar(lam):
        lam_arr = np.full(m, float(lam))
    else:
        lam_arr = np.asarray(lam, dtype=np.float64).copy()
        if lam_arr.shape != (m,):
            raise DimensionMismatch(f"lam has length {lam_arr.size}, expected {m}")
    if np.any(lam_arr <= 0) or not np.all(np.isfinite(lam_arr)):
        bad = int(np.argmin(lam_arr))
        raise NonpositiveWeight(
            f"edge weight must be strictly positive, got {lam_arr[bad]} on edge "
            f"({labels[tails[bad]]!r}, {labels[heads[bad]]!r})"
        )

    n = len(labels)
    if mu is None:
        mu_arr = np.ones(n)
    elif isinstance(mu, Mapping):
        mu_arr = np.ones(n)
        for ref, w in mu.items():
            mu_arr[resolve(ref)] = w
    elif np.isscalar(mu):
        mu_arr = np.full(n, float(mu))
    else:
        mu_arr = np.asarray(mu, dtype=np.float64).copy()
        if mu_arr.shape != (n,):
            raise DimensionMismatch(f"mu has length {mu_arr.size}, expected {n}")
    if np.any(mu_arr <= 0) or not np.all(np.isfinite(mu_arr)):
        raise NonpositiveWeight("vertex weight must be strictly positive")

    return CooperationGraph(labels, null_index, tails, heads, lam_arr, mu_arr)


@dataclass(frozen=True, eq=False)
class GameValues:
    """Real-valued game on the states of a graph, zero at the null state."""

    graph: CooperationGraph
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.graph.n_states,):
            raise DimensionMismatch(
                f"got {vals.size} values for {self.graph.n_states} states"
            )
        if vals[self.graph.null_index] != 0.0:
            raise NonzeroNullValue(
                f"value at null state must be 0, got {vals[self.graph.null_index]}"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __getitem__(self, state: StateRef) -> float:
        return float(self.values[self.graph.index(state)])


@dataclass(frozen=True, eq=False)
class EdgeFlow:
    """Antisymmetric function on edges: f(T, S) = -f(S, T).

    Values are stored for the stored orientation only; `flow_value` resolves
    queries on either orientation.
    """

    graph: CooperationGraph
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.graph.n_edges,):
            raise DimensionMismatch(
                f"got {vals.size} flow values for {self.graph.n_edges} edges"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def value(self, s: StateRef, t: StateRef) -> float:
        return flow_value(self, s, t)

    def __add__(self, other: "EdgeFlow") -> "EdgeFlow":
        _check_same_graph(self, other)
        return EdgeFlow(self.graph, self.values + other.values)

    def __sub__(self, other: "EdgeFlow") -> "EdgeFlow":
        _check_same_graph(self, other)
        return EdgeFlow(self.graph, self.values - other.values)

    def __mul__(self, scalar: float) -> "EdgeFlow":
        return EdgeFlow(self.graph, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "EdgeFlow":
        return EdgeFlow(self.graph, -self.values)


def _check_same_graph(a, b) -> None:
    if a.graph is not b.graph and a.graph != b.graph:
        raise DimensionMismatch("operands are defined on different graphs")


def flow_value(f: EdgeFlow, s: StateRef, t: StateRef) -> float:
    """Flow on the ordered pair (s, t); negated when (t, s) is the stored edge."""
    e, sign = f.graph.edge_id(s, t)
    return float(sign * f.values[e])


@dataclass(frozen=True, eq=False)
class ContributionProfile:
    """One contribution flow per player, all on the same graph."""

    flows: tuple[EdgeFlow, ...]

    def __post_init__(self):
        if not self.flows:
            raise DimensionMismatch("profile needs at least one player flow")
        g = self.flows[0].graph
        for f in self.flows[1:]:
            if f.graph is not g and f.graph != g:
                raise DimensionMismatch("player flows live on different graphs")
        object.__setattr__(self, "flows", tuple(self.flows))

    @property
    def graph(self) -> CooperationGraph:
        return self.flows[0].graph

    @property
    def n_players(self) -> int:
        return len(self.flows)

    def __getitem__(self, i: int) -> EdgeFlow:
        return self.flows[i]

    def __iter__(self):
        return iter(self.flows)

    def summed(self) -> EdgeFlow:
        """Edgewise sum of all player flows."""
        total = np.zeros(self.graph.n_edges)
        for f in self.flows:
            total += f.values
        return EdgeFlow(self.graph, total)


def connected_components(g: CooperationGraph) -> list[list[int]]:
    """Partition of state ids by undirected reachability.

    Components are ordered by their smallest state id; ids inside a
    component are sorted ascending.
    """
    n = g.n_states
    seen = np.zeros(n, dtype=bool)
    components: list[list[int]] = []
    for root in range(n):
        if seen[root]:
            continue
        stack = [root]
        seen[root] = True
        comp = []
        while stack:
            s = stack.pop()
            comp.append(s)
            nbrs, _, _ = g.incident(s)
            for t in nbrs:
                if not seen[t]:
                    seen[t] = True
                    stack.append(int(t))
        components.append(sorted(comp))
    return components


def component_ids(g: CooperationGraph) -> np.ndarray:
    """Per-state component number, following connected_components order."""
    ids = np.zeros(g.n_states, dtype=np.int64)
    for k, comp in enumerate(connected_components(g)):
        ids[comp] = k
    return ids

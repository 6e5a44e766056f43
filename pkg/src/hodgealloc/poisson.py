"""Per-player allocation by solving the graph Poisson equation.

Each player's contribution flow f_i induces a component game v_i, the
anchored solution of  d*d v_i = d* f_i.  The vertex weight mu drops out of
that equation, so solves run in the mu=1 formulation. The module also
carries the revenue computations built on top of the allocation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _solver
from ._workers import worker_cap
from .errors import DuplicateAnchor, MissingAnchor, UnreachableTarget
from .graph import (
    ContributionProfile,
    CooperationGraph,
    EdgeFlow,
    GameValues,
    StateRef,
    component_ids,
    connected_components,
)


@dataclass(frozen=True)
class SolverConfig:
    """Central tolerance policy for the allocation solves."""

    solver_tol: float = 1e-10
    check_tol: float = 1e-9
    max_iter_factor: int = 50
    dense_fallback_states: int = 2000


DEFAULT_CONFIG = SolverConfig()


def _resolve_anchors(
    g: CooperationGraph,
    anchors: Mapping[StateRef, float] | None,
) -> tuple[np.ndarray, np.ndarray]:
    """Normalize anchors to (state ids, values), one per component.

    Default: value 0 at the null state's component via the null state, and at
    the smallest state id of every other component.
    """
    comps = connected_components(g)
    if anchors is None:
        states = []
        for comp in comps:
            states.append(g.null_index if g.null_index in comp else comp[0])
        return np.array(states, dtype=np.int64), np.zeros(len(states))

    ids = [g.index(s) for s in anchors.keys()]
    vals = np.array([float(v) for v in anchors.values()])
    if len(set(ids)) != len(ids):
        raise DuplicateAnchor("same state anchored twice")
    comp_of = component_ids(g)
    per_comp = np.zeros(len(comps), dtype=np.int64)
    for i in ids:
        per_comp[comp_of[i]] += 1
    if np.any(per_comp > 1):
        k = int(np.argmax(per_comp))
        raise DuplicateAnchor(f"component {k} has {per_comp[k]} anchors")
    if np.any(per_comp == 0):
        k = int(np.argmin(per_comp))
        raise MissingAnchor(f"component containing state {comps[k][0]} has no anchor")
    return np.array(ids, dtype=np.int64), vals


def solve_poisson(
    f: EdgeFlow,
    g: CooperationGraph | None = None,
    anchors: Mapping[StateRef, float] | None = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Solve d*d u = d* f with one anchored value per connected component.

    Returns the unique vertex function u with u(anchor) = value for every
    anchor. The result does not depend on the vertex weight mu.
    """
    gg = f.graph if g is None else g
    states, values = _resolve_anchors(gg, anchors)
    return _solver.solve_anchored(
        gg,
        _solver.divergence_unit_mu(gg, f.values),
        states,
        values,
        tol=config.solver_tol,
        max_iter_factor=config.max_iter_factor,
        dense_fallback_states=config.dense_fallback_states,
    )


@dataclass(frozen=True)
class ComponentGameSolution:
    """Allocation for every player: values[i] is player i's game on the states."""

    graph: CooperationGraph
    values: np.ndarray          # (n_players, n_states)
    residuals: np.ndarray       # per-player scaled residual of the solve
    anchor_states: np.ndarray
    anchor_values: np.ndarray

    @property
    def n_players(self) -> int:
        return self.values.shape[0]

    def player(self, i: int) -> np.ndarray:
        return self.values[i]

    def total(self) -> np.ndarray:
        """Sum of all players' allocations, state by state."""
        return self.values.sum(axis=0)


def component_allocation(
    profile: ContributionProfile,
    g: CooperationGraph | None = None,
    anchors: Mapping[StateRef, float] | None = None,
    config: SolverConfig = DEFAULT_CONFIG,
    workers: int | None = None,
) -> ComponentGameSolution:
    """Solve the Poisson equation for every player flow in the profile.

    Anchors default to 0 at the null state (and at the smallest state of any
    other component). Per-player solves are independent; `workers` > 1 runs
    them in a thread pool without changing the result.
    """
    gg = profile.graph if g is None else g
    states, anchor_vals = _resolve_anchors(gg, anchors)

    def solve_one(f: EdgeFlow) -> np.ndarray:
        return _solver.solve_anchored(
            gg,
            _solver.divergence_unit_mu(gg, f.values),
            states,
            anchor_vals,
            tol=config.solver_tol,
            max_iter_factor=config.max_iter_factor,
            dense_fallback_states=config.dense_fallback_states,
        )

    n_workers = worker_cap(workers)
    if n_workers > 1 and profile.n_players > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            solved = list(pool.map(solve_one, profile.flows))
    else:
        solved = [solve_one(f) for f in profile.flows]

    values = np.stack(solved)
    residuals = np.array(
        [
            _solver.scaled_residual(gg, u, _solver.divergence_unit_mu(gg, f.values))
            for u, f in zip(values, profile.flows)
        ]
    )
    return ComponentGameSolution(gg, values, residuals, states, anchor_vals)


def _require_reachable(g: CooperationGraph, a: int, b: int) -> None:
    comp = component_ids(g)
    if comp[a] != comp[b]:
        raise UnreachableTarget(
            f"states {g.labels[a]!r} and {g.labels[b]!r} are in different components"
        )


def expected_revenue(
    v: GameValues,
    profile: ContributionProfile,
    g: CooperationGraph | None = None,
    target: StateRef = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> float:
    """Expected surplus v(F) minus total expected payout at the target F.

    The payout to player i is their allocation value v_i(F), so the result
    is v(F) - sum_i v_i(F) for a project started at the null state.
    """
    gg = profile.graph if g is None else g
    t = gg.index(target)
    _require_reachable(gg, gg.null_index, t)
    sol = component_allocation(profile, gg, config=config)
    return float(v.values[t] - sol.total()[t])


def mid_project_revenue(
    v: GameValues,
    profile: ContributionProfile,
    g: CooperationGraph | None = None,
    at: StateRef = None,
    target: StateRef = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> float:
    """Expected surplus of continuing from state `at` to `target`.

    Uses the transition identity: the expected payout from T onward is
    v_i(F) - v_i(T), so the result is v(F) - v(T) - sum_i (v_i(F) - v_i(T)).
    """
    gg = profile.graph if g is None else g
    t0, t1 = gg.index(at), gg.index(target)
    _require_reachable(gg, t0, t1)
    _require_reachable(gg, gg.null_index, t1)
    sol = component_allocation(profile, gg, config=config)
    total = sol.total()
    return float(v.values[t1] - v.values[t0] - (total[t1] - total[t0]))

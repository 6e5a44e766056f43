"""Weighted discrete vector calculus on cooperation graphs.

Vertex functions are plain numpy arrays indexed by state id. The gradient
maps them to edge flows, du(S,T) = u(T) - u(S); its adjoint under the
mu/lambda weighted inner products is the divergence

    d*f(S) = sum over neighbors T of  lambda(T,S) / mu(S) * f(T,S).

`hodge_decompose` splits any flow into a gradient part and a
divergence-free remainder (orthogonal under the lambda inner product).
"""

from __future__ import annotations

import numpy as np

from . import _solver
from .errors import DimensionMismatch
from .graph import CooperationGraph, EdgeFlow, connected_components


def _as_vertex(u, g: CooperationGraph) -> np.ndarray:
    arr = np.asarray(u, dtype=np.float64)
    if arr.shape != (g.n_states,):
        raise DimensionMismatch(
            f"vertex function has {arr.size} entries for {g.n_states} states"
        )
    return arr


def _flow_graph(f: EdgeFlow, g: CooperationGraph | None) -> CooperationGraph:
    if g is not None and f.graph is not g and f.graph != g:
        raise DimensionMismatch("flow is defined on a different graph")
    return f.graph


def inner_product_states(u, v, g: CooperationGraph) -> float:
    """mu-weighted inner product of two vertex functions."""
    uu, vv = _as_vertex(u, g), _as_vertex(v, g)
    return float(np.dot(g.mu * uu, vv))


def inner_product_flows(f: EdgeFlow, h: EdgeFlow, g: CooperationGraph | None = None) -> float:
    """lambda-weighted inner product of two flows (orientation independent)."""
    gg = _flow_graph(f, g)
    _flow_graph(h, gg)
    return float(np.dot(gg.lam * f.values, h.values))


def gradient(u, g: CooperationGraph) -> EdgeFlow:
    """Edge flow du with du(S,T) = u(T) - u(S) on every stored edge."""
    uu = _as_vertex(u, g)
    return EdgeFlow(g, uu[g.heads] - uu[g.tails])


def divergence(f: EdgeFlow, g: CooperationGraph | None = None) -> np.ndarray:
    """Adjoint of the gradient; zero exactly on divergence-free flows."""
    gg = _flow_graph(f, g)
    return _solver.divergence_unit_mu(gg, f.values) / gg.mu


def laplacian_apply(u, g: CooperationGraph) -> np.ndarray:
    """divergence(gradient(u)), fused into one pass."""
    uu = _as_vertex(u, g)
    return _solver.laplacian_unit_mu(g, uu) / g.mu


def hodge_decompose(
    f: EdgeFlow, g: CooperationGraph | None = None, *, tol: float = 1e-10
) -> tuple[np.ndarray, EdgeFlow]:
    """Split f into a gradient part and a divergence-free part.

    Returns (u, h) with f = gradient(u) + h, divergence(h) = 0, and
    <du, h> = 0 under the lambda inner product. u is anchored to zero at the
    smallest state id of each connected component.
    """
    gg = _flow_graph(f, g)
    anchors = np.array([comp[0] for comp in connected_components(gg)], dtype=np.int64)
    u = _solver.solve_anchored(
        gg,
        _solver.divergence_unit_mu(gg, f.values),
        anchors,
        np.zeros(anchors.size),
        tol=tol,
    )
    h = EdgeFlow(gg, f.values - (u[gg.heads] - u[gg.tails]))
    return u, h

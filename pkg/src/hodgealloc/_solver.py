"""Anchored conjugate-gradient solver for the graph Poisson equation.

Solves L u = b where L is the (unit vertex weight) graph Laplacian, with the
value of u pinned at one anchor state per connected component. Pinning makes
the free block of L positive definite on each component, so plain CG with a
Jacobi preconditioner converges; a dense factorization backs it up on small
graphs if the iteration stalls.
"""

from __future__ import annotations

import numpy as np

from .errors import SolverDidNotConverge
from .graph import CooperationGraph

# Iteration cap is max_iter_factor * n_states; residuals are measured in the
# infinity norm after scaling each row by its Laplacian diagonal.
MAX_ITER_FACTOR = 50
DENSE_FALLBACK_STATES = 2000


def laplacian_unit_mu(g: CooperationGraph, u: np.ndarray) -> np.ndarray:
    """Apply the mu=1 weighted Laplacian matrix-free."""
    w = g.lam * (u[g.heads] - u[g.tails])
    out = np.zeros(g.n_states)
    np.add.at(out, g.heads, w)
    np.subtract.at(out, g.tails, w)
    return out


def divergence_unit_mu(g: CooperationGraph, fvals: np.ndarray) -> np.ndarray:
    """Divergence of an edge flow with mu=1 (flow values in stored orientation)."""
    w = g.lam * fvals
    out = np.zeros(g.n_states)
    np.add.at(out, g.heads, w)
    np.subtract.at(out, g.tails, w)
    return out


def scaled_residual(g: CooperationGraph, u: np.ndarray, rhs: np.ndarray) -> float:
    """Max residual of L u = rhs after dividing rows by the Laplacian diagonal."""
    diag = g.total_weight()
    safe = np.where(diag > 0, diag, 1.0)
    return float(np.max(np.abs(laplacian_unit_mu(g, u) - rhs) / safe))


def solve_anchored(
    g: CooperationGraph,
    rhs: np.ndarray,
    anchor_states: np.ndarray,
    anchor_values: np.ndarray,
    *,
    tol: float = 1e-10,
    max_iter_factor: int = MAX_ITER_FACTOR,
    dense_fallback_states: int = DENSE_FALLBACK_STATES,
) -> np.ndarray:
    """Solve L u = rhs with u fixed to anchor_values at anchor_states.

    The caller must supply exactly one anchor per connected component; the
    solution is then unique. rhs must be a divergence (sums to zero per
    component), which every right-hand side built from an edge flow is.
    """
    n = g.n_states
    u = np.zeros(n)
    u[anchor_states] = anchor_values
    free = np.ones(n, dtype=bool)
    free[anchor_states] = False
    fidx = np.flatnonzero(free)
    if fidx.size == 0:
        return u

    b = (rhs - laplacian_unit_mu(g, u))[fidx]
    diag_full = g.total_weight()
    diag = diag_full[fidx]

    def apply_free(x: np.ndarray) -> np.ndarray:
        w = np.zeros(n)
        w[fidx] = x
        return laplacian_unit_mu(g, w)[fidx]

    # Jacobi-preconditioned CG on the pinned system.
    x = np.zeros(fidx.size)
    r = b.copy()
    target = 0.5 * tol
    converged = float(np.max(np.abs(r) / diag)) <= target
    if not converged:
        z = r / diag
        p = z.copy()
        rz = float(r @ z)
        for _ in range(max_iter_factor * n):
            ap = apply_free(p)
            pap = float(p @ ap)
            if pap <= 0.0:
                break
            alpha = rz / pap
            x += alpha * p
            r -= alpha * ap
            if float(np.max(np.abs(r) / diag)) <= target:
                converged = True
                break
            z = r / diag
            rz_new = float(r @ z)
            p = z + (rz_new / rz) * p
            rz = rz_new

    if converged:
        u[fidx] = x
        if scaled_residual(g, u, rhs) <= tol:
            return u

    # CG stalled or lost accuracy; factorize densely on small graphs.
    if n <= dense_fallback_states:
        dense = np.zeros((fidx.size, fidx.size))
        pos = -np.ones(n, dtype=np.int64)
        pos[fidx] = np.arange(fidx.size)
        for tail, head, w in zip(g.tails, g.heads, g.lam):
            ia, ib = pos[tail], pos[head]
            if ia >= 0:
                dense[ia, ia] += w
            if ib >= 0:
                dense[ib, ib] += w
            if ia >= 0 and ib >= 0:
                dense[ia, ib] -= w
                dense[ib, ia] -= w
        u[fidx] = np.linalg.solve(dense, b)
        if scaled_residual(g, u, rhs) <= tol:
            return u

    raise SolverDidNotConverge(
        f"Poisson solve did not reach scaled residual {tol:g} "
        f"on a graph with {n} states"
    )

"""Shared random-instance builders for the test suite."""

import numpy as np

from hodgealloc import ContributionProfile, EdgeFlow, GameValues, validate_graph


def random_connected_graph(
    rng, n_states, extra_edges=None, weighted_mu=False, lam_range=(0.1, 10.0)
):
    """Random spanning tree plus extra chords, random orientations and weights."""
    edges = []
    for t in range(1, n_states):
        edges.append((int(rng.integers(0, t)), t))
    if extra_edges is None:
        extra_edges = n_states
    present = set(edges)
    attempts = 0
    while len(edges) < n_states - 1 + extra_edges and attempts < 100 * (extra_edges + 1):
        attempts += 1
        a, b = (int(x) for x in rng.integers(0, n_states, size=2))
        if a == b or (a, b) in present or (b, a) in present:
            continue
        present.add((a, b))
        edges.append((a, b))
    oriented = [(b, a) if rng.random() < 0.5 else (a, b) for a, b in edges]
    lam = rng.uniform(*lam_range, size=len(oriented))
    mu = rng.uniform(0.2, 5.0, size=n_states) if weighted_mu else None
    labels = [f"s{i}" for i in range(n_states)]
    return validate_graph(labels, oriented, lam, mu, null_state="s0")


def random_flow(rng, g, scale=1.0):
    return EdgeFlow(g, rng.normal(scale=scale, size=g.n_edges))


def random_profile(rng, g, n_players, scale=1.0):
    return ContributionProfile(
        tuple(random_flow(rng, g, scale) for _ in range(n_players))
    )


def random_game_values(rng, g, scale=1.0):
    vals = rng.normal(scale=scale, size=g.n_states)
    vals[g.null_index] = 0.0
    return GameValues(g, vals)


def triangle_graph(lam=(1.0, 2.0, 3.0)):
    """Triangle A-B-C with lam(A,B), lam(B,C), lam(C,A)."""
    return validate_graph(
        ["A", "B", "C"], [("A", "B"), ("B", "C"), ("C", "A")], list(lam)
    )


def path_graph(labels=("o", "A", "B"), lam=1.0):
    edges = [(labels[i], labels[i + 1]) for i in range(len(labels) - 1)]
    return validate_graph(list(labels), edges, lam)

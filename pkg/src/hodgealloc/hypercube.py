"""Coalition lattices, contribution schemes, and the classical Shapley value.

Coalitions of [N] are encoded as bitmasks; the hypercube graph built here
interns state `mask` at index `mask`, so coalition arithmetic works directly
on state ids. Players are indexed 0..N-1 in code (displayed 1-based).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .calculus import gradient
from .errors import (
    DimensionMismatch,
    InvalidEdge,
    NonzeroNullValue,
    PlayerOutOfRange,
    TooLarge,
)
from .graph import (
    ContributionProfile,
    CooperationGraph,
    EdgeFlow,
    GameValues,
    validate_graph,
)

MAX_HYPERCUBE_PLAYERS = 20
MAX_INCLUSION_PLAYERS = 12
MAX_PERMUTATION_PLAYERS = 10


def coalition_label(mask: int) -> str:
    """Canonical label for a coalition bitmask: "{}", "{1}", "{1,3}", ..."""
    players = [str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1]
    return "{" + ",".join(players) + "}"


def parse_coalition_label(label: str) -> int:
    """Inverse of coalition_label; raises ValueError on malformed labels."""
    body = label.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"not a coalition label: {label!r}")
    body = body[1:-1].strip()
    if not body:
        return 0
    mask = 0
    for part in body.split(","):
        i = int(part)
        if i < 1:
            raise ValueError(f"players are numbered from 1: {label!r}")
        mask |= 1 << (i - 1)
    return mask


@dataclass(frozen=True, eq=False)
class CoalitionGame:
    """Game on all subsets of [N], indexed by bitmask; value 0 at the empty set."""

    n_players: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (1 << self.n_players,):
            raise DimensionMismatch(
                f"need {1 << self.n_players} subset values, got {vals.size}"
            )
        if vals[0] != 0.0:
            raise NonzeroNullValue("empty coalition must have value 0")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, n_players: int, fn: Callable[[frozenset[int]], float]):
        """Build from a callable on frozensets of 0-based players."""
        vals = np.zeros(1 << n_players)
        for mask in range(1 << n_players):
            members = frozenset(i for i in range(n_players) if mask >> i & 1)
            vals[mask] = fn(members)
        return cls(n_players, vals)

    @property
    def grand_mask(self) -> int:
        return (1 << self.n_players) - 1

    def __getitem__(self, mask: int) -> float:
        return float(self.values[mask])


def glove_game() -> CoalitionGame:
    """Three players; a coalition is worth 1 iff it pairs the single left
    glove (player 1) with a right glove (player 2 or 3)."""
    return CoalitionGame.from_function(
        3, lambda s: 1.0 if 0 in s and (1 in s or 2 in s) else 0.0
    )


def build_hypercube(
    n_players: int,
    lambda_fn: Callable[[int, int], float] | None = None,
) -> CooperationGraph:
    """Coalition graph with an edge (S, S + {i}) for every i not in S.

    State `mask` is interned at index `mask`; edges are oriented by
    inclusion. Edge weights default to 1, or come from lambda_fn(s, t).
    """
    if not 1 <= n_players <= MAX_HYPERCUBE_PLAYERS:
        raise TooLarge(f"hypercube supports 1..{MAX_HYPERCUBE_PLAYERS} players")
    states = [coalition_label(m) for m in range(1 << n_players)]
    edges = []
    lam = []
    for s in range(1 << n_players):
        for i in range(n_players):
            if not s >> i & 1:
                t = s | 1 << i
                edges.append((s, t))
                lam.append(1.0 if lambda_fn is None else float(lambda_fn(s, t)))
    return validate_graph(states, edges, lam, null_state=0)


def build_inclusion_graph(
    n_players: int,
    pair_predicate: Callable[[int, int], bool] | None = None,
    lambda_fn: Callable[[int, int], float] | None = None,
) -> CooperationGraph:
    """Extended coalition graph with an edge for every strict inclusion S < T.

    `pair_predicate(s, t)` may drop inclusion pairs; weights as in
    build_hypercube. Lets several players join (or leave, via reverse
    traversal) in one transition.
    """
    if not 1 <= n_players <= MAX_INCLUSION_PLAYERS:
        raise TooLarge(f"inclusion graph supports 1..{MAX_INCLUSION_PLAYERS} players")
    full = (1 << n_players) - 1
    states = [coalition_label(m) for m in range(1 << n_players)]
    edges = []
    lam = []
    for s in range(1 << n_players):
        # enumerate strict supersets: t = s | nonempty subset of the complement
        comp = full ^ s
        add = comp
        while add:
            t = s | add
            if pair_predicate is None or pair_predicate(s, t):
                edges.append((s, t))
                lam.append(1.0 if lambda_fn is None else float(lambda_fn(s, t)))
            add = (add - 1) & comp
    return validate_graph(states, edges, lam, null_state=0)


def _check_player(game: CoalitionGame, i: int) -> None:
    if not 0 <= i < game.n_players:
        raise PlayerOutOfRange(
            f"player {i} not in 0..{game.n_players - 1}"
        )


def _check_cube_graph(game: CoalitionGame, g: CooperationGraph) -> None:
    if g.n_states != 1 << game.n_players:
        raise DimensionMismatch(
            f"graph has {g.n_states} states, game needs {1 << game.n_players}"
        )


def _state_masks(g: CooperationGraph, state_masks) -> np.ndarray:
    # default: graphs from the builders intern state `mask` at index `mask`
    if state_masks is None:
        return np.arange(g.n_states, dtype=np.int64)
    masks = np.asarray(state_masks, dtype=np.int64)
    if masks.shape != (g.n_states,):
        raise DimensionMismatch("state_masks must give one coalition per state")
    return masks


def partial_flow_classic(
    game: CoalitionGame, i: int, g: CooperationGraph, state_masks=None
) -> EdgeFlow:
    """Marginal-contribution flow of player i on the hypercube.

    Equals the game's gradient on edges adding player i, zero on edges
    adding any other player. `state_masks` maps state ids to coalition
    bitmasks when the graph was not built in mask order.
    """
    _check_player(game, i)
    _check_cube_graph(game, g)
    masks = _state_masks(g, state_masks)
    vals = np.zeros(g.n_edges)
    for e, (s_id, t_id) in enumerate(zip(g.tails, g.heads)):
        s, t = int(masks[s_id]), int(masks[t_id])
        added = s ^ t
        if added & (added - 1) or not t > s:
            raise InvalidEdge(
                f"edge ({g.labels[s_id]}, {g.labels[t_id]}) does not add exactly one player"
            )
        if added == 1 << i:
            vals[e] = game.values[t] - game.values[s]
    return EdgeFlow(g, vals)


def partial_flow_extended(
    game: CoalitionGame, i: int, extended_graph: CooperationGraph, state_masks=None
) -> EdgeFlow:
    """Surplus-sharing flow on an inclusion graph.

    On an edge (S, T) with S < T the surplus v(T) - v(S) is split equally
    among the newly joining players T - S; players already in S get zero.
    """
    _check_player(game, i)
    _check_cube_graph(game, extended_graph)
    g = extended_graph
    masks = _state_masks(g, state_masks)
    vals = np.zeros(g.n_edges)
    bit = 1 << i
    for e, (s_id, t_id) in enumerate(zip(g.tails, g.heads)):
        s, t = int(masks[s_id]), int(masks[t_id])
        if s & t != s or s == t:
            raise InvalidEdge(
                f"edge ({g.labels[s_id]}, {g.labels[t_id]}) is not a strict inclusion"
            )
        if t & bit and not s & bit:
            vals[e] = (game.values[t] - game.values[s]) / (
                t.bit_count() - s.bit_count()
            )
    return EdgeFlow(g, vals)


def equal_split_flow(
    v: GameValues, n_players: int, g: CooperationGraph | None = None
) -> ContributionProfile:
    """Every player receives dv/N on every edge, on any cooperation graph."""
    gg = v.graph if g is None else g
    if n_players < 1:
        raise PlayerOutOfRange("need at least one player")
    share = gradient(v.values, gg) * (1.0 / n_players)
    return ContributionProfile(tuple(share for _ in range(n_players)))


def hypercube_game_values(
    game: CoalitionGame, g: CooperationGraph, state_masks=None
) -> GameValues:
    """View a coalition game as GameValues on a coalition-labeled graph."""
    _check_cube_graph(game, g)
    masks = _state_masks(g, state_masks)
    return GameValues(g, game.values[masks])


def classic_profile(
    game: CoalitionGame, g: CooperationGraph, state_masks=None
) -> ContributionProfile:
    """All players' marginal-contribution flows on the hypercube."""
    return ContributionProfile(
        tuple(
            partial_flow_classic(game, i, g, state_masks)
            for i in range(game.n_players)
        )
    )


def extended_profile(
    game: CoalitionGame, g: CooperationGraph, state_masks=None
) -> ContributionProfile:
    """All players' surplus-sharing flows on an inclusion graph."""
    return ContributionProfile(
        tuple(
            partial_flow_extended(game, i, g, state_masks)
            for i in range(game.n_players)
        )
    )


def _shapley_weights(n: int) -> list[Fraction]:
    # weight(|S|) = |S|! (n-1-|S|)! / n!, computed exactly
    nf = math.factorial(n)
    return [
        Fraction(math.factorial(s) * math.factorial(n - 1 - s), nf)
        for s in range(n)
    ]


def shapley_closed_form(game: CoalitionGame, i: int, exact: bool = False):
    """Shapley value of player i via the subset-weighted marginal sum.

    With exact=True the result is a Fraction computed in rational
    arithmetic (game values converted exactly from their float encoding).
    """
    _check_player(game, i)
    n = game.n_players
    weights = _shapley_weights(n)
    bit = 1 << i
    if exact:
        total = Fraction(0)
        for s in range(1 << n):
            if s & bit:
                continue
            marginal = Fraction(game.values[s | bit]) - Fraction(game.values[s])
            total += weights[s.bit_count()] * marginal
        return total
    wf = [float(w) for w in weights]
    total = 0.0
    for s in range(1 << n):
        if s & bit:
            continue
        total += wf[s.bit_count()] * (game.values[s | bit] - game.values[s])
    return float(total)


def shapley_permutation(game: CoalitionGame, i: int, exact: bool = False):
    """Shapley value of player i averaged over all N! joining orders."""
    _check_player(game, i)
    n = game.n_players
    if n > MAX_PERMUTATION_PLAYERS:
        raise TooLarge(
            f"permutation form enumerates N! orders; N <= {MAX_PERMUTATION_PLAYERS}"
        )
    convert = Fraction if exact else float
    total = convert(0)
    for order in itertools.permutations(range(n)):
        before = 0
        for j in order:
            if j == i:
                break
            before |= 1 << j
        total += convert(game.values[before | 1 << i]) - convert(game.values[before])
    if exact:
        return total / math.factorial(n)
    return total / math.factorial(n)


def shapley_values(game: CoalitionGame, exact: bool = False):
    """Closed-form Shapley values of all players."""
    vals = [shapley_closed_form(game, i, exact) for i in range(game.n_players)]
    return vals if exact else np.array(vals)

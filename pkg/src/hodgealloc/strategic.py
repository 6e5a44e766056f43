"""Strategic games: threat powers, the Kohlberg-Neyman value, and its
dynamic extension to partial coalitions.

The threat power of a coalition S is the value of the zero-sum matrix game
where S plays correlated strategies over its joint pure actions to maximize
(sum of S's payoffs) - (sum of the complement's payoffs). It is antisymmetric
under complementation, which turns the threat table into a coalition game
whose Shapley value is the Kohlberg-Neyman allocation; solving the
allocation Poisson equation on the hypercube extends it to every coalition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AntisymmetryViolated, LPNumericalFailure, TooLarge
from .hypercube import (
    CoalitionGame,
    build_hypercube,
    classic_profile,
    shapley_closed_form,
)
from .poisson import ComponentGameSolution, component_allocation

MAX_KN_PLAYERS = 8
MAX_ORDERING_PLAYERS = 6
ANTISYMMETRY_TOL = 1e-7
_LP_PIVOT_TOL = 1e-12
_CERTIFICATE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class StrategicGame:
    """N players with finite pure-strategy sets and a payoff tensor per player.

    payoffs[i] has one axis per player, sized by that player's strategy
    count; payoffs[i][a] is player i's payoff at the joint pure profile a.
    """

    payoffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.payoffs, dtype=np.float64)
        if arr.ndim != arr.shape[0] + 1:
            raise ValueError(
                f"payoff tensor must be (N, |A^1|, ..., |A^N|); got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("payoffs must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "payoffs", arr)

    @classmethod
    def from_tables(cls, tables: Sequence) -> "StrategicGame":
        """Build from one nested payoff array per player."""
        return cls(np.array(tables, dtype=np.float64))

    @property
    def n_players(self) -> int:
        return self.payoffs.shape[0]

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return self.payoffs.shape[1:]

    @property
    def grand_mask(self) -> int:
        return (1 << self.n_players) - 1


def _simplex_max(A: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Maximize c.x subject to A x <= b, x >= 0, with b >= 0.

    Dense tableau simplex with Bland's anti-cycling rule (lowest index
    enters; ratio ties leave by lowest basic index). Returns (x, duals).
    """
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(50_000):
        enter = -1
        for j in range(n + m):
            if T[m, j] < -_LP_PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            break
        leave, best, best_var = -1, np.inf, np.inf
        for i in range(m):
            if T[i, enter] > _LP_PIVOT_TOL:
                ratio = T[i, -1] / T[i, enter]
                if ratio < best - _LP_PIVOT_TOL or (
                    abs(ratio - best) <= _LP_PIVOT_TOL and basis[i] < best_var
                ):
                    leave, best, best_var = i, ratio, basis[i]
        if leave < 0:
            raise LPNumericalFailure("linear program is unbounded")
        T[leave] /= T[leave, enter]
        for i in range(m + 1):
            if i != leave and T[i, enter] != 0.0:
                T[i] -= T[i, enter] * T[leave]
        basis[leave] = enter
    else:
        raise LPNumericalFailure("simplex hit its pivot cap")
    x = np.zeros(n + m)
    for i, var in enumerate(basis):
        x[var] = T[i, -1]
    return x[:n], T[m, n : n + m].copy()


def zero_sum_value(M) -> tuple[float, np.ndarray, np.ndarray]:
    """Value and optimal mixed strategies of a zero-sum matrix game.

    The row player maximizes x^T M y, the column player minimizes. The
    returned strategies are certified mutual best responses within 1e-8;
    a failed certificate raises LPNumericalFailure.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.size == 0:
        raise LPNumericalFailure("payoff matrix must be nonempty and 2-d")
    r, c = M.shape
    shift = 1.0 - M.min()
    Mp = M + shift
    # Column player's LP: max 1.w  s.t.  Mp w <= 1, w >= 0. Its duals are the
    # row player's scaled strategy; the common optimum is 1/game value.
    w, u = _simplex_max(Mp, np.ones(r), np.ones(c))
    total = w.sum()
    if total <= 0:
        raise LPNumericalFailure("degenerate game LP solution")
    value = 1.0 / total - shift
    y = w / total
    usum = u.sum()
    if usum <= 0:
        raise LPNumericalFailure("degenerate dual solution")
    x = u / usum
    worst_row = float(np.min(x @ M))
    best_col = float(np.max(M @ y))
    if worst_row < value - _CERTIFICATE_TOL or best_col > value + _CERTIFICATE_TOL:
        raise LPNumericalFailure(
            f"strategies fail the best-response certificate: "
            f"guarantee {worst_row:.3e}, cap {best_col:.3e}, value {value:.3e}"
        )
    return value, x, y


def _as_mask(coalition: int | Iterable[int], n: int) -> int:
    if isinstance(coalition, (int, np.integer)):
        mask = int(coalition)
    else:
        mask = 0
        for i in coalition:
            mask |= 1 << int(i)
    if not 0 <= mask < (1 << n):
        raise ValueError(f"coalition {coalition!r} not within {n} players")
    return mask


def _threat_matrix(game: StrategicGame, mask: int) -> np.ndarray:
    """Joint payoff-difference matrix with coalition profiles as rows."""
    n = game.n_players
    members = [i for i in range(n) if mask >> i & 1]
    others = [i for i in range(n) if not mask >> i & 1]
    diff = np.zeros(game.strategy_counts)
    for i in range(n):
        diff += game.payoffs[i] if mask >> i & 1 else -game.payoffs[i]
    order = members + others
    rows = math.prod(game.strategy_counts[i] for i in members) if members else 1
    return np.transpose(diff, order).reshape(rows, -1)


def threat_power(game: StrategicGame, coalition: int | Iterable[int]) -> float:
    """Max-min payoff advantage of a coalition over its complement.

    Both sides play correlated strategies, i.e. distributions over their
    joint pure action tuples, so the optimization is a matrix game.
    """
    mask = _as_mask(coalition, game.n_players)
    value, _, _ = zero_sum_value(_threat_matrix(game, mask))
    return value


@dataclass(frozen=True, eq=False)
class ThreatProfile:
    """Threat power of every coalition, indexed by bitmask."""

    n_players: int
    delta: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.delta, dtype=np.float64)
        if arr.shape != (1 << self.n_players,):
            raise ValueError(
                f"need {1 << self.n_players} threat values, got {arr.size}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "delta", arr)

    def value(self, coalition: int | Iterable[int]) -> float:
        return float(self.delta[_as_mask(coalition, self.n_players)])

    @property
    def grand(self) -> float:
        return float(self.delta[-1])


def threat_profile(game: StrategicGame) -> ThreatProfile:
    """Threat powers for all coalitions.

    Complementary coalitions share one LP via antisymmetry
    delta(S) = -delta([N] - S), halving the solve count.
    """
    n = game.n_players
    if n > MAX_KN_PLAYERS:
        raise TooLarge(f"threat table enumerates 2^N coalitions; N <= {MAX_KN_PLAYERS}")
    full = (1 << n) - 1
    delta = np.full(1 << n, np.nan)
    for mask in range(1 << n):
        comp = full ^ mask
        if comp < mask:
            delta[mask] = -delta[comp]
        else:
            delta[mask] = threat_power(game, mask)
    return ThreatProfile(n, delta)


def coalition_game_from_threats(profile: ThreatProfile) -> CoalitionGame:
    """Coalition game v(S) = (delta(S) + delta([N])) / 2.

    Validates antisymmetry of the threat table first; v is then zero at the
    empty set and equals delta([N]) at the grand coalition.
    """
    delta = profile.delta
    worst = float(np.max(np.abs(delta + delta[::-1])))
    if worst > ANTISYMMETRY_TOL:
        raise AntisymmetryViolated(
            f"|delta(S) + delta(complement)| up to {worst:.3e} "
            f"exceeds {ANTISYMMETRY_TOL:g}"
        )
    vals = (delta + delta[-1]) / 2.0
    vals[0] = 0.0
    return CoalitionGame(profile.n_players, vals)


def kn_value(game: StrategicGame, profile: ThreatProfile | None = None) -> np.ndarray:
    """Kohlberg-Neyman allocation, one value per player.

    Computed as the Shapley value of the threat-induced coalition game,
    which collapses the N!-ordering average to subset-weighted sums.
    """
    if game.n_players > MAX_KN_PLAYERS:
        raise TooLarge(f"kn_value supports N <= {MAX_KN_PLAYERS}")
    if profile is None:
        profile = threat_profile(game)
    v = coalition_game_from_threats(profile)
    return np.array(
        [shapley_closed_form(v, i) for i in range(game.n_players)]
    )


def kn_value_by_orderings(
    game: StrategicGame, profile: ThreatProfile | None = None
) -> np.ndarray:
    """Reference N!-ordering form of the allocation, for cross-checking.

    gamma_i = average over orderings of delta(players up to and including i).
    """
    n = game.n_players
    if n > MAX_ORDERING_PLAYERS:
        raise TooLarge(f"ordering enumeration supports N <= {MAX_ORDERING_PLAYERS}")
    if profile is None:
        profile = threat_profile(game)
    gamma = np.zeros(n)
    for order in itertools.permutations(range(n)):
        joined = 0
        for i in order:
            joined |= 1 << i
            gamma[i] += profile.delta[joined]
    return gamma / math.factorial(n)


def kn_dynamic_extension(
    game: StrategicGame, profile: ThreatProfile | None = None
) -> ComponentGameSolution:
    """Allocation of the threat-induced game at every coalition.

    Solves the allocation Poisson equation on the unit-weight hypercube with
    each player's marginal-contribution flow; the grand-coalition row of the
    result reproduces kn_value.
    """
    if game.n_players > MAX_KN_PLAYERS:
        raise TooLarge(f"dynamic extension supports N <= {MAX_KN_PLAYERS}")
    if profile is None:
        profile = threat_profile(game)
    v = coalition_game_from_threats(profile)
    g = build_hypercube(game.n_players)
    return component_allocation(classic_profile(v, g), g)

"""JSON file formats for cooperation graphs, games, and strategic games.

A graph spec file carries states (one flagged null), weighted edges, and
optionally vertex weights, game values, and a contribution profile. The
profile is either listed edge by edge ("explicit") or named as a scheme
("classic", "extended", "equal_split") that is expanded with the coalition
flow builders at load time. Numbers are plain JSON doubles; states are
referenced by label throughout.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import HodgeAllocError, ParseError, ValidationError
from .graph import (
    ContributionProfile,
    CooperationGraph,
    EdgeFlow,
    GameValues,
    validate_graph,
)
from .hypercube import (
    CoalitionGame,
    build_hypercube,
    classic_profile,
    coalition_label,
    equal_split_flow,
    extended_profile,
    parse_coalition_label,
)
from .strategic import StrategicGame

SCHEMES = ("classic", "extended", "equal_split", "explicit")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParseError(msg)


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    _require(isinstance(doc, dict), f"{path}: top level must be an object")
    return doc


def _parse_states(doc: dict) -> tuple[list[str], str]:
    entries = doc["states"]
    _require(isinstance(entries, list) and entries, "field 'states' must be a nonempty list")
    labels: list[str] = []
    null_label = None
    for k, entry in enumerate(entries):
        if isinstance(entry, str):
            labels.append(entry)
            continue
        _require(
            isinstance(entry, dict) and "label" in entry,
            f"states[{k}] must be a string or an object with a 'label'",
        )
        labels.append(str(entry["label"]))
        if entry.get("null", False):
            _require(null_label is None, "more than one state is flagged null")
            null_label = labels[-1]
    _require(null_label is not None, "exactly one state must carry \"null\": true")
    return labels, null_label


def _parse_edges(doc: dict) -> tuple[list[tuple[str, str]], list[float]]:
    entries = doc.get("edges", [])
    _require(isinstance(entries, list), "field 'edges' must be a list")
    pairs, lam = [], []
    for k, entry in enumerate(entries):
        _require(
            isinstance(entry, dict) and {"from", "to"} <= entry.keys(),
            f"edges[{k}] needs 'from' and 'to'",
        )
        pairs.append((str(entry["from"]), str(entry["to"])))
        try:
            lam.append(float(entry.get("lambda", 1.0)))
        except (TypeError, ValueError):
            raise ParseError(f"edges[{k}]: 'lambda' must be a number") from None
    return pairs, lam


def _parse_value_map(doc: dict, key: str, labels: list[str]) -> dict[str, float]:
    raw = doc[key]
    _require(isinstance(raw, dict), f"field {key!r} must map state labels to numbers")
    known = set(labels)
    out = {}
    for lab, val in raw.items():
        _require(lab in known, f"{key}[{lab!r}]: unknown state label")
        try:
            out[lab] = float(val)
        except (TypeError, ValueError):
            raise ParseError(f"{key}[{lab!r}] must be a number") from None
    return out


def _coalition_setup(g: CooperationGraph, n_players: int):
    """Masks per state, checking the labels enumerate all coalitions of [N]."""
    try:
        masks = np.array([parse_coalition_label(lab) for lab in g.labels])
    except ValueError as exc:
        raise ParseError(f"scheme needs coalition state labels: {exc}") from exc
    _require(
        sorted(masks.tolist()) == list(range(1 << n_players)),
        f"states must enumerate all {1 << n_players} coalitions of {n_players} players",
    )
    return masks


def _expand_scheme(
    doc: dict, g: CooperationGraph, values: GameValues | None
) -> ContributionProfile | None:
    spec = doc.get("contributions")
    if spec is None:
        return None
    _require(isinstance(spec, dict), "field 'contributions' must be an object")
    scheme = spec.get("scheme")
    _require(scheme in SCHEMES, f"contribution scheme must be one of {SCHEMES}")

    if scheme == "explicit":
        flows_doc = spec.get("flows")
        _require(isinstance(flows_doc, list) and flows_doc, "'explicit' needs a 'flows' list")
        declared = doc.get("players")
        _require(
            declared is None or declared == len(flows_doc),
            f"'players' is {declared} but {len(flows_doc)} flows are listed",
        )
        flows = []
        for p, entries in enumerate(flows_doc):
            _require(isinstance(entries, list), f"flows[{p}] must be a list of edge entries")
            vals = np.zeros(g.n_edges)
            seen = set()
            for entry in entries:
                _require(
                    isinstance(entry, dict) and {"from", "to", "value"} <= entry.keys(),
                    f"flows[{p}] entries need 'from', 'to', 'value'",
                )
                try:
                    e, sign = g.edge_id(str(entry["from"]), str(entry["to"]))
                except (KeyError, HodgeAllocError) as exc:
                    raise ParseError(f"flows[{p}]: {exc}") from exc
                _require(e not in seen, f"flows[{p}]: edge listed twice")
                seen.add(e)
                vals[e] = sign * float(entry["value"])
            flows.append(EdgeFlow(g, vals))
        return ContributionProfile(tuple(flows))

    n_players = doc.get("players")
    _require(
        isinstance(n_players, int) and n_players >= 1,
        f"scheme {scheme!r} needs a positive integer 'players' field",
    )
    if scheme == "equal_split":
        _require(values is not None, "scheme 'equal_split' needs game values")
        return equal_split_flow(values, n_players, g)

    _require(values is not None, f"scheme {scheme!r} needs game values")
    game, masks = coalition_game_from_spec(g, values, n_players)
    try:
        if scheme == "classic":
            return classic_profile(game, g, masks)
        return extended_profile(game, g, masks)
    except HodgeAllocError as exc:
        raise ValidationError(f"scheme {scheme!r} does not fit this graph: {exc}") from exc


def coalition_game_from_spec(
    g: CooperationGraph, values: GameValues, n_players: int
) -> tuple[CoalitionGame, np.ndarray]:
    """Rebuild the coalition game behind a coalition-labeled graph spec.

    Returns the game plus the per-state coalition masks (the permutation
    between state ids and bitmask order).
    """
    masks = _coalition_setup(g, n_players)
    return CoalitionGame(n_players, values.values[np.argsort(masks)]), masks


def load_graph_spec(path):
    """Load a graph spec file.

    Returns (graph, values or None, profile or None). Files with a
    'players' field and no explicit 'states' get the unit-weight hypercube
    with canonical coalition labels.
    """
    doc = _load_json(path)
    if "states" not in doc:
        n_players = doc.get("players")
        _require(
            isinstance(n_players, int) and n_players >= 1,
            "file needs either 'states' or a positive 'players' count",
        )
        _require(
            "edges" not in doc and "mu" not in doc,
            "'edges'/'mu' require an explicit 'states' list",
        )
        try:
            g = build_hypercube(n_players)
        except HodgeAllocError as exc:
            raise ValidationError(str(exc)) from exc
    else:
        labels, null_label = _parse_states(doc)
        pairs, lam = _parse_edges(doc)
        mu = _parse_value_map(doc, "mu", labels) if "mu" in doc else None
        try:
            g = validate_graph(labels, pairs, lam, mu, null_state=null_label)
        except HodgeAllocError as exc:
            raise ValidationError(f"{type(exc).__name__}: {exc}") from exc

    values = None
    if "values" in doc:
        vmap = _parse_value_map(doc, "values", list(g.labels))
        arr = np.zeros(g.n_states)
        for lab, val in vmap.items():
            arr[g.index(lab)] = val
        try:
            values = GameValues(g, arr)
        except HodgeAllocError as exc:
            raise ValidationError(f"{type(exc).__name__}: {exc}") from exc

    profile = _expand_scheme(doc, g, values)
    return g, values, profile


def graph_spec_dict(
    g: CooperationGraph,
    values: GameValues | None = None,
    profile: ContributionProfile | None = None,
    players: int | None = None,
) -> dict:
    """Canonical JSON-ready dict for a graph and its optional attachments.

    Profiles are always serialized explicitly, so loading the result
    reproduces the same objects regardless of how they were first built.
    """
    doc: dict = {
        "states": [
            {"label": lab, "null": True} if i == g.null_index else {"label": lab}
            for i, lab in enumerate(g.labels)
        ],
        "edges": [
            {"from": g.labels[a], "to": g.labels[b], "lambda": float(w)}
            for a, b, w in zip(g.tails, g.heads, g.lam)
        ],
    }
    if not np.all(g.mu == 1.0):
        doc["mu"] = {lab: float(m) for lab, m in zip(g.labels, g.mu)}
    if players is not None:
        doc["players"] = int(players)
    if values is not None:
        doc["values"] = {lab: float(v) for lab, v in zip(g.labels, values.values)}
    if profile is not None:
        doc["contributions"] = {
            "scheme": "explicit",
            "flows": [
                [
                    {
                        "from": g.labels[a],
                        "to": g.labels[b],
                        "value": float(val),
                    }
                    for a, b, val in zip(g.tails, g.heads, f.values)
                    if val != 0.0
                ]
                for f in profile.flows
            ],
        }
    return doc


def save_graph_spec(path, g, values=None, profile=None, players=None) -> None:
    Path(path).write_text(
        json.dumps(graph_spec_dict(g, values, profile, players), indent=2) + "\n",
        encoding="utf-8",
    )


def load_strategic_spec(path) -> StrategicGame:
    """Load a strategic game: players, strategy counts, payoff tensors."""
    doc = _load_json(path)
    n = doc.get("players")
    _require(isinstance(n, int) and n >= 1, "field 'players' must be a positive integer")
    counts = doc.get("strategies")
    _require(
        isinstance(counts, list)
        and len(counts) == n
        and all(isinstance(c, int) and c >= 1 for c in counts),
        "field 'strategies' must list one positive strategy count per player",
    )
    payoffs = doc.get("payoffs")
    _require(isinstance(payoffs, list) and len(payoffs) == n,
             "field 'payoffs' must list one tensor per player")
    try:
        arr = np.array(payoffs, dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"payoff tensors are ragged: {exc}") from exc
    expect = (n, *counts)
    _require(
        arr.shape == expect,
        f"payoff tensor has shape {arr.shape}, expected {expect}",
    )
    try:
        return StrategicGame(arr)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def strategic_spec_dict(game: StrategicGame) -> dict:
    return {
        "players": game.n_players,
        "strategies": list(game.strategy_counts),
        "payoffs": game.payoffs.tolist(),
    }


def save_strategic_spec(path, game: StrategicGame) -> None:
    Path(path).write_text(
        json.dumps(strategic_spec_dict(game), indent=2) + "\n", encoding="utf-8"
    )


def coalition_values_dict(game: CoalitionGame) -> dict[str, float]:
    """Map coalition labels to values, for hypercube spec files."""
    return {
        coalition_label(mask): float(v) for mask, v in enumerate(game.values)
    }

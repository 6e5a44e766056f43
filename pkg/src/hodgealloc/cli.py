"""Command-line interface over the allocation, simulation, and game tools.

Every subcommand prints a human-readable table and optionally writes a
machine report (JSON) to --output with the command, an input digest, the
numeric results, and the tolerances in force. Exit codes: 0 on success,
1 on a computational error, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .calculus import divergence, gradient, hodge_decompose, inner_product_flows
from .errors import HodgeAllocError, ParseError
from .fileio import (
    coalition_game_from_spec,
    load_graph_spec,
    load_strategic_spec,
)
from .hypercube import (
    MAX_PERMUTATION_PLAYERS,
    coalition_label,
    shapley_closed_form,
    shapley_permutation,
)
from .markov import DEFAULT_MAX_STEPS, estimate_value
from .poisson import (
    DEFAULT_CONFIG,
    component_allocation,
    expected_revenue,
    mid_project_revenue,
)
from .strategic import (
    coalition_game_from_threats,
    kn_value,
    kn_dynamic_extension,
    threat_profile,
)


def _digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _players_field(path) -> int | None:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    n = doc.get("players")
    return n if isinstance(n, int) else None


def _print_table(headers: list[str], rows: list[list[str]]) -> None:
    widths = [
        max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
        for i, h in enumerate(headers)
    ]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    print(line)
    print("  ".join("-" * w for w in widths))
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))


def _need_profile(profile):
    if profile is None:
        raise ParseError("input file has no contribution profile")
    return profile


def _need_values(values):
    if values is None:
        raise ParseError("input file has no game values")
    return values


def _cmd_solve(args):
    g, values, profile = load_graph_spec(args.input)
    profile = _need_profile(profile)
    sol = component_allocation(profile, g)
    total = sol.total()
    headers = ["state"] + [f"player {i + 1}" for i in range(sol.n_players)] + ["total"]
    rows = []
    for s, lab in enumerate(g.labels):
        rows.append(
            [lab]
            + [f"{sol.values[i, s]:.6g}" for i in range(sol.n_players)]
            + [f"{total[s]:.6g}"]
        )
    _print_table(headers, rows)
    efficient = None
    if values is not None:
        gap = profile.summed().values - gradient(values.values, g).values
        efficient = bool(np.max(np.abs(gap), initial=0.0) <= DEFAULT_CONFIG.check_tol)
        print(f"efficiency (sum of flows equals game gradient): {efficient}")
    print(f"allocation total at each state shown; max residual {sol.residuals.max():.2e}")
    return {
        "states": list(g.labels),
        "players": sol.n_players,
        "allocation": sol.values.tolist(),
        "total": total.tolist(),
        "game_values": None if values is None else values.values.tolist(),
        "efficient": efficient,
        "residuals": sol.residuals.tolist(),
    }, None


def _cmd_simulate(args):
    g, _, profile = load_graph_spec(args.input)
    profile = _need_profile(profile)
    start = args.start if args.start is not None else g.null_label
    players = range(profile.n_players)
    if args.player is not None:
        if not 1 <= args.player <= profile.n_players:
            raise ParseError(f"--player must be in 1..{profile.n_players}")
        players = [args.player - 1]
    estimates = []
    rows = []
    for i in players:
        est = estimate_value(
            profile[i],
            g,
            start=start,
            target=args.target,
            n_paths=args.paths,
            seed=args.seed,
            max_steps=args.max_steps,
        )
        estimates.append(
            {
                "player": i + 1,
                "mean": est.mean,
                "std_error": est.std_error,
                "paths_used": est.n_paths,
                "truncated": est.n_truncated,
            }
        )
        rows.append(
            [
                f"{i + 1}",
                f"{est.mean:.6g}",
                f"{est.std_error:.3g}",
                f"{est.n_paths}",
                f"{est.n_truncated}",
            ]
        )
    _print_table(["player", "mean", "std error", "paths", "truncated"], rows)
    return {
        "start": str(start),
        "target": args.target,
        "n_paths": args.paths,
        "max_steps": args.max_steps,
        "estimates": estimates,
    }, args.seed


def _cmd_shapley(args):
    g, values, _ = load_graph_spec(args.input)
    n_players = _players_field(args.input)
    if n_players is None:
        raise ParseError("shapley needs a 'players' field in the input file")
    game, _ = coalition_game_from_spec(g, _need_values(values), n_players)
    closed = [shapley_closed_form(game, i) for i in range(n_players)]
    permuted = None
    if n_players <= MAX_PERMUTATION_PLAYERS:
        permuted = [shapley_permutation(game, i) for i in range(n_players)]
    rows = []
    for i in range(n_players):
        rows.append(
            [f"{i + 1}", f"{closed[i]:.4f}"]
            + ([f"{permuted[i]:.4f}"] if permuted else [])
        )
    headers = ["player", "closed form"] + (["permutation form"] if permuted else [])
    _print_table(headers, rows)
    print(f"total: {sum(closed):.4f} (grand coalition value {game.values[-1]:.4f})")
    return {
        "players": n_players,
        "closed_form": closed,
        "permutation": permuted,
    }, None


def _cmd_decompose(args):
    g, values, profile = load_graph_spec(args.input)
    flows = []
    if profile is not None:
        flows = [(f"player {i + 1}", f) for i, f in enumerate(profile.flows)]
        if args.player is not None:
            if not 1 <= args.player <= profile.n_players:
                raise ParseError(f"--player must be in 1..{profile.n_players}")
            flows = [flows[args.player - 1]]
    elif values is not None:
        flows = [("game gradient", gradient(values.values, g))]
    else:
        raise ParseError("input file has neither contribution flows nor game values")
    rows, results = [], []
    for name, f in flows:
        u, h = hodge_decompose(f, g)
        du = gradient(u, g)
        report = {
            "flow": name,
            "gradient_norm": float(np.sqrt(inner_product_flows(du, du))),
            "cycle_norm": float(np.sqrt(inner_product_flows(h, h))),
            "max_cycle_divergence": float(np.max(np.abs(divergence(h, g)), initial=0.0)),
            "orthogonality": float(inner_product_flows(du, h)),
            "potential": u.tolist(),
        }
        results.append(report)
        rows.append(
            [
                name,
                f"{report['gradient_norm']:.6g}",
                f"{report['cycle_norm']:.6g}",
                f"{report['max_cycle_divergence']:.2e}",
                f"{report['orthogonality']:.2e}",
            ]
        )
    _print_table(
        ["flow", "|gradient part|", "|cycle part|", "max div(cycle)", "<du,h>"], rows
    )
    return {"states": list(g.labels), "flows": results}, None


def _cmd_threat(args):
    game = load_strategic_spec(args.input)
    profile = threat_profile(game)
    n = game.n_players
    rows = [
        [coalition_label(mask), f"{profile.delta[mask]:.6g}"]
        for mask in range(1 << n)
    ]
    _print_table(["coalition", "threat power"], rows)
    gamma = kn_value(game, profile)
    _print_table(
        ["player", "value"],
        [[f"{i + 1}", f"{gamma[i]:.6g}"] for i in range(n)],
    )
    ext = kn_dynamic_extension(game, profile)
    coalition_game = coalition_game_from_threats(profile)
    rows = []
    for mask in range(1 << n):
        rows.append(
            [coalition_label(mask)]
            + [f"{ext.values[i, mask]:.6g}" for i in range(n)]
        )
    _print_table(["coalition"] + [f"player {i + 1}" for i in range(n)], rows)
    return {
        "coalitions": [coalition_label(m) for m in range(1 << n)],
        "delta": profile.delta.tolist(),
        "coalition_game": coalition_game.values.tolist(),
        "kn_value": gamma.tolist(),
        "extension": ext.values.tolist(),
    }, None


def _cmd_revenue(args):
    g, values, profile = load_graph_spec(args.input)
    values, profile = _need_values(values), _need_profile(profile)
    at = args.at if args.at is not None else g.null_label
    expected = expected_revenue(values, profile, g, target=args.target)
    mid = mid_project_revenue(values, profile, g, at=at, target=args.target)
    print(f"expected revenue reaching {args.target!r} from {g.null_label!r}: {expected:.6g}")
    print(f"expected revenue continuing from {at!r} to {args.target!r}: {mid:.6g}")
    return {
        "target": args.target,
        "at": str(at),
        "expected_revenue": expected,
        "mid_project_revenue": mid,
    }, None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodge-alloc",
        description="Reward allocation on weighted cooperation graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True, help="input spec file (JSON)")
        p.add_argument("--output", help="write a machine-readable report here")
        p.set_defaults(handler=handler)
        return p

    add("solve", _cmd_solve, "allocation for every player by Poisson solve")

    p = add("simulate", _cmd_simulate, "Monte Carlo estimate of player values")
    p.add_argument("--from", dest="start", help="start state (default: null state)")
    p.add_argument("--to", dest="target", required=True, help="target state")
    p.add_argument("--paths", type=int, default=10_000, help="number of sample paths")
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--player", type=int, help="restrict to one player (1-based)")

    add("shapley", _cmd_shapley, "classical Shapley values, two formulas")

    p = add("decompose", _cmd_decompose, "split flows into gradient + cycle parts")
    p.add_argument("--player", type=int, help="restrict to one player (1-based)")

    add("threat", _cmd_threat, "threat powers, KN value, dynamic extension")

    p = add("revenue", _cmd_revenue, "expected and mid-project revenue")
    p.add_argument("--target", required=True, help="project completion state")
    p.add_argument("--at", help="current state (default: null state)")

    return parser


def run_command(argv=None) -> int:
    """Parse argv, run the subcommand, optionally emit the machine report."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        results, seed = args.handler(args)
    except HodgeAllocError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.output:
        report = {
            "command": args.command,
            "inputs_digest": _digest(args.input),
            "results": results,
            "tolerances": {
                "solver_tol": DEFAULT_CONFIG.solver_tol,
                "check_tol": DEFAULT_CONFIG.check_tol,
            },
            "seed": seed,
        }
        Path(args.output).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return 0


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()

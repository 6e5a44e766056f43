"""Acceptance suite: one test per numbered criterion, printing a PASS line.

Run with `pytest -s tests/test_acceptance.py -v` to see the per-criterion
lines. Statistical checks use the reported standard errors with a 1e-12
absolute floor so that deterministic (zero-variance) cases cannot fail on
float rounding.
"""

import math
import time
from fractions import Fraction

import numpy as np

from hodgealloc import (
    CoalitionGame,
    ContributionProfile,
    EdgeFlow,
    StrategicGame,
    build_hypercube,
    build_kernel,
    classic_profile,
    component_allocation,
    divergence,
    equal_split_flow,
    estimate_value,
    expected_revenue,
    glove_game,
    gradient,
    hodge_decompose,
    inner_product_flows,
    kn_dynamic_extension,
    kn_value,
    loop_probability,
    mid_project_revenue,
    path_integral,
    sample_path,
    shapley_closed_form,
    shapley_permutation,
    shapley_values,
    solve_poisson,
    stationary_distribution,
    threat_power,
    threat_profile,
    validate_graph,
)
from helpers import (
    random_connected_graph,
    random_flow,
    random_game_values,
    random_profile,
)

ABS_GUARD = 1e-12  # absolute floor on 3-standard-error comparisons


def _ok(criterion, detail):
    print(f"ACCEPTANCE {criterion}: PASS ({detail})")


def _random_coalition_game(rng, n):
    vals = rng.normal(size=1 << n)
    vals[0] = 0.0
    return CoalitionGame(n, vals)


def test_criterion_01_glove_game_both_formulas():
    start = time.perf_counter()
    game = glove_game()
    expect = [Fraction(2, 3), Fraction(1, 6), Fraction(1, 6)]
    for i in range(3):
        assert shapley_closed_form(game, i, exact=True) == expect[i]
        assert shapley_permutation(game, i, exact=True) == expect[i]
        assert abs(shapley_closed_form(game, i) - float(expect[i])) <= 1e-12
        assert abs(shapley_permutation(game, i) - float(expect[i])) <= 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _ok(1, f"glove game = (2/3, 1/6, 1/6) exactly, {elapsed:.3f}s")


def test_criterion_02_hodge_recovery_of_shapley():
    start = time.perf_counter()
    rng = np.random.default_rng(202)
    worst = 0.0
    for n in (2, 3, 4, 5, 6):
        g = build_hypercube(n)
        for _ in range(20):
            game = _random_coalition_game(rng, n)
            sol = component_allocation(classic_profile(game, g), g)
            gap = np.max(np.abs(sol.values[:, -1] - shapley_values(game)))
            worst = max(worst, float(gap))
            assert gap <= 1e-8
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _ok(2, f"100 games, max |allocation - Shapley| = {worst:.2e}, {elapsed:.1f}s")


def test_criterion_03_path_integral_solves_poisson():
    start = time.perf_counter()
    rng = np.random.default_rng(2026)
    pairs = passed = 0
    for _ in range(20):
        n = int(rng.integers(4, 13))
        g = random_connected_graph(rng, n, extra_edges=int(rng.integers(1, n)))
        f = random_flow(rng, g)
        u = solve_poisson(f, g, anchors={"s0": 0.0})
        k = build_kernel(g)
        for t in range(1, n):
            est = estimate_value(
                f, g, start=0, target=t, n_paths=100_000, seed=1000 + pairs, kernel=k
            )
            if abs(est.mean - u[t]) <= 3 * est.std_error + ABS_GUARD:
                passed += 1
            pairs += 1
    elapsed = time.perf_counter() - start
    rate = passed / pairs
    assert rate >= 0.95
    assert elapsed < 300.0
    _ok(3, f"{passed}/{pairs} (graph, target) pairs within 3 SE, {elapsed:.0f}s")


def test_criterion_04_mu_independence():
    rng = np.random.default_rng(204)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(3, 14))
        g1 = random_connected_graph(rng, n)
        mu = rng.uniform(0.1, 10.0, size=n)
        g2 = validate_graph(
            list(g1.labels),
            [(int(a), int(b)) for a, b in zip(g1.tails, g1.heads)],
            list(g1.lam),
            mu,
            null_state="s0",
        )
        fv = rng.normal(size=g1.n_edges)
        u1 = solve_poisson(EdgeFlow(g1, fv), g1)
        u2 = solve_poisson(EdgeFlow(g2, fv), g2)
        worst = max(worst, float(np.max(np.abs(u1 - u2))))
        assert worst <= 1e-9
    _ok(4, f"50 instances, max |solution(mu) - solution(1)| = {worst:.2e}")


def test_criterion_05_transition_formula():
    rng = np.random.default_rng(205)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(4, 12))
        g = random_connected_graph(rng, n)
        f = random_flow(rng, g)
        s = int(rng.integers(1, n))
        base = solve_poisson(f, g, anchors={"s0": 0.0})
        re_anchored = solve_poisson(f, g, anchors={s: 0.0})
        gap = np.max(np.abs((base - base[s]) - re_anchored))
        worst = max(worst, float(gap))
        assert gap <= 1e-9
    # Monte Carlo version of the same identity on a few instances
    for trial in range(8):
        g = random_connected_graph(rng, 8)
        f = random_flow(rng, g)
        k = build_kernel(g)
        s, t = 3, 6
        est_t = estimate_value(f, g, start=0, target=t, n_paths=30_000, seed=trial, kernel=k)
        est_s = estimate_value(f, g, start=0, target=s, n_paths=30_000, seed=100 + trial, kernel=k)
        est_st = estimate_value(f, g, start=s, target=t, n_paths=30_000, seed=200 + trial, kernel=k)
        combined = math.sqrt(
            est_t.std_error**2 + est_s.std_error**2 + est_st.std_error**2
        )
        assert abs((est_t.mean - est_s.mean) - est_st.mean) <= 3 * combined + ABS_GUARD
    _ok(5, f"re-anchored solver gap = {worst:.2e}; MC triplets within 3 combined SE")


def test_criterion_06_component_game_facts():
    rng = np.random.default_rng(206)
    worst_eff = worst_lin = 0.0
    for _ in range(50):
        n = int(rng.integers(3, 12))
        g = random_connected_graph(rng, n)
        v = random_game_values(rng, g)
        f1 = random_flow(rng, g)
        f2 = gradient(v.values, g) - f1
        sol = component_allocation(ContributionProfile((f1, f2)), g)
        worst_eff = max(worst_eff, float(np.max(np.abs(sol.total() - v.values))))
        assert worst_eff <= 1e-9

        zero = component_allocation(
            ContributionProfile((EdgeFlow(g, np.zeros(g.n_edges)),)), g
        )
        assert np.all(zero.values == 0.0)

        a, b = float(rng.normal()), float(rng.normal())
        mixed = solve_poisson(a * f1 + b * f2, g)
        split = a * solve_poisson(f1, g) + b * solve_poisson(f2, g)
        worst_lin = max(worst_lin, float(np.max(np.abs(mixed - split))))
        assert worst_lin <= 1e-9
    _ok(6, f"efficiency gap {worst_eff:.2e}, null-player exact, linearity gap {worst_lin:.2e}")


def test_criterion_07_reversibility():
    rng = np.random.default_rng(207)
    n_loops = 0
    worst_db = worst_loop = 0.0
    while n_loops < 10_000:
        g = random_connected_graph(rng, int(rng.integers(3, 10)))
        k = build_kernel(g)
        pi = stationary_distribution(k)
        for a, b in zip(g.tails, g.heads):
            lhs = pi[a] * k.transition_probability(int(a), int(b))
            rhs = pi[b] * k.transition_probability(int(b), int(a))
            worst_db = max(worst_db, abs(lhs - rhs))
        assert worst_db <= 1e-12
        for _ in range(500):
            s = int(rng.integers(0, g.n_states))
            nbrs, probs = k.row(s)
            first = int(rng.choice(nbrs, p=probs))
            tail = sample_path(k, first, s, rng)
            loop = [s] + [int(x) for x in tail.states]
            fwd, bwd = loop_probability(k, loop)
            worst_loop = max(worst_loop, abs(fwd - bwd) / max(fwd, bwd))
            assert worst_loop <= 1e-12
            n_loops += 1
    _ok(7, f"{n_loops} loops, max relative gap {worst_loop:.2e}; detailed balance {worst_db:.2e}")


def test_criterion_08_equal_split_reward_is_deterministic():
    rng = np.random.default_rng(208)
    for trial in range(10):
        n = int(rng.integers(4, 11))
        players = int(rng.integers(2, 5))
        g = random_connected_graph(rng, n)
        v = random_game_values(rng, g)
        profile = equal_split_flow(v, players, g)
        sol = component_allocation(profile, g)
        for i in range(players):
            assert np.max(np.abs(sol.values[i] - v.values / players)) <= 1e-9
        target = int(rng.integers(1, n))
        k = build_kernel(g)
        est = estimate_value(
            profile[0], g, start=0, target=target, n_paths=2000, seed=trial, kernel=k
        )
        assert est.std_error <= 1e-9
        expected = v.values[target] / players
        assert abs(est.mean - expected) <= 1e-9
        for ps in range(25):
            p = sample_path(k, 0, target, rng_seed=10_000 * trial + ps)
            assert abs(path_integral(p, profile[0]) - expected) <= 1e-9
    _ok(8, "10 graphs: solver gives v/N and every sampled path integral equals v/N")


def test_criterion_09_kn_value_extension():
    start = time.perf_counter()
    rng = np.random.default_rng(209)
    worst_ext = worst_anti = worst_eff = 0.0
    for trial in range(50):
        n = 2 + trial % 2
        shape = tuple(int(c) for c in rng.integers(2, 4, size=n))
        G = StrategicGame(rng.normal(size=(n, *shape)) * rng.uniform(0.5, 2.0))
        full = (1 << n) - 1
        for mask in range(1 << n):
            gap = abs(threat_power(G, mask) + threat_power(G, full ^ mask))
            worst_anti = max(worst_anti, gap)
            assert gap <= 1e-7
        prof = threat_profile(G)
        gamma = kn_value(G, prof)
        eff_gap = abs(gamma.sum() - prof.grand)
        worst_eff = max(worst_eff, eff_gap)
        assert eff_gap <= 1e-7
        ext = kn_dynamic_extension(G, prof)
        ext_gap = float(np.max(np.abs(ext.values[:, -1] - gamma)))
        worst_ext = max(worst_ext, ext_gap)
        assert ext_gap <= 1e-6
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    _ok(
        9,
        f"50 games: extension gap {worst_ext:.2e}, antisymmetry {worst_anti:.2e}, "
        f"efficiency {worst_eff:.2e}, {elapsed:.1f}s",
    )


def test_criterion_10_hodge_decomposition():
    rng = np.random.default_rng(210)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(3, 14))
        g = random_connected_graph(rng, n, weighted_mu=bool(rng.integers(0, 2)))
        f = random_flow(rng, g)
        u, h = hodge_decompose(f, g)
        du = gradient(u, g)
        exact = float(np.max(np.abs(du.values + h.values - f.values)))
        div_free = float(np.max(np.abs(divergence(h, g))))
        ortho = abs(inner_product_flows(du, h))
        worst = max(worst, exact, div_free, ortho)
        assert exact <= 1e-9 and div_free <= 1e-9 and ortho <= 1e-9
    _ok(10, f"50 flows, worst residual across all three checks = {worst:.2e}")


def test_criterion_11_revenue():
    rng = np.random.default_rng(211)
    for trial in range(10):
        n = int(rng.integers(4, 11))
        g = random_connected_graph(rng, n)
        v = random_game_values(rng, g)
        target = int(rng.integers(1, n))
        players = 3

        zero_profile = ContributionProfile(
            tuple(EdgeFlow(g, np.zeros(g.n_edges)) for _ in range(players))
        )
        assert expected_revenue(v, zero_profile, g, target=target) == v.values[target]

        efficient = equal_split_flow(v, players, g)
        assert abs(expected_revenue(v, efficient, g, target=target)) <= 1e-9

        profile = random_profile(rng, g, players)
        exact = expected_revenue(v, profile, g, target=target)
        k = build_kernel(g)
        total_mean, total_var = 0.0, 0.0
        for i in range(players):
            est = estimate_value(
                profile[i], g, start=0, target=target,
                n_paths=20_000, seed=31 * trial + i, kernel=k,
            )
            total_mean += est.mean
            total_var += est.std_error**2
        mc_revenue = v.values[target] - total_mean
        assert abs(mc_revenue - exact) <= 3 * math.sqrt(total_var) + ABS_GUARD

        mid = mid_project_revenue(v, profile, g, at=0, target=target)
        assert mid == exact
    _ok(11, "10 instances: zero-profile, efficient-profile, MC, and mid-project identities hold")

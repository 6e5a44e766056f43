import numpy as np
import pytest

from hodgealloc import (
    ContributionProfile,
    DuplicateAnchor,
    EdgeFlow,
    GameValues,
    MissingAnchor,
    SolverConfig,
    SolverDidNotConverge,
    UnreachableTarget,
    build_hypercube,
    classic_profile,
    component_allocation,
    expected_revenue,
    glove_game,
    gradient,
    hypercube_game_values,
    laplacian_apply,
    mid_project_revenue,
    partial_flow_classic,
    solve_poisson,
    validate_graph,
)
from helpers import (
    random_connected_graph,
    random_flow,
    random_game_values,
    random_profile,
    triangle_graph,
)


def test_gradient_input_recovers_potential():
    rng = np.random.default_rng(2)
    g = random_connected_graph(rng, 10)
    u_true = rng.normal(size=10)
    f = gradient(u_true, g)
    u = solve_poisson(f, g, anchors={"s0": 0.0})
    np.testing.assert_allclose(u, u_true - u_true[0], atol=1e-9)


def test_divergence_free_input_gives_zero():
    g = triangle_graph(lam=(1.0, 1.0, 1.0))
    f = EdgeFlow(g, np.array([1.0, 1.0, 1.0]))
    u = solve_poisson(f, g, anchors={"A": 0.0})
    np.testing.assert_allclose(u, np.zeros(3), atol=1e-12)


def test_glove_game_player_one_value():
    g = build_hypercube(3)
    f1 = partial_flow_classic(glove_game(), 0, g)
    u = solve_poisson(f1, g, anchors={0: 0.0})
    assert u[7] == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_anchor_errors():
    g = validate_graph(["o", "A", "B", "C"], [("o", "A"), ("B", "C")], 1.0)
    f = EdgeFlow(g, np.zeros(2))
    with pytest.raises(MissingAnchor):
        solve_poisson(f, g, anchors={"o": 0.0})
    with pytest.raises(DuplicateAnchor):
        solve_poisson(f, g, anchors={"o": 0.0, "A": 1.0, "B": 0.0})
    with pytest.raises(DuplicateAnchor):
        solve_poisson(f, g, anchors={"o": 0.0, 0: 1.0, "B": 0.0})


def test_default_anchors_cover_all_components():
    g = validate_graph(["o", "A", "B", "C"], [("o", "A"), ("B", "C")], 1.0)
    f = EdgeFlow(g, np.array([2.0, 3.0]))
    u = solve_poisson(f, g)
    assert u[0] == 0.0 and u[2] == 0.0
    np.testing.assert_allclose(u, [0.0, 2.0, 0.0, 3.0], atol=1e-10)


def test_anchor_value_shifts_component():
    rng = np.random.default_rng(14)
    g = random_connected_graph(rng, 8)
    f = random_flow(rng, g)
    base = solve_poisson(f, g, anchors={"s0": 0.0})
    shifted = solve_poisson(f, g, anchors={"s0": 2.5})
    np.testing.assert_allclose(shifted, base + 2.5, atol=1e-9)


def test_null_player_is_exactly_zero():
    rng = np.random.default_rng(15)
    g = random_connected_graph(rng, 9)
    profile = ContributionProfile(
        (random_flow(rng, g), EdgeFlow(g, np.zeros(g.n_edges)))
    )
    sol = component_allocation(profile, g)
    assert np.all(sol.values[1] == 0.0)


def test_efficiency_when_flows_sum_to_gradient():
    rng = np.random.default_rng(16)
    g = random_connected_graph(rng, 10)
    v = random_game_values(rng, g)
    dv = gradient(v.values, g)
    f1 = random_flow(rng, g)
    f2 = random_flow(rng, g)
    f3 = dv - f1 - f2
    sol = component_allocation(ContributionProfile((f1, f2, f3)), g)
    np.testing.assert_allclose(sol.total(), v.values, atol=1e-9)


def test_glove_game_allocation():
    g = build_hypercube(3)
    sol = component_allocation(classic_profile(glove_game(), g), g)
    np.testing.assert_allclose(
        sol.values[:, 7], [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], atol=1e-9
    )
    assert np.all(sol.residuals <= 1e-10)


def test_mu_independence():
    rng = np.random.default_rng(18)
    for _ in range(10):
        g_unit = random_connected_graph(rng, int(rng.integers(4, 12)))
        mu = rng.uniform(0.2, 5.0, size=g_unit.n_states)
        g_mu = validate_graph(
            list(g_unit.labels),
            [(int(a), int(b)) for a, b in zip(g_unit.tails, g_unit.heads)],
            list(g_unit.lam),
            mu,
            null_state="s0",
        )
        fvals = rng.normal(size=g_unit.n_edges)
        u_unit = solve_poisson(EdgeFlow(g_unit, fvals), g_unit)
        u_mu = solve_poisson(EdgeFlow(g_mu, fvals), g_mu)
        np.testing.assert_allclose(u_unit, u_mu, atol=1e-9)


def test_flow_linearity():
    rng = np.random.default_rng(19)
    g = random_connected_graph(rng, 11)
    f1, f2 = random_flow(rng, g), random_flow(rng, g)
    a, b = 2.25, -0.75
    combined = solve_poisson(a * f1 + b * f2, g)
    separate = a * solve_poisson(f1, g) + b * solve_poisson(f2, g)
    np.testing.assert_allclose(combined, separate, atol=1e-9)


def test_residual_contract():
    rng = np.random.default_rng(20)
    for _ in range(10):
        g = random_connected_graph(rng, int(rng.integers(4, 16)), weighted_mu=True)
        f = random_flow(rng, g)
        u = solve_poisson(f, g)
        from hodgealloc.calculus import divergence

        residual = laplacian_apply(u, g) - divergence(f)
        scale = g.total_weight() / g.mu
        assert np.max(np.abs(residual) / scale) <= 1e-10


def test_dense_fallback_matches_cg():
    rng = np.random.default_rng(22)
    g = random_connected_graph(rng, 12)
    f = random_flow(rng, g)
    via_cg = solve_poisson(f, g)
    via_dense = solve_poisson(f, g, config=SolverConfig(max_iter_factor=0))
    np.testing.assert_allclose(via_cg, via_dense, atol=1e-9)


def test_solver_failure_when_all_routes_disabled():
    rng = np.random.default_rng(23)
    g = random_connected_graph(rng, 12)
    f = random_flow(rng, g)
    with pytest.raises(SolverDidNotConverge):
        solve_poisson(
            f, g, config=SolverConfig(max_iter_factor=0, dense_fallback_states=0)
        )


def test_workers_do_not_change_results():
    rng = np.random.default_rng(24)
    g = random_connected_graph(rng, 10)
    profile = random_profile(rng, g, 4)
    seq = component_allocation(profile, g, workers=1)
    par = component_allocation(profile, g, workers=4)
    np.testing.assert_array_equal(seq.values, par.values)


# -- revenue -------------------------------------------------------------------


def test_revenue_zero_profile_pays_full_value():
    rng = np.random.default_rng(25)
    g = random_connected_graph(rng, 8)
    v = random_game_values(rng, g)
    profile = ContributionProfile(
        tuple(EdgeFlow(g, np.zeros(g.n_edges)) for _ in range(3))
    )
    assert expected_revenue(v, profile, g, target="s5") == v["s5"]


def test_revenue_efficient_profile_pays_everything():
    rng = np.random.default_rng(26)
    g = random_connected_graph(rng, 9)
    v = random_game_values(rng, g)
    dv = gradient(v.values, g)
    third = EdgeFlow(g, dv.values / 3.0)
    profile = ContributionProfile((third, third, third))
    assert abs(expected_revenue(v, profile, g, target="s4")) <= 1e-9


def test_mid_project_revenue_identities():
    rng = np.random.default_rng(27)
    g = random_connected_graph(rng, 10)
    v = random_game_values(rng, g)
    profile = random_profile(rng, g, 3)
    assert mid_project_revenue(v, profile, g, at="s6", target="s6") == 0.0
    assert mid_project_revenue(v, profile, g, at="s0", target="s6") == expected_revenue(
        v, profile, g, target="s6"
    )


def test_revenue_unreachable_target():
    g = validate_graph(["o", "A", "B", "C"], [("o", "A"), ("B", "C")], 1.0)
    v = GameValues(g, np.array([0.0, 1.0, 2.0, 3.0]))
    profile = ContributionProfile((EdgeFlow(g, np.zeros(2)),))
    with pytest.raises(UnreachableTarget):
        expected_revenue(v, profile, g, target="B")
    with pytest.raises(UnreachableTarget):
        mid_project_revenue(v, profile, g, at="o", target="C")

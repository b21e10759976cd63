"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a single PASS line with the numbers it certified; every
expected value is either computed by an independent oracle in this file or
taken from the literature and explicitly flagged as not desk-verified.
"""

import time

import networkx as nx
import numpy as np

from kstoolkit.channels import (
    c0,
    hadamard_separation_bounds,
    ks_from_strategy,
    strategy_from_coloring,
    strategy_from_ks,
    verify_ea_strategy,
)
from kstoolkit.coloring import (
    hadamard_coloring,
    hadamard_sampled_edge_violations,
    hadamard_vertex_check,
    verify_normal_form,
)
from kstoolkit.games import classical_value, game_from_ks, losing_tuple, quantum_loses_probability_zero
from kstoolkit.graphs import (
    cartesian_product,
    chromatic_number,
    complement,
    complete_graph,
    cycle_graph,
    empty_graph,
    hadamard_graph,
    independence_number,
    random_gnp,
    sample_hadamard_edges,
)
from kstoolkit.ks import (
    classify,
    fixture_peres24,
    lift,
    parity_obstruction,
    search_marking,
    weak_from_projective,
)
from kstoolkit.linalg import TolerancePolicy
from kstoolkit.theta import lovasz_theta

from _oracles import brute_alpha, brute_consistent_assignments

TOL9 = TolerancePolicy(zero_tol=1e-9)


def report(n, message):
    print(f"ACCEPTANCE {n} PASS: {message}")


def test_criterion_1_ks_verification(cabello18, cabello_cover):
    started = time.perf_counter()
    verdict = classify(cabello18, tol=TOL9)
    assert verdict.classification == "weak_or_projective_ks"
    record = verdict.exhaustion
    assert record.search_space_size == 4**9
    assert record.nodes_visited > 0
    # independent cross-validation: exhaustive scan of every
    # measurement-consistent assignment (at most 4^9 candidates)
    assert brute_consistent_assignments(cabello_cover.subsets) == []
    # the parity oracle independently predicts the empty search
    assert parity_obstruction(cabello_cover, len(cabello18))
    assert search_marking(cabello18, cabello_cover, forbid="none", tol=TOL9) is None
    elapsed = time.perf_counter() - started
    assert elapsed < 60
    report(1, f"18-ray set is weak/projective KS; exhaustive scan of "
              f"{record.search_space_size} candidates agrees; {elapsed:.1f}s < 60s")


def test_criterion_2_channel_separation(cabello18):
    started = time.perf_counter()
    channel, strategy, graph = strategy_from_ks(cabello18, tol=TOL9)
    assert graph.n_vertices == 36
    alpha, witness = independence_number(graph)
    # second, independent exact solver: clique search on the complement
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(graph.n_vertices))
    nx_graph.add_edges_from(graph.edges())
    _, nx_alpha = nx.max_weight_clique(nx.complement(nx_graph), weight=None)
    assert alpha == nx_alpha == 8 < 9
    verify = verify_ea_strategy(channel, strategy, tol=TOL9)
    assert verify.ok
    assert verify.checked_pairs > 0 and verify.checked_paths > 0
    assert c0(channel)[0] == alpha
    elapsed = time.perf_counter() - started
    assert elapsed < 60
    report(2, f"36-input channel: alpha = {alpha} (two solvers agree) < 9 messages, "
              f"strategy verified with zero violations at 1e-9; {elapsed:.1f}s < 60s")


def test_criterion_3_theta_solver():
    for n in range(1, 21):
        full = lovasz_theta(complete_graph(n), eps=1e-6)
        assert abs(full.value - 1.0) <= 1e-6
        assert abs(full.dual_bound - 1.0) <= 1e-6
        empty = lovasz_theta(empty_graph(n), eps=1e-6)
        assert abs(empty.value - n) <= 1e-6
        assert abs(empty.dual_bound - n) <= 1e-6
    pentagon = lovasz_theta(cycle_graph(5), eps=1e-6)
    root5 = np.sqrt(5)
    assert abs(pentagon.value - root5) <= 1e-4
    assert abs(pentagon.dual_bound - root5) <= 1e-4
    rng = np.random.default_rng(314159)
    for _ in range(100):
        g = random_gnp(int(rng.integers(2, 16)), float(rng.uniform(0.1, 0.9)), rng)
        alpha = independence_number(g)[0]
        chi_bar = chromatic_number(complement(g))[0]
        res = lovasz_theta(g, eps=1e-6)
        assert alpha <= res.dual_bound + 1e-6
        assert res.value <= chi_bar + 1e-6
    report(3, "theta exact on complete/edgeless graphs n<=20 within 1e-6, "
              "pentagon within 1e-4 with matching dual, sandwich holds on "
              "100 random graphs <= 15 vertices")


def test_criterion_4_capacity_chain_order_four():
    started = time.perf_counter()
    graph = hadamard_graph(4)
    qc = hadamard_coloring(4)
    channel, strategy, product = strategy_from_coloring(graph, qc, tol=TOL9)
    assert strategy.n_messages == 16
    assert product.n_vertices == 64
    verify = verify_ea_strategy(channel, strategy, tol=TOL9)
    assert verify.ok  # certifies 16 messages are achievable on the product channel
    res = lovasz_theta(product, eps=1e-6)
    assert abs(res.value - 16.0) <= 1e-3
    assert abs(res.dual_bound - 16.0) <= 1e-3
    elapsed = time.perf_counter() - started
    assert elapsed < 600
    report(4, f"order-4 chain: 16-message strategy verified and theta(product) "
              f"in [{res.value:.6f}, {res.dual_bound:.6f}] = 16 +- 1e-3; "
              f"{elapsed:.1f}s < 600s")


def test_criterion_5_hadamard_colorings():
    for n in (2, 4, 8):
        graph = hadamard_graph(n)
        rep = verify_normal_form(graph, hadamard_coloring(n), tol=TOL9)
        assert rep.ok
        assert rep.arithmetic == "exact"
        assert rep.checked_edges == graph.edge_count  # all edges
        assert rep.checked_vertices == graph.n_vertices
    rng = np.random.default_rng(271828)
    pairs = sample_hadamard_edges(16, 100_000, rng)
    assert hadamard_sampled_edge_violations(16, pairs) == []
    for n in (2, 4, 8, 16):
        out = hadamard_vertex_check(n)
        assert out["violations"] == []
        assert out["vertices_covered"] == 2**n
    report(5, "colorings exact-verified on all edges for orders 2/4/8, on "
              "100000 sampled edges for order 16, and per-vertex "
              "completeness/rank certified for all orders")


def test_criterion_6_pseudo_telepathy(cabello18):
    started = time.perf_counter()
    game, strategy = game_from_ks(cabello18, tol=TOL9)
    play = quantum_loses_probability_zero(game, strategy, tol=TOL9)
    assert play.ok and play.flagged == []
    value, best = classical_value(game)
    assert value < 1
    lose = losing_tuple(game, best)
    assert lose is not None
    x, y, a, b = lose
    assert best.s_a[x] == a and best.s_b[y] == b
    assert game.v_table[a, b, x, y] == 0
    elapsed = time.perf_counter() - started
    assert elapsed < 120
    report(6, f"quantum losing probability 0 at 1e-9; exhaustive classical value "
              f"{value:.6f} = {round(value * 81)}/81 < 1, losing tuple {lose}; "
              f"{elapsed:.1f}s < 120s")


def test_criterion_7_product_bounds():
    g = cartesian_product(cycle_graph(5), complete_graph(2))
    mine = independence_number(g)[0]
    brute = brute_alpha(g)[0]  # all 2^10 subsets
    assert mine == brute == 4 < 5
    rng = np.random.default_rng(20260809)
    for _ in range(100):
        ga = random_gnp(int(rng.integers(1, 13)), float(rng.uniform(0.2, 0.8)), rng)
        gb = random_gnp(int(rng.integers(1, 13)), float(rng.uniform(0.2, 0.8)), rng)
        prod_alpha = independence_number(cartesian_product(ga, gb))[0]
        bound = min(
            independence_number(ga)[0] * gb.n_vertices,
            independence_number(gb)[0] * ga.n_vertices,
        )
        assert prod_alpha <= bound
    report(7, "alpha(C5 box K2) = 4 < 5 by brute force over 2^10 subsets; "
              "product bound held on 100 random instances up to 12x12")


def test_criterion_8_support_basis_reduction(cabello18):
    lifted = lift(cabello18, 2)
    derived = weak_from_projective(lifted, tol=TOL9)
    assert derived.kind == "vectors"
    assert len(derived) == 36 and derived.dim == 8
    verdict = classify(derived, tol=TOL9)
    assert verdict.classification == "weak_or_projective_ks"
    # rank-1 degenerate case: the same rays come back, up to phase
    same = weak_from_projective(cabello18, tol=TOL9, check=False)
    assert len(same) == len(cabello18)
    for (_, p), (_, q) in zip(same.elements, cabello18.elements):
        assert np.max(np.abs(p - q)) <= 1e-9
    report(8, "support-basis reduction of the lifted 18-ray set: 36 vectors in "
              "dimension 8, classified weak KS; rank-1 case returns the "
              "input rays up to phase")


def test_criterion_9_literature_cross_checks():
    # alpha of the order-16 graph is a literature input, never computed here
    out = hadamard_separation_bounds(16, 2304)
    assert out["c0_upper_bound"] == 2304 * 16 == 36864
    assert out["c0_star"] == 2**16 == 65536
    assert out["separation"] is True
    assert out["alpha_verified_at_desk"] is False
    report(9, "order-16 arithmetic: classical one-shot capacity <= 36864 from the "
              "cited independence number (flagged unverified at desk), assisted "
              "capacity 65536")


def test_criterion_10_round_trips(cabello18):
    fixtures = {
        "cabello18": cabello18,
        "peres24": fixture_peres24(),
        "lifted_cabello18": lift(cabello18, 2),
    }
    for name, fixture in fixtures.items():
        channel, strategy, _ = strategy_from_ks(fixture, tol=TOL9)
        opset, verdict = ks_from_strategy(
            channel, strategy, k=strategy.n_messages, tol=TOL9
        )
        assert verdict.is_ks, name
        assert len(opset) == len(fixture), name
    report(10, "strategy/set round trip returns a projective-KS verdict for "
               "all shipped fixtures (18-ray, 24-ray, lifted 18-ray); no "
               "integrity errors raised")

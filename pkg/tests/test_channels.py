import numpy as np
import pytest

from kstoolkit.channels import (
    Channel,
    EaStrategy,
    c0,
    canonical_channel,
    confusability_graph,
    hadamard_separation_bounds,
    ks_from_strategy,
    strategy_from_coloring,
    strategy_from_ks,
    verify_ea_strategy,
)
from kstoolkit.coloring import from_classical, hadamard_coloring
from kstoolkit.errors import PreconditionError
from kstoolkit.graphs import (
    cartesian_product,
    complete_graph,
    cycle_graph,
    empty_graph,
    hadamard_graph,
    independence_number,
    random_gnp,
)
from kstoolkit.ks import OperatorSet, lift
from kstoolkit.linalg import ket_to_projector


def identity_channel(n):
    return Channel.from_table(range(n), range(n), np.eye(n))


def constant_channel(n):
    return Channel.from_table(range(n), ["y"], np.ones((n, 1)))


class TestChannel:
    def test_row_sums_validated(self):
        with pytest.raises(PreconditionError):
            Channel.from_table([0], [0, 1], [[0.6, 0.5]])

    def test_negative_rejected(self):
        with pytest.raises(PreconditionError):
            Channel.from_table([0], [0, 1], [[1.5, -0.5]])


class TestConfusabilityGraph:
    def test_identity_channel_edgeless(self):
        assert confusability_graph(identity_channel(4)).edge_count == 0

    def test_constant_channel_complete(self):
        g = confusability_graph(constant_channel(5))
        assert g.adjacency_equals(complete_graph(5))

    def test_round_trip_c5(self):
        g = cycle_graph(5)
        assert confusability_graph(canonical_channel(g)).adjacency_equals(g)

    def test_round_trip_randoms(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            g = random_gnp(int(rng.integers(1, 15)), float(rng.uniform(0, 1)), rng)
            assert confusability_graph(canonical_channel(g)).adjacency_equals(g)

    def test_round_trip_midsize(self):
        g = cartesian_product(hadamard_graph(4), complete_graph(4))
        assert confusability_graph(canonical_channel(g)).adjacency_equals(g)


class TestCanonicalChannel:
    def test_edgeless_gives_identity(self):
        ch = canonical_channel(empty_graph(3))
        assert len(ch.outputs) == 3
        assert np.allclose(ch.probs, np.eye(3))

    def test_k2_structure(self):
        ch = canonical_channel(complete_graph(2))
        assert len(ch.inputs) == 2 and len(ch.outputs) == 3
        assert np.allclose(ch.probs.sum(axis=1), 1)
        assert np.allclose(ch.probs[ch.probs > 0], 0.5)


class TestC0:
    def test_identity(self):
        assert c0(identity_channel(5))[0] == 5

    def test_constant(self):
        assert c0(constant_channel(5))[0] == 1

    def test_c5(self):
        size, witness = c0(canonical_channel(cycle_graph(5)))
        assert size == 2
        assert len(witness) == 2


class TestVerifyStrategy:
    def test_single_message_always_valid(self):
        ch = canonical_channel(complete_graph(3))
        eye = np.eye(3, dtype=complex)
        strat = EaStrategy(
            n_messages=1,
            local_dim=3,
            measurements={0: tuple((x, ket_to_projector(eye[x])) for x in range(3))},
        )
        report = verify_ea_strategy(ch, strat)
        assert report.ok
        assert report.checked_pairs == 0

    def test_cabello_strategy_valid(self, cabello18):
        channel, strategy, graph = strategy_from_ks(cabello18)
        report = verify_ea_strategy(channel, strategy)
        assert report.ok
        assert strategy.n_messages == 9
        assert len(channel.inputs) == 36

    def test_swapped_messages_detected(self, cabello18):
        channel, strategy, graph = strategy_from_ks(cabello18)
        # reassign two messages' operators to the other's vertices
        swapped = dict(strategy.measurements)
        ops0 = [mat for _, mat in strategy.measurements[0]]
        ops1 = [mat for _, mat in strategy.measurements[1]]
        labels0 = [lab for lab, _ in strategy.measurements[0]]
        labels1 = [lab for lab, _ in strategy.measurements[1]]
        swapped[0] = tuple(zip(labels0, ops1))
        swapped[1] = tuple(zip(labels1, ops0))
        bad = EaStrategy(n_messages=9, local_dim=4, measurements=swapped)
        report = verify_ea_strategy(channel, bad)
        assert not report.ok
        assert report.condition_violations or report.decoding_violations

    def test_povm_strategy_accepted_by_verifier(self):
        # q = 1 with a genuine POVM: the orthogonality path has nothing to
        # check and the decoder trivially succeeds
        ch = canonical_channel(complete_graph(3))
        mats = []
        for k in range(3):
            v = np.array([np.cos(k * 2 * np.pi / 3), np.sin(k * 2 * np.pi / 3)])
            mats.append((2 / 3) * np.outer(v, v).astype(complex))
        strat = EaStrategy(
            n_messages=1,
            local_dim=2,
            measurements={0: tuple((x, mats[x]) for x in range(3))},
            projective=False,
        )
        assert verify_ea_strategy(ch, strat).ok

    def test_unknown_input_label_rejected(self):
        ch = identity_channel(2)
        strat = EaStrategy(
            n_messages=1, local_dim=2,
            measurements={0: ((5, np.eye(2, dtype=complex)),)},
        )
        with pytest.raises(PreconditionError):
            verify_ea_strategy(ch, strat)


class TestStrategyFromKs:
    def test_cabello_separation(self, cabello18):
        channel, strategy, graph = strategy_from_ks(cabello18)
        alpha, witness = independence_number(graph)
        assert alpha == 8 < strategy.n_messages
        assert c0(channel)[0] == 8

    def test_non_ks_rejected(self):
        kets = [
            [1, 0],
            [0, 1],
            [1 / np.sqrt(2), 1 / np.sqrt(2)],
            [1 / np.sqrt(2), -1 / np.sqrt(2)],
        ]
        s = OperatorSet.from_kets(kets)
        with pytest.raises(PreconditionError):
            strategy_from_ks(s)

    def test_lifted_cabello(self, cabello18):
        channel, strategy, graph = strategy_from_ks(lift(cabello18, 2))
        assert strategy.n_messages == 9
        assert strategy.local_dim == 8
        assert verify_ea_strategy(channel, strategy).ok


class TestStrategyFromColoring:
    def test_c5_three_coloring(self):
        g = cycle_graph(5)
        qc = from_classical(g, [0, 1, 0, 1, 2])
        channel, strategy, product = strategy_from_coloring(g, qc)
        assert strategy.n_messages == 5
        assert product.n_vertices == 15
        assert len(product.clique_partition) == 5
        assert verify_ea_strategy(channel, strategy).ok

    def test_hadamard_four(self):
        g = hadamard_graph(4)
        channel, strategy, product = strategy_from_coloring(g, hadamard_coloring(4))
        assert strategy.n_messages == 16
        assert product.n_vertices == 64
        assert verify_ea_strategy(channel, strategy).ok

    def test_single_vertex(self):
        g = empty_graph(1)
        qc = from_classical(g, [0], n_colors=1)
        channel, strategy, product = strategy_from_coloring(g, qc)
        assert strategy.n_messages == 1
        assert verify_ea_strategy(channel, strategy).ok

    def test_alpha_bound_from_product(self):
        # product independence never beats alpha(G) * k on coloring instances
        g = cycle_graph(5)
        qc = from_classical(g, [0, 1, 0, 1, 2])
        _, _, product = strategy_from_coloring(g, qc)
        assert independence_number(product)[0] <= independence_number(g)[0] * 3


class TestKsFromStrategy:
    def test_round_trip_cabello(self, cabello18):
        channel, strategy, _ = strategy_from_ks(cabello18)
        opset, verdict = ks_from_strategy(channel, strategy, k=9)
        assert verdict.classification == "weak_or_projective_ks"
        assert len(opset) == 18

    def test_round_trip_lifted(self, cabello18):
        channel, strategy, _ = strategy_from_ks(lift(cabello18, 2))
        opset, verdict = ks_from_strategy(channel, strategy, k=9)
        assert verdict.classification == "weak_or_projective_ks"

    def test_no_separation_hypothesis_rejected(self):
        ch = canonical_channel(empty_graph(2))
        eye = np.eye(2, dtype=complex)
        strat = EaStrategy(
            n_messages=1, local_dim=2,
            measurements={0: tuple((x, ket_to_projector(eye[x])) for x in range(2))},
        )
        with pytest.raises(PreconditionError):
            ks_from_strategy(ch, strat, k=1)  # c0 = 2 >= 1

    def test_invalid_strategy_rejected(self, cabello18):
        channel, strategy, _ = strategy_from_ks(cabello18)
        bad_measurements = dict(strategy.measurements)
        labels = [lab for lab, _ in strategy.measurements[0]]
        ops1 = [mat for _, mat in strategy.measurements[1]]
        bad_measurements[0] = tuple(zip(labels, ops1))
        bad = EaStrategy(n_messages=9, local_dim=4, measurements=bad_measurements)
        with pytest.raises(PreconditionError):
            ks_from_strategy(channel, bad, k=9)


class TestLiteratureBounds:
    def test_order_sixteen_numbers(self):
        out = hadamard_separation_bounds(16, 2304)
        assert out["c0_star"] == 2**16 == 65536
        assert out["c0_upper_bound"] == 2304 * 16 == 36864
        assert out["separation"] is True
        assert out["alpha_verified_at_desk"] is False

    def test_no_separation_case(self):
        out = hadamard_separation_bounds(4, 8)
        assert out["c0_star"] == 16
        assert out["c0_upper_bound"] == 32
        assert out["separation"] is False

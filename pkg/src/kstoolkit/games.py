"""Two-player nonlocal games: construction, quantum optimality, exact classical value.

Games built from projective KS sets pair each measurement index with its
operators on the maximally entangled state; the verification predicate wins
exactly where the joint outcome probability can be nonzero.  The classical
value is an exact maximum over deterministic strategies, computed by
enumerating one player's strategies and best-responding per input on the
other side, which covers the full product space without approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, DimensionError, PreconditionError
from .graphs import Graph
from .ks import (
    DEFAULT_ENUMERATION_CAP,
    MarkingAssignment,
    MeasurementCover,
    OperatorSet,
    classify,
    enumerate_measurements,
)
from .linalg import DEFAULT_TOL, TolerancePolicy, is_projector, sums_to_identity

__all__ = [
    "NonlocalGame",
    "DeterministicStrategy",
    "GameQuantumStrategy",
    "game_from_ks",
    "coloring_game",
    "coloring_game_strategy",
    "joint_probabilities",
    "quantum_loses_probability_zero",
    "QuantumPlayReport",
    "classical_value",
    "losing_tuple",
    "is_pseudo_telepathy",
    "marking_from_strategy",
    "DEFAULT_STRATEGY_BUDGET",
]

DEFAULT_STRATEGY_BUDGET = 1 << 21

_PI_SUM_TOL = 1e-12


@dataclass(frozen=True)
class NonlocalGame:
    """Input/output label sets, input distribution pi, and win predicate V.

    ``v_table[a, b, x, y]`` is 1 on winning tuples.  Entries of ``pi`` are
    nonnegative and sum to one.
    """

    x_labels: tuple
    y_labels: tuple
    a_labels: tuple
    b_labels: tuple
    pi: np.ndarray
    v_table: np.ndarray

    def __post_init__(self):
        if self.pi.shape != (len(self.x_labels), len(self.y_labels)):
            raise DimensionError("pi shape does not match the input label sets")
        expected = (
            len(self.a_labels),
            len(self.b_labels),
            len(self.x_labels),
            len(self.y_labels),
        )
        if self.v_table.shape != expected:
            raise DimensionError(f"V shape {self.v_table.shape} != {expected}")
        if np.any(self.pi < 0):
            raise PreconditionError("pi entries must be nonnegative")
        if abs(float(self.pi.sum()) - 1.0) > _PI_SUM_TOL:
            raise PreconditionError("pi must sum to 1")


@dataclass(frozen=True)
class DeterministicStrategy:
    s_a: tuple  # input index -> answer index
    s_b: tuple


@dataclass(frozen=True)
class GameQuantumStrategy:
    """Projective measurements per input on the canonical maximally entangled state.

    Joint probabilities are evaluated in local dimension via
    Pr(a,b|x,y) = Tr(P^x_a @ transpose(Q^y_b)) / local_dim.
    """

    local_dim: int
    alice: dict  # x index -> tuple of effects (answer-indexed, possibly ragged)
    bob: dict

    def __post_init__(self):
        tol = DEFAULT_TOL
        for side, table in (("alice", self.alice), ("bob", self.bob)):
            for x, ops in table.items():
                for a, mat in enumerate(ops):
                    if mat.shape != (self.local_dim, self.local_dim):
                        raise DimensionError(f"{side}[{x}][{a}] has shape {mat.shape}")
                    if not is_projector(mat, tol):
                        raise PreconditionError(f"{side}[{x}][{a}] is not a projector")
                if not sums_to_identity(list(ops), tol):
                    raise PreconditionError(f"{side}[{x}] is not a complete measurement")


def joint_probabilities(qs: GameQuantumStrategy, x: int, y: int) -> np.ndarray:
    """Outcome matrix Pr(a, b | x, y) for one input pair."""
    alice = qs.alice[x]
    bob = qs.bob[y]
    out = np.empty((len(alice), len(bob)))
    for a, p in enumerate(alice):
        for b, q in enumerate(bob):
            val = np.trace(p @ q.T) / qs.local_dim
            if abs(val.imag) > DEFAULT_TOL.zero_tol:
                raise PreconditionError(
                    f"joint probability has imaginary part {val.imag:.3e}"
                )
            out[a, b] = val.real
    return out


def game_from_ks(
    s: OperatorSet,
    tol: TolerancePolicy = DEFAULT_TOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
    check: bool = True,
):
    """Nonlocal game and optimal quantum strategy from a projective KS set.

    Inputs are measurement indices, answers are positions inside a
    measurement (answers beyond a measurement's size lose and are unreachable
    by the quantum strategy: measurements stay ragged, never padded).  The
    win predicate holds exactly where the trace overlap of the two selected
    projectors is nonzero; the first player measures the indexed measurement,
    the second its entrywise conjugate.

    ``check=False`` skips the KS precondition so the same construction can be
    exercised on non-KS sets, where a perfect classical strategy must exist
    and map back to a marking function.
    """
    if s.kind == "psd":
        raise PreconditionError("game construction needs a projective set")
    if check:
        verdict = classify(s, tol=tol, cap=cap)
        if not verdict.is_ks:
            raise PreconditionError("input is not a projective KS set")
    cover = enumerate_measurements(s, tol=tol, cap=cap)
    k = len(cover.subsets)
    sizes = [len(sub) for sub in cover.subsets]
    a_max = max(sizes)
    mats = s.matrices
    v_table = np.zeros((a_max, a_max, k, k), dtype=np.int8)
    for x, sub_x in enumerate(cover.subsets):
        for y, sub_y in enumerate(cover.subsets):
            for a, ea in enumerate(sub_x):
                for b, eb in enumerate(sub_y):
                    overlap = np.vdot(mats[ea], mats[eb])
                    if not tol.is_zero(overlap, f"game predicate ({a},{b},{x},{y})"):
                        v_table[a, b, x, y] = 1
    pi = np.full((k, k), 1.0 / (k * k))
    pi.setflags(write=False)
    v_table.setflags(write=False)
    game = NonlocalGame(
        x_labels=tuple(range(k)),
        y_labels=tuple(range(k)),
        a_labels=tuple(range(a_max)),
        b_labels=tuple(range(a_max)),
        pi=pi,
        v_table=v_table,
    )
    alice = {x: tuple(mats[e] for e in sub) for x, sub in enumerate(cover.subsets)}
    bob = {y: tuple(mats[e].conj() for e in sub) for y, sub in enumerate(cover.subsets)}
    strategy = GameQuantumStrategy(local_dim=s.dim, alice=alice, bob=bob)
    return game, strategy


def coloring_game(g: Graph, c: int) -> NonlocalGame:
    """Graph coloring game: equal colors on equal vertices, distinct on edges.

    The referee only asks vertex pairs that are equal or adjacent; all other
    pairs carry zero probability (and a vacuous win).
    """
    if c < 1:
        raise PreconditionError("color count must be >= 1")
    n = g.n_vertices
    support = np.eye(n, dtype=bool)
    for u, v in g.edges():
        support[u, v] = support[v, u] = True
    pi = support / support.sum()
    v_table = np.ones((c, c, n, n), dtype=np.int8)
    for v in range(n):
        for w in range(n):
            if v == w:
                for a in range(c):
                    for b in range(c):
                        v_table[a, b, v, w] = 1 if a == b else 0
            elif g.has_edge(v, w):
                for a in range(c):
                    v_table[a, a, v, w] = 0
    pi.setflags(write=False)
    v_table.setflags(write=False)
    return NonlocalGame(
        x_labels=tuple(range(n)),
        y_labels=tuple(range(n)),
        a_labels=tuple(range(c)),
        b_labels=tuple(range(c)),
        pi=pi,
        v_table=v_table,
    )


def coloring_game_strategy(qc) -> GameQuantumStrategy:
    """Embed a normal-form quantum coloring as a coloring-game strategy.

    The second player uses the entrywise conjugates of the first player's
    projectors, as the normal form prescribes.
    """
    vertices = sorted({v for (v, _a) in qc.projectors})
    alice = {v: tuple(np.asarray(qc.projectors[(v, a)]) for a in range(qc.n_colors)) for v in vertices}
    bob = {v: tuple(m.conj() for m in alice[v]) for v in vertices}
    return GameQuantumStrategy(local_dim=qc.dim, alice=alice, bob=bob)


@dataclass
class QuantumPlayReport:
    flagged: list = field(default_factory=list)
    normalization_violations: list = field(default_factory=list)
    checked_tuples: int = 0

    @property
    def ok(self) -> bool:
        return not (self.flagged or self.normalization_violations)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "flagged": self.flagged,
            "normalization_violations": self.normalization_violations,
            "checked_tuples": self.checked_tuples,
        }


def quantum_loses_probability_zero(
    game: NonlocalGame,
    qs: GameQuantumStrategy,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> QuantumPlayReport:
    """Flag every losing tuple the quantum strategy reaches with positive probability.

    Sweeps all input pairs with positive pi and all answer pairs; a tuple is
    flagged when its outcome probability is nonzero (two-band test) but the
    predicate loses.  An empty report is the definition of an optimal
    strategy.  Answers beyond a ragged measurement are unreachable, hence
    never flagged.
    """
    report = QuantumPlayReport()
    for x in range(len(game.x_labels)):
        for y in range(len(game.y_labels)):
            if game.pi[x, y] <= 0:
                continue
            probs = joint_probabilities(qs, x, y)
            total = float(probs.sum())
            if abs(total - 1.0) > tol.zero_tol:
                report.normalization_violations.append({"x": x, "y": y, "total": total})
            for a in range(probs.shape[0]):
                for b in range(probs.shape[1]):
                    report.checked_tuples += 1
                    if game.v_table[a, b, x, y]:
                        continue
                    if not tol.is_zero(probs[a, b], f"losing tuple ({a},{b},{x},{y})"):
                        report.flagged.append(
                            {"x": x, "y": y, "a": a, "b": b, "probability": probs[a, b]}
                        )
    return report


def _uniform_weight(game: NonlocalGame):
    positive = game.pi[game.pi > 0]
    if positive.size and np.max(np.abs(positive - positive[0])) < 1e-15:
        return positive.size
    return None


def classical_value(game: NonlocalGame, budget: int = DEFAULT_STRATEGY_BUDGET):
    """Exact maximum winning probability over deterministic strategy pairs.

    Enumerates the first player's strategies in lexicographic order and
    best-responds per second-player input, which is an exact reduction of
    the full product maximum.  Uniform-support distributions are scored in
    integer win counts, so the value is a ratio of exact integers.  Ties
    break lexicographically on (s_a, s_b).
    """
    n_x, n_y = len(game.x_labels), len(game.y_labels)
    n_a, n_b = len(game.a_labels), len(game.b_labels)
    total = n_a**n_x
    if total > budget:
        raise BudgetError(
            f"{n_a}^{n_x} = {total} first-player strategies exceed the budget {budget}",
            budget=budget,
        )
    uniform = _uniform_weight(game)
    # weights[x, a, y, b] = contribution of answering (a, b) on inputs (x, y)
    v = game.v_table.astype(np.int64 if uniform else np.float64)
    support = (game.pi > 0).astype(np.int64)
    if uniform:
        weights = np.einsum("abxy,xy->xayb", v, support)
    else:
        weights = np.einsum("abxy,xy->xayb", v, game.pi)
    digits = np.empty((total, n_x), dtype=np.int64)
    codes = np.arange(total, dtype=np.int64)
    for x in range(n_x):
        digits[:, x] = (codes // (n_a ** (n_x - 1 - x))) % n_a
    score = np.zeros((total, n_y, n_b), dtype=weights.dtype)
    for x in range(n_x):
        score += weights[x, digits[:, x], :, :]
    per_y = score.max(axis=2)
    totals = per_y.sum(axis=1)
    best = int(np.argmax(totals))  # first maximum = lexicographically least s_a
    s_a = tuple(int(a) for a in digits[best])
    s_b = tuple(int(np.argmax(score[best, y])) for y in range(n_y))
    if uniform:
        value = float(totals[best]) / uniform
    else:
        value = float(totals[best])
    return value, DeterministicStrategy(s_a=s_a, s_b=s_b)


def losing_tuple(game: NonlocalGame, strategy: DeterministicStrategy):
    """First (x, y, a, b) with positive pi where the strategy answers and loses."""
    for x in range(len(game.x_labels)):
        for y in range(len(game.y_labels)):
            if game.pi[x, y] <= 0:
                continue
            a, b = strategy.s_a[x], strategy.s_b[y]
            if not game.v_table[a, b, x, y]:
                return (x, y, a, b)
    return None


def is_pseudo_telepathy(
    game: NonlocalGame,
    qs: GameQuantumStrategy,
    tol: TolerancePolicy = DEFAULT_TOL,
    budget: int = DEFAULT_STRATEGY_BUDGET,
) -> bool:
    """True iff the quantum strategy never loses while every classical pair can."""
    report = quantum_loses_probability_zero(game, qs, tol)
    if not report.ok:
        return False
    value, _ = classical_value(game, budget=budget)
    return value < 1.0


def marking_from_strategy(
    s: OperatorSet,
    cover: MeasurementCover,
    s_a,
) -> MarkingAssignment:
    """Map a first-player strategy of a KS-derived game back to a marking.

    Element e is marked iff some input x answers the position of e inside
    measurement x.  The result is deliberately unvalidated: for non-KS
    inputs a perfect strategy must map to a valid marking function, and the
    validator is the test for that implication.
    """
    values = [0] * len(s)
    for x, sub in enumerate(cover.subsets):
        a = s_a[x]
        if 0 <= a < len(sub):
            values[sub[a]] = 1
    return MarkingAssignment(values=tuple(values))

"""Classical channels, confusability graphs, and entanglement-assisted strategies.

A strategy for sending one of q messages over a channel is a family of
projective measurements on the sender's half of the canonical maximally
entangled state; the receiver's conditional operators are the partial traces
of the sender's effects.  The verifier checks the pairwise orthogonality
condition over all message pairs and confusable input pairs, then replays the
full decoding: for each channel output it builds the per-message support
projectors and confirms every consistent (message, input, output) path
decodes uniquely.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .coloring import QuantumColoring, verify_normal_form
from .errors import DimensionError, IntegrityError, PreconditionError
from .graphs import (
    Graph,
    cartesian_product,
    complete_graph,
    independence_number,
    orthogonality_graph,
)
from .ks import (
    DEFAULT_ENUMERATION_CAP,
    OperatorSet,
    classify,
    enumerate_measurements,
)
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    bob_residual,
    hs_inner,
    hs_inner_real,
    is_projector,
    support_projector,
    sums_to_identity,
)

__all__ = [
    "Channel",
    "EaStrategy",
    "EaVerifyReport",
    "confusability_graph",
    "canonical_channel",
    "c0",
    "verify_ea_strategy",
    "strategy_from_ks",
    "strategy_from_coloring",
    "ks_from_strategy",
    "hadamard_separation_bounds",
]

_ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Channel:
    """Finite conditional distribution N(y|x) with labeled inputs and outputs."""

    inputs: tuple
    outputs: tuple
    probs: np.ndarray  # |X| x |Y|, row stochastic

    def __post_init__(self):
        p = self.probs
        if p.shape != (len(self.inputs), len(self.outputs)):
            raise DimensionError(
                f"probability table shape {p.shape} does not match "
                f"{len(self.inputs)} inputs x {len(self.outputs)} outputs"
            )
        if np.any(p < 0):
            raise PreconditionError("channel probabilities must be nonnegative")
        rows = p.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > _ROW_SUM_TOL:
            raise PreconditionError("channel rows must sum to 1 within 1e-12")

    @classmethod
    def from_table(cls, inputs, outputs, probs):
        p = np.array(probs, dtype=np.float64)
        p.setflags(write=False)
        return cls(inputs=tuple(inputs), outputs=tuple(outputs), probs=p)

    def input_index(self, label) -> int:
        return self.inputs.index(label)


@dataclass(frozen=True)
class EaStrategy:
    """Per-message measurements on the maximally entangled state.

    ``measurements[m]`` lists (input label, effect) pairs; inputs the
    measurement can never produce are absent rather than stored as zero
    operators.  The present effects must form a complete measurement,
    projective unless ``projective=False`` (the verifier's orthogonality
    path handles general POVM effects, but no constructor emits them).
    """

    n_messages: int
    local_dim: int
    measurements: dict
    projective: bool = True

    def __post_init__(self):
        tol = DEFAULT_TOL
        if set(self.measurements) != set(range(self.n_messages)):
            raise PreconditionError("measurements must cover messages 0..q-1 exactly")
        for m, ops in self.measurements.items():
            mats = []
            for label, mat in ops:
                if mat.shape != (self.local_dim, self.local_dim):
                    raise DimensionError(
                        f"message {m}, input {label!r}: shape {mat.shape} != local_dim"
                    )
                if self.projective:
                    if not is_projector(mat, tol):
                        raise PreconditionError(
                            f"message {m}, input {label!r}: effect is not a projector"
                        )
                elif float(np.linalg.eigvalsh((mat + mat.conj().T) / 2)[0]) < -tol.zero_tol:
                    raise PreconditionError(
                        f"message {m}, input {label!r}: POVM effect is not PSD"
                    )
                mats.append(mat)
            if not sums_to_identity(mats, tol):
                raise PreconditionError(f"message {m}: effects do not sum to identity")

    def effects(self, m: int):
        return self.measurements[m]


def confusability_graph(channel: Channel) -> Graph:
    """Graph on inputs joining distinct pairs that share a positive-probability output."""
    support = channel.probs > 0  # strict positivity, compared to literal zero
    overlap = support @ support.T
    n = len(channel.inputs)
    edges = [(x, y) for x in range(n) for y in range(x + 1, n) if overlap[x, y]]
    return Graph.from_edges(n, edges, labels=channel.inputs)


def canonical_channel(g: Graph) -> Channel:
    """Minimal witness channel whose confusability graph is exactly ``g``.

    Input x spreads its mass uniformly over one private output and one shared
    output per incident edge, so two inputs are confusable iff adjacent.
    """
    n = g.n_vertices
    edge_list = list(g.edges())
    outputs = [f"v:{v}" for v in range(n)] + [f"e:{u}-{v}" for u, v in edge_list]
    probs = np.zeros((n, n + len(edge_list)))
    for x in range(n):
        share = 1.0 / (1 + g.degree(x))
        probs[x, x] = share
        for j, (u, v) in enumerate(edge_list):
            if x in (u, v):
                probs[x, n + j] = share
    probs.setflags(write=False)
    return Channel(inputs=tuple(range(n)), outputs=tuple(outputs), probs=probs)


def c0(channel: Channel, max_vertices: int = 2000):
    """One-shot zero-error capacity: exact independence number of the
    confusability graph, with the witness translated back to input labels."""
    g = confusability_graph(channel)
    size, witness = independence_number(g, max_vertices=max_vertices)
    return size, tuple(channel.inputs[v] for v in witness)


@dataclass
class EaVerifyReport:
    n_messages: int
    condition_violations: list = field(default_factory=list)
    support_violations: list = field(default_factory=list)
    decoding_violations: list = field(default_factory=list)
    checked_pairs: int = 0
    checked_paths: int = 0

    @property
    def ok(self) -> bool:
        return not (
            self.condition_violations or self.support_violations or self.decoding_violations
        )

    def to_dict(self) -> dict:
        return {
            "n_messages": self.n_messages,
            "ok": self.ok,
            "condition_violations": self.condition_violations,
            "support_violations": self.support_violations,
            "decoding_violations": self.decoding_violations,
            "checked_pairs": self.checked_pairs,
            "checked_paths": self.checked_paths,
        }


def verify_ea_strategy(
    channel: Channel,
    strategy: EaStrategy,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> EaVerifyReport:
    """Full verification of a zero-error entanglement-assisted strategy.

    Checks, for every unordered message pair and every confusable input pair
    (equal inputs included), that the receiver-side conditional operators are
    trace-orthogonal; then simulates the decoder: per channel output the
    per-message summed conditionals must have mutually orthogonal supports,
    and every (message, input, output) path with positive probability must
    decode uniquely to its message.
    """
    labels = set(channel.inputs)
    for m, ops in strategy.measurements.items():
        for label, _ in ops:
            if label not in labels:
                raise PreconditionError(f"message {m} uses unknown input {label!r}")

    report = EaVerifyReport(n_messages=strategy.n_messages)
    graph = confusability_graph(channel)
    index = {label: i for i, label in enumerate(channel.inputs)}

    betas: list[dict] = []
    for m in range(strategy.n_messages):
        betas.append(
            {label: bob_residual(mat, strategy.local_dim) for label, mat in strategy.effects(m)}
        )

    def confusable(x_label, y_label) -> bool:
        if x_label == y_label:
            return True
        return graph.has_edge(index[x_label], index[y_label])

    for m, m2 in itertools.combinations(range(strategy.n_messages), 2):
        for x_label, beta_x in betas[m].items():
            for y_label, beta_y in betas[m2].items():
                if not confusable(x_label, y_label):
                    continue
                report.checked_pairs += 1
                val = hs_inner(beta_x, beta_y)
                if not tol.is_zero(val, f"messages {m},{m2} inputs {x_label},{y_label}"):
                    report.condition_violations.append(
                        {"m": m, "m_prime": m2, "x": x_label, "x_prime": y_label,
                         "value": abs(val)}
                    )

    # decoder simulation on the mutually orthogonal supports
    support = channel.probs > 0
    for y in range(len(channel.outputs)):
        active = [channel.inputs[x] for x in np.nonzero(support[:, y])[0]]
        summed = {}
        for m in range(strategy.n_messages):
            present = [betas[m][x] for x in active if x in betas[m]]
            if present:
                summed[m] = sum(present)
        for m, m2 in itertools.combinations(sorted(summed), 2):
            val = hs_inner_real(summed[m], summed[m2], tol)
            if not tol.is_zero(val, f"output {y}: support overlap of messages {m},{m2}"):
                report.support_violations.append(
                    {"y": channel.outputs[y], "m": m, "m_prime": m2, "value": abs(val)}
                )
        projectors = {m: support_projector(op, tol) for m, op in summed.items()}
        for m in sorted(summed):
            for x_label, beta_x in betas[m].items():
                if x_label not in active:
                    continue
                mass = float(np.trace(beta_x).real)
                if mass <= tol.zero_tol:
                    continue
                report.checked_paths += 1
                captured = hs_inner_real(projectors[m], beta_x, tol)
                if abs(captured - mass) > tol.zero_tol:
                    report.decoding_violations.append(
                        {"m": m, "x": x_label, "y": channel.outputs[y],
                         "detail": f"own support captures {captured:.3e} of {mass:.3e}"}
                    )
                for m2 in sorted(summed):
                    if m2 == m:
                        continue
                    leak = hs_inner_real(projectors[m2], beta_x, tol)
                    if not tol.is_zero(leak, f"decode leak {m}->{m2} at output {y}"):
                        report.decoding_violations.append(
                            {"m": m, "x": x_label, "y": channel.outputs[y],
                             "detail": f"support of message {m2} captures {leak:.3e}"}
                        )
    return report


def strategy_from_ks(
    s: OperatorSet,
    tol: TolerancePolicy = DEFAULT_TOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
):
    """Channel, strategy and orthogonality graph realized by a projective KS set.

    The multiset orthogonality graph of the set's measurements becomes the
    confusability graph; message m is sent by measuring the m-th measurement
    and transmitting the vertex (m, outcome).  The constructed strategy is
    verified before being returned, and the number of messages exceeds the
    exact independence number whenever the input really is a KS set.
    """
    if s.kind == "psd":
        raise PreconditionError("strategy construction needs a projective set")
    verdict = classify(s, tol=tol, cap=cap)
    if not verdict.is_ks:
        raise PreconditionError(
            "input is not a projective KS set: a marking function exists"
        )
    cover = enumerate_measurements(s, tol=tol, cap=cap)
    graph = orthogonality_graph(s, cover, tol)
    channel = canonical_channel(graph)
    vertex_of = {lab: v for v, lab in enumerate(graph.labels)}
    measurements = {}
    for m, subset in enumerate(cover.subsets):
        measurements[m] = tuple(
            (vertex_of[(m, e)], s.elements[e][1]) for e in subset
        )
    strategy = EaStrategy(
        n_messages=len(cover.subsets),
        local_dim=s.dim,
        measurements=measurements,
    )
    report = verify_ea_strategy(channel, strategy, tol)
    if not report.ok:
        raise IntegrityError(
            "strategy built from a verified KS set failed verification; "
            "this is a toolkit bug or a tolerance ambiguity"
        )
    return channel, strategy, graph


def strategy_from_coloring(
    g: Graph,
    qc: QuantumColoring,
    tol: TolerancePolicy = DEFAULT_TOL,
):
    """Strategy on the product of ``g`` with a complete graph, from a coloring.

    Vertex (v, i) of the product carries the color-i projector of vertex v;
    message v is sent by measuring vertex v's measurement.  Valid colorings
    give verified strategies with one message per vertex of ``g``.
    """
    report = verify_normal_form(g, qc, tol)
    if not report.ok:
        raise PreconditionError(
            f"coloring fails verification with {len(report.violations)} violations"
        )
    k = qc.n_colors
    product = cartesian_product(g, complete_graph(k))
    partition = tuple(tuple(v * k + i for i in range(k)) for v in range(g.n_vertices))
    product = replace(product, clique_partition=partition)
    channel = canonical_channel(product)
    measurements = {
        v: tuple((v * k + i, np.asarray(qc.projectors[(v, i)])) for i in range(k))
        for v in range(g.n_vertices)
    }
    strategy = EaStrategy(
        n_messages=g.n_vertices,
        local_dim=qc.dim,
        measurements=measurements,
    )
    verify = verify_ea_strategy(channel, strategy, tol)
    if not verify.ok:
        raise IntegrityError(
            "strategy built from a verified coloring failed verification; "
            "this is a toolkit bug or a tolerance ambiguity"
        )
    return channel, strategy, product


def ks_from_strategy(
    channel: Channel,
    strategy: EaStrategy,
    k: int,
    tol: TolerancePolicy = DEFAULT_TOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
):
    """Extract a projective KS set from a verified separating strategy.

    Preconditions (both checked): the strategy verifies against the channel,
    and the exact one-shot capacity is below ``k``.  The de-duplicated union
    of the strategy's nonzero effects must then classify as a projective KS
    set; a contradiction raises IntegrityError, since it would falsify a
    machine-checked implication rather than describe the input.
    """
    report = verify_ea_strategy(channel, strategy, tol)
    if not report.ok:
        raise PreconditionError("strategy does not verify against the channel")
    capacity, _ = c0(channel)
    if not capacity < k:
        raise PreconditionError(
            f"no separation hypothesis: c0 = {capacity} is not below k = {k}"
        )
    mats: list[np.ndarray] = []
    labels: list[str] = []
    for m in range(strategy.n_messages):
        for x_label, mat in strategy.effects(m):
            if any(np.max(np.abs(mat - known)) <= tol.zero_tol for known in mats):
                continue
            mats.append(mat)
            labels.append(f"{m}:{x_label}")
    opset = OperatorSet.from_projectors(mats, labels=labels)
    verdict = classify(opset, tol=tol, cap=cap)
    if not verdict.is_ks:
        raise IntegrityError(
            "strategy effects admit a marking function despite a verified "
            "separation; this is a toolkit bug or a tolerance ambiguity"
        )
    return opset, verdict


def hadamard_separation_bounds(n: int, alpha_value: int, n_colors: int | None = None) -> dict:
    """Capacity bounds for the order-n sign-vector graph boxed with a complete graph.

    ``alpha_value`` is taken as given (a literature value) and explicitly
    flagged as not verified at desk scale; the returned bounds are the pure
    arithmetic consequences: assisted one-shot capacity 2^n from a valid
    quantum coloring, classical one-shot capacity at most alpha * k from the
    product bound on independence numbers.
    """
    k = n if n_colors is None else n_colors
    if alpha_value < 1 or n < 1 or k < 1:
        raise PreconditionError("arguments must be positive")
    return {
        "order": n,
        "k": k,
        "n_vertices": (2**n) * k,
        "c0_star": 2**n,
        "c0_upper_bound": alpha_value * k,
        "alpha_input": alpha_value,
        "alpha_verified_at_desk": False,
        "separation": 2**n > alpha_value * k,
    }

"""Quantum colorings in normal form and their classical/KS dichotomy.

A normal-form quantum c-coloring stores only the first player's projectors:
equal rank r, projective per vertex, on the maximally entangled state of
dimension r*c, with the second player fixed to entrywise conjugates.  The
verifier checks the four structural conditions plus trace-orthogonality of
same-color projectors across every edge; for phase-structured colorings the
edge and vertex checks run in exact integer arithmetic.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .cyclotomic import PhaseKet, reduction_matrix, root_sum_is_zero
from .errors import BudgetError, IntegrityError, PreconditionError
from .graphs import Graph, hadamard_sign_vectors, is_proper_coloring
from .ks import (
    MarkingAssignment,
    MeasurementCover,
    OperatorSet,
    SearchRecord,
    search_marking_detailed,
)
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    hs_inner,
    is_projector,
    ket_to_projector,
    sums_to_identity,
)

__all__ = [
    "QuantumColoring",
    "NormalFormReport",
    "ColoringCharacterization",
    "verify_normal_form",
    "from_classical",
    "hadamard_coloring",
    "hadamard_vertex_check",
    "hadamard_sampled_edge_violations",
    "ks_characterization",
]

DEFAULT_HADAMARD_COLORING_BUDGET = 16
_LAZY_ABOVE = 8  # materialize projector maps only up to this order


@dataclass(frozen=True)
class QuantumColoring:
    """Normal-form coloring data: (vertex, color) -> projector of rank ``rank``."""

    n_colors: int
    rank: int
    projectors: Mapping
    exact_kets: Mapping | None = None
    notes: tuple = ()

    @property
    def dim(self) -> int:
        return self.rank * self.n_colors

    def measurement(self, v: int):
        return [self.projectors[(v, a)] for a in range(self.n_colors)]


@dataclass
class NormalFormReport:
    n_colors: int
    rank: int
    dim: int
    violations: list = field(default_factory=list)
    checked_vertices: int = 0
    checked_edges: int = 0
    arithmetic: str = "float"
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "n_colors": self.n_colors,
            "rank": self.rank,
            "dim": self.dim,
            "ok": self.ok,
            "violations": self.violations,
            "checked_vertices": self.checked_vertices,
            "checked_edges": self.checked_edges,
            "arithmetic": self.arithmetic,
            "notes": list(self.notes),
        }


def _exact_vertex_violations(qc: QuantumColoring, v: int) -> list:
    out = []
    kets = [qc.exact_kets[(v, a)] for a in range(qc.n_colors)]
    for a, k in enumerate(kets):
        coeffs = k.inner_coeffs(k)
        if coeffs[0] != k.norm_sq or np.any(coeffs[1:]):
            out.append({"kind": "rank", "v": v, "alpha": a, "value": "norm != 1"})
    for a, b in itertools.combinations(range(qc.n_colors), 2):
        if not kets[a].is_orthogonal_to(kets[b]):
            out.append(
                {"kind": "completeness", "v": v, "alpha": a, "beta": b, "value": "overlap != 0"}
            )
    # rank-one kets that are pairwise orthonormal and c = dim in number form a
    # complete basis, so orthonormality is the whole completeness check here
    return out


def _float_vertex_violations(qc: QuantumColoring, v: int, tol: TolerancePolicy) -> list:
    out = []
    mats = []
    for a in range(qc.n_colors):
        key = (v, a)
        if key not in qc.projectors:
            raise PreconditionError(f"coloring has no projector for vertex {v}, color {a}")
        m = qc.projectors[key]
        if m.shape != (qc.dim, qc.dim):
            out.append({"kind": "dimension", "v": v, "alpha": a, "value": str(m.shape)})
            continue
        if not is_projector(m, tol):
            out.append({"kind": "projector", "v": v, "alpha": a, "value": "not a projector"})
            continue
        tr = float(np.trace(m).real)
        if abs(tr - qc.rank) > tol.zero_tol:
            out.append({"kind": "rank", "v": v, "alpha": a, "value": tr})
        mats.append(m)
    if len(mats) == qc.n_colors and not sums_to_identity(mats, tol):
        out.append({"kind": "completeness", "v": v, "value": "sum != identity"})
    return out


def verify_normal_form(
    g: Graph,
    qc: QuantumColoring,
    tol: TolerancePolicy = DEFAULT_TOL,
    edges=None,
    vertices=None,
) -> NormalFormReport:
    """Check the normal-form conditions and same-color edge orthogonality.

    ``vertices`` and ``edges`` default to all of ``g``; pass subsets to
    verify samples of instances too large to sweep.  The report lists every
    violation with its (v, w, alpha) location and offending value; an empty
    list is the definition of a valid quantum coloring here.
    """
    if qc.n_colors < 1 or qc.rank < 1:
        raise PreconditionError("coloring needs positive color count and rank")
    report = NormalFormReport(
        n_colors=qc.n_colors, rank=qc.rank, dim=qc.dim, notes=qc.notes
    )
    vertices = range(g.n_vertices) if vertices is None else list(vertices)
    edges = list(g.edges()) if edges is None else [tuple(e) for e in edges]

    exact = qc.exact_kets is not None and qc.rank == 1
    used_exact = used_float = False
    for v in vertices:
        if exact:
            report.violations.extend(_exact_vertex_violations(qc, v))
            used_exact = True
        else:
            report.violations.extend(_float_vertex_violations(qc, v, tol))
            used_float = True
        report.checked_vertices += 1

    for v, w in edges:
        for a in range(qc.n_colors):
            if exact:
                ka, kb = qc.exact_kets[(v, a)], qc.exact_kets[(w, a)]
                if not ka.is_orthogonal_to(kb):
                    report.violations.append(
                        {"kind": "edge_consistency", "v": v, "w": w, "alpha": a,
                         "value": "trace overlap != 0"}
                    )
                used_exact = True
            else:
                val = hs_inner(qc.projectors[(v, a)], qc.projectors[(w, a)])
                if not tol.is_zero(val, f"edge ({v},{w}) color {a} consistency"):
                    report.violations.append(
                        {"kind": "edge_consistency", "v": v, "w": w, "alpha": a,
                         "value": abs(val)}
                    )
                used_float = True
        report.checked_edges += 1

    if used_exact and used_float:
        report.arithmetic = "mixed"
    elif used_exact:
        report.arithmetic = "exact"
    if g.edge_count == 0:
        report.notes = report.notes + ("edgeless graph: consistency condition is vacuous",)
    report.violations.sort(key=lambda d: (d.get("v", -1), d.get("w", -1), d.get("alpha", -1)))
    return report


def from_classical(g: Graph, coloring, n_colors: int | None = None) -> QuantumColoring:
    """Quantum coloring from a proper classical coloring.

    Vertex v with classical color s gets the projective measurement whose
    color-i projector is the standard basis projector onto |i + s mod c>.
    """
    colors = list(coloring)
    if len(colors) != g.n_vertices:
        raise PreconditionError("coloring must assign a color to every vertex")
    c = n_colors if n_colors is not None else (max(colors) + 1 if colors else 1)
    if any(not 0 <= s < c for s in colors):
        raise PreconditionError(f"colors must lie in [0, {c})")
    if not is_proper_coloring(g, colors):
        raise PreconditionError("input is not a proper coloring")
    eye = np.eye(c, dtype=np.complex128)
    projectors = {}
    for v, s in enumerate(colors):
        for i in range(c):
            p = ket_to_projector(eye[(i + s) % c])
            projectors[(v, i)] = p
    notes = ("edgeless graph accepted",) if g.edge_count == 0 else ()
    return QuantumColoring(n_colors=c, rank=1, projectors=projectors, notes=notes)


class _HadamardKets(Mapping):
    """Lazy (vertex, color) -> PhaseKet map for the order-n coloring."""

    def __init__(self, n: int):
        self.n = n
        self.signs = hadamard_sign_vectors(n)

    def __getitem__(self, key):
        v, a = key
        if not (0 <= v < self.signs.shape[0] and 0 <= a < self.n):
            raise KeyError(key)
        return PhaseKet(
            signs=tuple(int(s) for s in self.signs[v]),
            phase_step=a,
            order=self.n,
            norm_sq=self.n,
        )

    def __len__(self):
        return self.signs.shape[0] * self.n

    def __iter__(self):
        for v in range(self.signs.shape[0]):
            for a in range(self.n):
                yield (v, a)

    def __contains__(self, key):
        v, a = key
        return 0 <= v < self.signs.shape[0] and 0 <= a < self.n


class _HadamardProjectors(_HadamardKets):
    def __getitem__(self, key):
        ket = super().__getitem__(key)
        return ket_to_projector(ket.to_complex())


def hadamard_coloring(n: int, budget: int = DEFAULT_HADAMARD_COLORING_BUDGET) -> QuantumColoring:
    """Rank-1 quantum n-coloring of the order-n Hadamard graph.

    Vertex u, color a gets the ket with j-th amplitude u_j * w^(a*j)/sqrt(n),
    w = exp(2*pi*i/n).  The construction is validated by
    :func:`verify_normal_form` (exact arithmetic), which is the ground truth;
    nothing about it is assumed.  Odd orders are allowed but flagged, since
    the underlying graph is then edgeless.
    """
    if n < 1:
        raise PreconditionError("order must be >= 1")
    if n > budget:
        raise BudgetError(f"coloring of order {n} exceeds budget {budget}", budget=budget)
    kets = _HadamardKets(n)
    notes = ()
    if n % 2 == 1:
        notes = ("odd order: the orthogonality graph is edgeless",)
    if n <= _LAZY_ABOVE:
        projectors: Mapping = {key: ket_to_projector(kets[key].to_complex()) for key in kets}
    else:
        projectors = _HadamardProjectors(n)
        notes = notes + ("projectors materialized lazily",)
    return QuantumColoring(n_colors=n, rank=1, projectors=projectors, exact_kets=kets, notes=notes)


def hadamard_vertex_check(n: int) -> dict:
    """Exact per-vertex completeness and rank certificate covering all 2^n vertices.

    At vertex u the Gram matrix of the n measurement kets has entries
    (1/n) * sum_j u_j^2 w^((b-a)j); every amplitude sign squares to one, so
    after verifying the sign domain of all vertices the Gram matrix is the
    same for each of them and the n x n table of root-of-unity sums certifies
    orthonormality (hence rank one and completeness) everywhere at once.
    """
    signs = hadamard_sign_vectors(n)
    violations = []
    if not np.all(np.abs(signs) == 1):
        violations.append({"kind": "sign_domain", "value": "entries not in {+-1}"})
    for a in range(n):
        for b in range(n):
            coeffs = np.zeros(n, dtype=np.int64)
            for j in range(n):
                coeffs[((b - a) * j) % n] += 1
            if a == b:
                if coeffs[0] != n or np.any(coeffs[1:]):
                    violations.append({"kind": "rank", "alpha": a, "value": "norm != 1"})
            elif not root_sum_is_zero(coeffs, n):
                violations.append(
                    {"kind": "completeness", "alpha": a, "beta": b, "value": "overlap != 0"}
                )
    return {
        "order": n,
        "vertices_covered": int(signs.shape[0]),
        "pairs_checked": n * n,
        "violations": violations,
        "method": "sign-domain sweep + shared Gram identity, exact integers",
    }


def hadamard_sampled_edge_violations(n: int, pairs: np.ndarray) -> list:
    """Exact same-color consistency check over sampled sign-vector edge pairs.

    ``pairs`` has shape (E, 2, n).  Every pair must be an edge (integer inner
    product zero); for each color the same-color kets at the two endpoints
    must then be trace-orthogonal, which reduces to integer coefficient
    vectors over roots of unity.  Returns violation records, empty when the
    coloring is consistent on all sampled edges and colors.
    """
    pairs = np.asarray(pairs, dtype=np.int64)
    u, w = pairs[:, 0, :], pairs[:, 1, :]
    dots = np.sum(u * w, axis=1)
    if np.any(dots != 0):
        bad = int(np.nonzero(dots != 0)[0][0])
        raise PreconditionError(f"pair {bad} is not an edge: inner product {dots[bad]}")
    violations = []
    for a in range(n):
        coeffs = _phase_inner_coeff_rows(u, w, a, a, n)
        nonzero = np.any(coeffs @ reduction_matrix(n), axis=1)
        for e in np.nonzero(nonzero)[0]:
            violations.append({"kind": "edge_consistency", "edge": int(e), "alpha": a})
    return violations


def _phase_inner_coeff_rows(u: np.ndarray, w: np.ndarray, alpha: int, beta: int, order: int):
    """Row-wise integer coefficient vectors of norm_sq * <psi_{u,alpha}|psi_{w,beta}>.

    Amplitude products u_j w_j land on the root power ((beta-alpha)*j) mod
    order; the accumulation is one integer matmul against an indicator table.
    """
    dim = u.shape[1]
    target = (np.arange(dim) * ((beta - alpha) % order)) % order
    ind = np.zeros((dim, order), dtype=np.int64)
    ind[np.arange(dim), target] = 1
    return (u * w) @ ind


@dataclass(frozen=True)
class ColoringCharacterization:
    """Outcome of the marking-function dichotomy for a verified coloring."""

    kind: str  # "classical_coloring" | "projective_ks"
    coloring: tuple | None
    exhaustion: SearchRecord | None
    operator_set: OperatorSet
    cover: MeasurementCover
    marking: MarkingAssignment | None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n_elements": len(self.operator_set),
               "n_measurements": len(self.cover)}
        if self.coloring is not None:
            out["coloring"] = list(self.coloring)
        if self.exhaustion is not None:
            out["exhaustion"] = self.exhaustion.to_dict()
        return out


def ks_characterization(
    g: Graph,
    qc: QuantumColoring,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> ColoringCharacterization:
    """Decide whether a valid coloring's projector union admits a marking function.

    The union is de-duplicated (equal matrices across slots share one
    element) and covered by the per-vertex measurements.  A marking that
    avoids orthogonal marked pairs is extracted into a proper classical
    coloring via color(v) = alpha where the (v, alpha) slot is marked,
    certifying that c classical colors suffice; an exhausted search is the
    projective-KS certificate for this coloring's union.  Exactly one of the
    two outcomes is returned, never both, never neither.
    """
    report = verify_normal_form(g, qc, tol)
    if not report.ok:
        raise PreconditionError(
            f"coloring fails normal-form verification with {len(report.violations)} violations"
        )
    mats: list[np.ndarray] = []
    labels: list[str] = []
    slot_to_element: dict = {}
    for v in range(g.n_vertices):
        for a in range(qc.n_colors):
            m = qc.projectors[(v, a)]
            for idx, known in enumerate(mats):
                if np.max(np.abs(known - m)) <= tol.zero_tol:
                    slot_to_element[(v, a)] = idx
                    break
            else:
                slot_to_element[(v, a)] = len(mats)
                mats.append(m)
                labels.append(f"{v}:{a}")
    opset = OperatorSet.from_projectors(mats, labels=labels)
    subsets = []
    seen = set()
    for v in range(g.n_vertices):
        sub = tuple(sorted({slot_to_element[(v, a)] for a in range(qc.n_colors)}))
        if sub not in seen:
            seen.add(sub)
            subsets.append(sub)
    cover = MeasurementCover(subsets=tuple(subsets))
    cover.validate(opset, tol)
    assignment, record = search_marking_detailed(opset, cover, "orthogonal_pair", tol)
    if assignment is None:
        return ColoringCharacterization(
            kind="projective_ks",
            coloring=None,
            exhaustion=record,
            operator_set=opset,
            cover=cover,
            marking=None,
        )
    colors = []
    for v in range(g.n_vertices):
        marked_alpha = [
            a for a in range(qc.n_colors) if assignment.values[slot_to_element[(v, a)]] == 1
        ]
        if not marked_alpha:
            raise IntegrityError(f"marking leaves vertex {v} without a color")
        colors.append(marked_alpha[0])
    if not is_proper_coloring(g, colors):
        raise IntegrityError("extracted coloring is improper despite a valid marking")
    return ColoringCharacterization(
        kind="classical_coloring",
        coloring=tuple(colors),
        exhaustion=None,
        operator_set=opset,
        cover=cover,
        marking=assignment,
    )

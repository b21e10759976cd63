"""Operator sets with marking-function semantics.

A marking function picks exactly one element from every complete measurement
(subset summing to the identity) contained in a set.  The module enumerates
those measurements, searches for marking functions under the configurable
forbidden-pair predicates, and classifies sets accordingly.  A "no marking
function" verdict is a universally quantified claim, so every negative answer
carries an exhaustion record of the completed search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetError,
    ClassificationError,
    DimensionError,
    PreconditionError,
)
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_matrix,
    hs_inner,
    is_projector,
    ket_to_projector,
    psd_leq,
    support_basis,
    sums_to_identity,
)

__all__ = [
    "OperatorSet",
    "MeasurementCover",
    "MarkingAssignment",
    "SearchRecord",
    "KsVerdict",
    "enumerate_measurements",
    "search_marking",
    "search_marking_detailed",
    "marking_violations",
    "classify",
    "weak_from_projective",
    "lift",
    "parity_obstruction",
    "fixture_cabello18",
    "fixture_peres24",
]

KINDS = ("vectors", "projectors", "psd")
FORBID_MODES = ("none", "orthogonal_pair", "subidentity_pair")

DEFAULT_ENUMERATION_CAP = 40


@dataclass(frozen=True)
class OperatorSet:
    """Labeled finite set of operators in a fixed dimension.

    ``kind`` is one of ``vectors`` (rank-1 projectors, with the underlying
    kets kept alongside when known), ``projectors`` or ``psd``.  Elements are
    pairwise distinct and nonzero; psd elements must fit below the identity.
    """

    dim: int
    elements: tuple
    kind: str
    kets: tuple | None = None

    def __post_init__(self):
        tol = DEFAULT_TOL
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.dim < 1:
            raise DimensionError("dimension must be positive")
        for label, mat in self.elements:
            if mat.shape != (self.dim, self.dim):
                raise DimensionError(
                    f"element {label!r} has shape {mat.shape}, expected {(self.dim, self.dim)}"
                )
            if float(np.trace(mat).real) <= tol.ambiguity_tol:
                raise PreconditionError(
                    f"element {label!r} has (near-)zero trace; zero operators are "
                    "represented by absence, not stored"
                )
            if self.kind in ("vectors", "projectors"):
                if not is_projector(mat, tol):
                    raise PreconditionError(f"element {label!r} is not a projector")
                if self.kind == "vectors" and abs(float(np.trace(mat).real) - 1.0) > tol.zero_tol:
                    raise PreconditionError(f"element {label!r} is not rank-1")
            else:
                if np.max(np.abs(mat - mat.conj().T)) > tol.zero_tol:
                    raise PreconditionError(f"element {label!r} is not Hermitian")
                evals = np.linalg.eigvalsh(mat)
                if evals[0] < -tol.zero_tol:
                    raise PreconditionError(f"element {label!r} is not PSD")
                if evals[-1] > 1.0 + tol.zero_tol:
                    raise PreconditionError(
                        f"element {label!r} has eigenvalue {evals[-1]} > 1; not a POVM element"
                    )
        mats = [m for _, m in self.elements]
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if np.max(np.abs(mats[i] - mats[j])) <= tol.zero_tol:
                    raise PreconditionError(
                        f"duplicate elements at indices {i} and {j} (equal within tolerance)"
                    )
        if self.kets is not None and len(self.kets) != len(self.elements):
            raise DimensionError("kets, when given, must match the element count")

    def __len__(self):
        return len(self.elements)

    @property
    def labels(self):
        return tuple(label for label, _ in self.elements)

    @property
    def matrices(self):
        return tuple(mat for _, mat in self.elements)

    @classmethod
    def from_kets(cls, kets, labels=None, tol: TolerancePolicy = DEFAULT_TOL):
        kets = [np.asarray(k, dtype=np.complex128) for k in kets]
        if not kets:
            raise PreconditionError("empty operator set")
        dim = kets[0].size
        norm_kets = []
        for k in kets:
            nrm = np.linalg.norm(k)
            if nrm <= tol.ambiguity_tol:
                raise PreconditionError("zero ket")
            norm_kets.append(k / nrm)
        if labels is None:
            labels = [_ket_label(k) for k in norm_kets]
        elements = tuple(
            (str(lab), as_matrix(ket_to_projector(k))) for lab, k in zip(labels, norm_kets)
        )
        frozen = []
        for k in norm_kets:
            k = k.copy()
            k.setflags(write=False)
            frozen.append(k)
        return cls(dim=dim, elements=elements, kind="vectors", kets=tuple(frozen))

    @classmethod
    def from_projectors(cls, mats, labels=None):
        mats = [as_matrix(m) for m in mats]
        if not mats:
            raise PreconditionError("empty operator set")
        if labels is None:
            labels = [f"P{i}" for i in range(len(mats))]
        return cls(
            dim=mats[0].shape[0],
            elements=tuple((str(lab), m) for lab, m in zip(labels, mats)),
            kind="projectors",
        )

    @classmethod
    def from_psd(cls, mats, labels=None):
        mats = [as_matrix(m) for m in mats]
        if not mats:
            raise PreconditionError("empty operator set")
        if labels is None:
            labels = [f"E{i}" for i in range(len(mats))]
        return cls(
            dim=mats[0].shape[0],
            elements=tuple((str(lab), m) for lab, m in zip(labels, mats)),
            kind="psd",
        )


def _ket_label(k: np.ndarray) -> str:
    def fmt(z):
        if abs(z.imag) < 1e-12:
            return f"{z.real:.3g}"
        return f"{z.real:.3g}{z.imag:+.3g}i"

    return "(" + ",".join(fmt(z) for z in k) + ")"


@dataclass(frozen=True)
class MeasurementCover:
    """Index subsets of an operator set, each summing to the identity."""

    subsets: tuple

    def __post_init__(self):
        seen = set()
        for s in self.subsets:
            key = frozenset(s)
            if key in seen:
                raise PreconditionError(f"duplicate subset {sorted(s)} in cover")
            seen.add(key)

    def __len__(self):
        return len(self.subsets)

    def validate(self, s: OperatorSet, tol: TolerancePolicy = DEFAULT_TOL):
        """Re-check that every subset of the cover sums to the identity."""
        for subset in self.subsets:
            ops = [s.elements[i][1] for i in subset]
            if not sums_to_identity(ops, tol):
                raise PreconditionError(f"subset {sorted(subset)} does not sum to identity")


@dataclass(frozen=True)
class MarkingAssignment:
    """0/1 value per element index; exactly one 1 inside every cover subset."""

    values: tuple

    @property
    def marked(self):
        return tuple(i for i, v in enumerate(self.values) if v == 1)


@dataclass(frozen=True)
class SearchRecord:
    """Evidence that a marking search was complete."""

    search_space_size: int
    nodes_visited: int
    subset_count: int
    forbid: str

    def to_dict(self):
        return {
            "search_space_size": self.search_space_size,
            "nodes_visited": self.nodes_visited,
            "subset_count": self.subset_count,
            "forbid": self.forbid,
        }


@dataclass(frozen=True)
class KsVerdict:
    classification: str  # not_ks | weak_or_projective_ks | generalized_ks
    marking: MarkingAssignment | None
    exhaustion: SearchRecord | None

    @property
    def is_ks(self) -> bool:
        return self.classification != "not_ks"

    def certificate(self) -> dict:
        if self.marking is not None:
            return {"marking": list(self.marking.values)}
        return {"exhaustion": self.exhaustion.to_dict()}


def enumerate_measurements(
    s: OperatorSet,
    tol: TolerancePolicy = DEFAULT_TOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> MeasurementCover:
    """All subsets of ``s`` summing to the identity, in lexicographic index order.

    Depth-first search over ascending indices, pruned by the running trace
    (cannot exceed the dimension), by per-coordinate diagonal budgets, and --
    for projector kinds -- by pairwise orthogonality, which is necessary for
    any projector subset that sums to the identity.
    """
    k = len(s)
    if k > cap:
        raise BudgetError(
            f"refusing to enumerate measurements of a {k}-element set (cap {cap})",
            budget=cap,
        )
    n = s.dim
    mats = s.matrices
    traces = [float(np.trace(m).real) for m in mats]
    diags = np.array([np.diag(m).real for m in mats])
    projective = s.kind in ("vectors", "projectors")

    ortho = None
    if projective:
        ortho = [0] * k
        for i in range(k):
            for j in range(i + 1, k):
                if tol.is_zero(hs_inner(mats[i], mats[j]), f"orthogonality of elements {i},{j}"):
                    ortho[i] |= 1 << j
                    ortho[j] |= 1 << i

    trace_slack = tol.ambiguity_tol
    found = []
    chosen: list[int] = []

    def dfs(start: int, trace_sum: float, diag_sum: np.ndarray, allowed: int):
        if abs(trace_sum - n) <= trace_slack and chosen:
            if sums_to_identity([mats[i] for i in chosen], tol):
                found.append(tuple(chosen))
                return  # nonzero traces: no strict superset can also sum to I
        for j in range(start, k):
            if projective and not (allowed >> j) & 1:
                continue
            t = trace_sum + traces[j]
            if t > n + trace_slack:
                continue
            d = diag_sum + diags[j]
            if projective and np.any(d > 1.0 + tol.zero_tol):
                continue
            chosen.append(j)
            dfs(j + 1, t, d, allowed & ortho[j] if projective else allowed)
            chosen.pop()

    dfs(0, 0.0, np.zeros(n), (1 << k) - 1)
    return MeasurementCover(subsets=tuple(found))


def _conflict_masks(s: OperatorSet, forbid: str, tol: TolerancePolicy) -> list[int]:
    k = len(s)
    mats = s.matrices
    conflict = [0] * k
    if forbid == "none":
        return conflict
    eye = np.eye(s.dim)
    for i in range(k):
        for j in range(i + 1, k):
            if forbid == "orthogonal_pair":
                bad = tol.is_zero(hs_inner(mats[i], mats[j]), f"orthogonality of elements {i},{j}")
            else:
                bad = psd_leq(mats[i] + mats[j], eye, tol)
            if bad:
                conflict[i] |= 1 << j
                conflict[j] |= 1 << i
    return conflict


def search_marking_detailed(
    s: OperatorSet,
    cover: MeasurementCover,
    forbid: str = "none",
    tol: TolerancePolicy = DEFAULT_TOL,
):
    """Backtracking marking search; returns (assignment or None, search record).

    Branches on the subset with the fewest unset candidates, trying lower
    element indices first, and propagates exactly-one constraints plus the
    forbidden-pair predicate.  Elements outside every subset are left
    unmarked.  The search is deterministic, and any returned assignment is
    re-checked by the independent validator before being returned.
    """
    if forbid not in FORBID_MODES:
        raise ValueError(f"forbid must be one of {FORBID_MODES}")
    subsets = [tuple(sorted(set(sub))) for sub in cover.subsets]
    if not subsets:
        raise PreconditionError("cover must be nonempty")
    k = len(s)
    for sub in subsets:
        if any(e < 0 or e >= k for e in sub):
            raise PreconditionError("cover refers to element indices outside the set")

    conflict = _conflict_masks(s, forbid, tol)
    membership = [[] for _ in range(k)]
    for si, sub in enumerate(subsets):
        for e in sub:
            membership[e].append(si)

    value = [-1] * k  # -1 unset, 0 unmarked, 1 marked
    satisfied = [False] * len(subsets)
    value_trail: list[int] = []
    sat_trail: list[int] = []
    nodes = 0

    def set_zero(e: int) -> bool:
        if value[e] == 1:
            return False
        if value[e] == 0:
            return True
        value[e] = 0
        value_trail.append(e)
        for si in membership[e]:
            if not satisfied[si] and all(value[x] == 0 for x in subsets[si]):
                return False
        return True

    def mark(e: int) -> bool:
        value[e] = 1
        value_trail.append(e)
        for si in membership[e]:
            if satisfied[si]:
                return False
            satisfied[si] = True
            sat_trail.append(si)
            for x in subsets[si]:
                if x != e and not set_zero(x):
                    return False
        rest = conflict[e]
        while rest:
            low = rest & -rest
            if not set_zero(low.bit_length() - 1):
                return False
            rest ^= low
        return True

    def undo(v_len: int, s_len: int):
        while len(value_trail) > v_len:
            value[value_trail.pop()] = -1
        while len(sat_trail) > s_len:
            satisfied[sat_trail.pop()] = False

    def choose() -> int | None:
        best, best_count = None, None
        for si, sub in enumerate(subsets):
            if satisfied[si]:
                continue
            count = sum(1 for x in sub if value[x] == -1)
            if best_count is None or count < best_count:
                best, best_count = si, count
        return best

    def dfs() -> bool:
        nonlocal nodes
        si = choose()
        if si is None:
            return True
        for e in subsets[si]:
            if value[e] != -1:
                continue
            nodes += 1
            v_len, s_len = len(value_trail), len(sat_trail)
            if mark(e) and dfs():
                return True
            undo(v_len, s_len)
            if not set_zero(e):  # e marked nowhere below this node
                return False
        return False

    space = math.prod(len(sub) for sub in subsets)
    result = None
    if dfs():
        result = MarkingAssignment(values=tuple(1 if v == 1 else 0 for v in value))
        problems = marking_violations(s, cover, result, forbid, tol)
        if problems:
            raise AssertionError(f"search returned an invalid assignment: {problems}")
    record = SearchRecord(
        search_space_size=space,
        nodes_visited=nodes,
        subset_count=len(subsets),
        forbid=forbid,
    )
    return result, record


def search_marking(
    s: OperatorSet,
    cover: MeasurementCover,
    forbid: str = "none",
    tol: TolerancePolicy = DEFAULT_TOL,
):
    """Marking assignment satisfying the cover and forbid predicate, or None."""
    assignment, _ = search_marking_detailed(s, cover, forbid, tol)
    return assignment


def marking_violations(
    s: OperatorSet,
    cover: MeasurementCover,
    assignment: MarkingAssignment,
    forbid: str = "none",
    tol: TolerancePolicy = DEFAULT_TOL,
) -> list:
    """Independent validity check of an assignment; returns human-readable problems."""
    problems = []
    values = assignment.values
    if len(values) != len(s):
        return [f"assignment covers {len(values)} elements, set has {len(s)}"]
    for sub in cover.subsets:
        total = sum(values[e] for e in sub)
        if total != 1:
            problems.append(f"subset {sorted(sub)} has {total} marked elements")
    marked = assignment.marked
    mats = s.matrices
    eye = np.eye(s.dim)
    for a in range(len(marked)):
        for b in range(a + 1, len(marked)):
            i, j = marked[a], marked[b]
            if forbid == "orthogonal_pair":
                if tol.is_zero(hs_inner(mats[i], mats[j]), f"orthogonality of {i},{j}"):
                    problems.append(f"marked elements {i},{j} are orthogonal")
            elif forbid == "subidentity_pair":
                if psd_leq(mats[i] + mats[j], eye, tol):
                    problems.append(f"marked elements {i},{j} sum below identity")
    return problems


def classify(
    s: OperatorSet,
    tol: TolerancePolicy = DEFAULT_TOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> KsVerdict:
    """Classify a set as not KS, weak/projective KS, or generalized KS.

    Runs the marking search with the forbidden-pair mode matching the set
    kind.  A found assignment certifies "not KS"; a completed empty search is
    the KS certificate, returned with its exhaustion record.
    """
    cover = enumerate_measurements(s, tol=tol, cap=cap)
    if not cover.subsets:
        raise ClassificationError(
            "set contains no measurements; it is vacuously not a KS-style set"
        )
    forbid = "subidentity_pair" if s.kind == "psd" else "orthogonal_pair"
    assignment, record = search_marking_detailed(s, cover, forbid, tol)
    if assignment is not None:
        return KsVerdict(classification="not_ks", marking=assignment, exhaustion=record)
    name = "generalized_ks" if s.kind == "psd" else "weak_or_projective_ks"
    return KsVerdict(classification=name, marking=None, exhaustion=record)


def weak_from_projective(
    s: OperatorSet,
    tol: TolerancePolicy = DEFAULT_TOL,
    check: bool = True,
) -> OperatorSet:
    """Union of support bases of a projective KS set, as a vector set.

    With ``check`` (default) the input is classified first and a
    non-KS input is rejected; pass ``check=False`` when the caller
    has already established the classification.
    """
    if s.kind not in ("projectors", "vectors"):
        raise PreconditionError("input must consist of projectors")
    if check:
        verdict = classify(s, tol)
        if not verdict.is_ks:
            raise PreconditionError(
                "input is not a projective KS set; a marking function exists"
            )
    kets = []
    labels = []
    projs = []
    for label, mat in s.elements:
        for idx, b in enumerate(support_basis(mat, tol)):
            proj = ket_to_projector(b)
            if any(np.max(np.abs(proj - q)) <= tol.zero_tol for q in projs):
                continue
            projs.append(proj)
            kets.append(b)
            labels.append(f"{label}:{idx}")
    return OperatorSet.from_kets(kets, labels=labels, tol=tol)


def lift(s: OperatorSet, m: int) -> OperatorSet:
    """Tensor every element with the m-dimensional identity.

    Preserves measurement covers and the orthogonality pattern, since
    Tr((P x I)(P' x I)) = m * Tr(P P').
    """
    if s.kind not in ("projectors", "vectors"):
        raise PreconditionError("lift is defined for projector sets")
    if m < 1:
        raise PreconditionError("lift factor must be >= 1")
    if m == 1:
        return s
    eye = np.eye(m)
    mats = [np.kron(mat, eye) for _, mat in s.elements]
    return OperatorSet.from_projectors(mats, labels=s.labels)


def parity_obstruction(cover: MeasurementCover, n_elements: int) -> bool:
    """Double-counting test: marked-per-subset sums cannot total an odd count.

    True when every covered element lies in exactly two subsets and the
    number of subsets is odd, which rules out any marking function: summing
    the per-subset totals counts each marked element twice (even), yet the
    per-subset constraint forces the sum to equal the odd subset count.
    """
    counts = [0] * n_elements
    for sub in cover.subsets:
        for e in sub:
            counts[e] += 1
    covered = [c for c in counts if c > 0]
    return bool(covered) and all(c == 2 for c in covered) and len(cover.subsets) % 2 == 1


_CABELLO_VECTORS = (
    (0, 0, 0, 1),
    (0, 0, 1, 0),
    (1, 1, 0, 0),
    (1, -1, 0, 0),
    (0, 1, 0, 0),
    (1, 0, 1, 0),
    (1, 0, -1, 0),
    (1, -1, 1, -1),
    (1, -1, -1, 1),
    (0, 0, 1, 1),
    (1, 1, 1, 1),
    (0, 1, 0, -1),
    (1, 0, 0, 1),
    (1, 0, 0, -1),
    (0, 1, -1, 0),
    (1, 1, -1, 1),
    (1, 1, 1, -1),
    (-1, 1, 1, 1),
)


def fixture_cabello18() -> OperatorSet:
    """The 18-vector, 9-basis contextuality configuration in dimension four.

    Integer-entry rays whose rank-1 projectors have exact dyadic entries;
    every property used downstream (9 bases, each ray in exactly two) is
    re-derived by enumeration in the test suite, never assumed.
    """
    return _integer_ray_set(_CABELLO_VECTORS)


_PERES_VECTORS = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (1, 1, 0, 0),
    (1, -1, 0, 0),
    (1, 0, 1, 0),
    (1, 0, -1, 0),
    (1, 0, 0, 1),
    (1, 0, 0, -1),
    (0, 1, 1, 0),
    (0, 1, -1, 0),
    (0, 1, 0, 1),
    (0, 1, 0, -1),
    (0, 0, 1, 1),
    (0, 0, 1, -1),
    (1, 1, 1, 1),
    (1, 1, -1, -1),
    (1, -1, 1, -1),
    (1, -1, -1, 1),
    (1, 1, 1, -1),
    (1, 1, -1, 1),
    (1, -1, 1, 1),
    (-1, 1, 1, 1),
)


def fixture_peres24() -> OperatorSet:
    """The 24-ray configuration in dimension four (optional larger fixture)."""
    return _integer_ray_set(_PERES_VECTORS)


def _integer_ray_set(vectors) -> OperatorSet:
    mats = []
    kets = []
    labels = []
    for v in vectors:
        arr = np.array(v, dtype=np.complex128)
        norm_sq = float(np.vdot(arr, arr).real)
        mats.append(as_matrix(np.outer(arr, arr.conj()) / norm_sq))
        ket = arr / np.sqrt(norm_sq)
        ket.setflags(write=False)
        kets.append(ket)
        labels.append("(" + ",".join(str(int(c)) for c in v) + ")")
    return OperatorSet(
        dim=len(vectors[0]),
        elements=tuple(zip(labels, mats)),
        kind="projectors",
        kets=tuple(kets),
    )

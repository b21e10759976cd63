"""Graphs with exact invariants: products, orthogonality graphs, alpha and chi.

Adjacency is stored as per-row bitsets (arbitrary-size ints), which is what
the branch-and-bound inner loops want.  The exact solvers refuse inputs above
their budgets instead of approximating: downstream capacity and coloring
claims need exact numbers or nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DimensionError, PreconditionError
from .ks import MeasurementCover, OperatorSet
from .linalg import DEFAULT_TOL, TolerancePolicy, hs_inner

__all__ = [
    "Graph",
    "complete_graph",
    "cycle_graph",
    "empty_graph",
    "random_gnp",
    "orthogonality_graph",
    "cartesian_product",
    "strong_product",
    "complement",
    "hadamard_graph",
    "hadamard_sign_vectors",
    "sample_hadamard_edges",
    "independence_number",
    "chromatic_number",
    "is_independent_set",
    "is_proper_coloring",
]

DEFAULT_ALPHA_BUDGET = 2000
DEFAULT_CHI_BUDGET = 128
DEFAULT_HADAMARD_BUDGET = 14

# the compiled search core pays off past this size; below it, interpreter
# startup dominates and the pure path is plenty
_COMPILED_MIS_ABOVE = 48


def _compiled_mis():
    try:
        from . import _miscore
    except ImportError:
        return None
    return _miscore


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with optional labels and clique partition."""

    n_vertices: int
    adj: tuple  # row bitsets
    labels: tuple | None = None
    clique_partition: tuple | None = None

    def __post_init__(self):
        n = self.n_vertices
        if len(self.adj) != n:
            raise DimensionError("adjacency rows must match the vertex count")
        for v, row in enumerate(self.adj):
            if row >> n:
                raise DimensionError(f"row {v} refers to vertices beyond {n - 1}")
            if (row >> v) & 1:
                raise PreconditionError(f"self-loop at vertex {v}")
        for v in range(n):
            for w in range(v + 1, n):
                if ((self.adj[v] >> w) & 1) != ((self.adj[w] >> v) & 1):
                    raise PreconditionError(f"adjacency not symmetric at ({v},{w})")
        if self.labels is not None and len(self.labels) != n:
            raise DimensionError("labels must match the vertex count")
        if self.clique_partition is not None:
            seen = [False] * n
            for part in self.clique_partition:
                for v in part:
                    if seen[v]:
                        raise PreconditionError(f"vertex {v} in two partition parts")
                    seen[v] = True
                for a, b in itertools.combinations(part, 2):
                    if not self.has_edge(a, b):
                        raise PreconditionError(
                            f"partition part {sorted(part)} is not a clique: ({a},{b}) missing"
                        )
            if not all(seen):
                raise PreconditionError("clique partition does not cover every vertex")

    @classmethod
    def from_edges(cls, n, edges, labels=None, clique_partition=None):
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise PreconditionError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DimensionError(f"edge ({u},{v}) outside vertex range")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(
            n_vertices=n,
            adj=tuple(rows),
            labels=None if labels is None else tuple(labels),
            clique_partition=None
            if clique_partition is None
            else tuple(tuple(p) for p in clique_partition),
        )

    def has_edge(self, u, v) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def degree(self, v) -> int:
        return int(self.adj[v]).bit_count()

    def edges(self):
        for u in range(self.n_vertices):
            row = self.adj[u] >> (u + 1)
            v = u + 1
            while row:
                if row & 1:
                    yield (u, v)
                row >>= 1
                v += 1

    @property
    def edge_count(self) -> int:
        return sum(int(r).bit_count() for r in self.adj) // 2

    def adjacency_matrix(self) -> np.ndarray:
        out = np.zeros((self.n_vertices, self.n_vertices), dtype=bool)
        for u, v in self.edges():
            out[u, v] = out[v, u] = True
        return out

    def adjacency_equals(self, other: "Graph") -> bool:
        return self.n_vertices == other.n_vertices and self.adj == other.adj


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n_vertices=n, adj=tuple(full ^ (1 << v) for v in range(n)))


def empty_graph(n: int) -> Graph:
    return Graph(n_vertices=n, adj=(0,) * n)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise PreconditionError("cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def random_gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def orthogonality_graph(
    s: OperatorSet,
    cover,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> Graph:
    """Orthogonality graph of the multiset union of the cover's measurements.

    One vertex per (subset index, element index) pair; two vertices are
    adjacent iff their operators are trace-orthogonal.  Copies of the same
    element are never adjacent (its self-overlap is its rank), while copies
    of distinct orthogonal elements across subsets are.  The subsets become
    the clique partition, and the (subset, element) pairs become labels so a
    vertex can always be traced back to its operator.

    ``cover`` may be a MeasurementCover or a raw sequence of index subsets;
    the raw form allows repeated measurements, which still contribute
    distinct multiset copies.
    """
    subsets = cover.subsets if isinstance(cover, MeasurementCover) else tuple(
        tuple(sub) for sub in cover
    )
    if not subsets:
        raise PreconditionError("cover must be nonempty")
    mats = s.matrices
    verts = [(si, e) for si, sub in enumerate(subsets) for e in sub]
    n = len(verts)
    ortho = {}
    for i in range(len(mats)):
        for j in range(i, len(mats)):
            ortho[(i, j)] = tol.is_zero(
                hs_inner(mats[i], mats[j]), f"orthogonality of elements {i},{j}"
            )
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            ea, eb = verts[a][1], verts[b][1]
            if ortho[(min(ea, eb), max(ea, eb))]:
                edges.append((a, b))
    partition = []
    pos = 0
    for sub in subsets:
        partition.append(tuple(range(pos, pos + len(sub))))
        pos += len(sub)
    return Graph.from_edges(n, edges, labels=verts, clique_partition=partition)


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Box product: (v,i)~(w,j) iff v=w and i~j, or v~w and i=j."""
    nh = h.n_vertices
    n = g.n_vertices * nh
    edges = []
    for v in range(g.n_vertices):
        for i, j in h.edges():
            edges.append((v * nh + i, v * nh + j))
    for v, w in g.edges():
        for i in range(nh):
            edges.append((v * nh + i, w * nh + i))
    labels = [(v, i) for v in range(g.n_vertices) for i in range(nh)]
    return Graph.from_edges(n, edges, labels=labels)


def strong_product(g: Graph, h: Graph) -> Graph:
    """(v,i)~(w,j) iff (v~w or v=w) and (i~j or i=j), excluding equality of both."""
    nh = h.n_vertices
    n = g.n_vertices * nh
    edges = []
    for v in range(g.n_vertices):
        for w in range(v, g.n_vertices):
            for i in range(nh):
                for j in range(nh):
                    if v == w and i >= j:
                        continue
                    g_ok = v == w or g.has_edge(v, w)
                    h_ok = i == j or h.has_edge(i, j)
                    if g_ok and h_ok:
                        edges.append((v * nh + i, w * nh + j))
    labels = [(v, i) for v in range(g.n_vertices) for i in range(nh)]
    return Graph.from_edges(n, edges, labels=labels)


def complement(g: Graph) -> Graph:
    n = g.n_vertices
    full = (1 << n) - 1
    rows = tuple((full ^ g.adj[v]) & ~(1 << v) for v in range(n))
    return Graph(n_vertices=n, adj=rows, labels=g.labels)


def hadamard_sign_vectors(n: int) -> np.ndarray:
    """All 2^n sign vectors, row x: bit b of x maps to +1 (0) or -1 (1)."""
    xs = np.arange(2**n, dtype=np.int64)
    bits = (xs[:, None] >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int64)


def hadamard_graph(n: int, max_n: int = DEFAULT_HADAMARD_BUDGET) -> Graph:
    """Graph on {+-1}^n with edges at exact integer inner product zero.

    Dense adjacency limits the default budget to n <= 14; larger orders are
    handled without materialization via :func:`sample_hadamard_edges`.
    """
    if n < 1:
        raise PreconditionError("order must be >= 1")
    if n > max_n:
        raise BudgetError(
            f"hadamard graph of order {n} exceeds the materialization budget {max_n}",
            budget=max_n,
        )
    signs = hadamard_sign_vectors(n)
    gram = signs @ signs.T  # exact int64
    rows = []
    for u in range(2**n):
        row = 0
        for v in np.nonzero(gram[u] == 0)[0]:
            row |= 1 << int(v)
        rows.append(row)
    labels = tuple("".join("+" if c == 1 else "-" for c in vec) for vec in signs)
    return Graph(n_vertices=2**n, adj=tuple(rows), labels=labels)


def sample_hadamard_edges(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random edges of the order-n Hadamard graph as sign-vector pairs.

    Returns an array of shape (count, 2, n).  A neighbor of u agrees with u
    on exactly n/2 coordinates, so sampling a uniform vertex and a uniform
    half-size agreement set is uniform over edges (the graph is regular).
    """
    if n % 2 != 0:
        raise PreconditionError("odd orders give edgeless graphs; nothing to sample")
    out = np.empty((count, 2, n), dtype=np.int64)
    for i in range(count):
        u = 1 - 2 * rng.integers(0, 2, size=n)
        w = -u.copy()
        agree = rng.choice(n, size=n // 2, replace=False)
        w[agree] = u[agree]
        out[i, 0] = u
        out[i, 1] = w
    return out


def is_independent_set(g: Graph, vertices) -> bool:
    vs = list(vertices)
    return all(not g.has_edge(u, v) for u, v in itertools.combinations(vs, 2))


def is_proper_coloring(g: Graph, colors) -> bool:
    colors = list(colors)
    if len(colors) != g.n_vertices:
        return False
    return all(colors[u] != colors[v] for u, v in g.edges())


def _greedy_clique_cover_count(adj, cand: int) -> int:
    """Number of cliques in a greedy clique cover of cand; upper-bounds alpha."""
    count = 0
    rest = cand
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        avail = rest & adj[v]
        while avail:
            lu = avail & -avail
            u = lu.bit_length() - 1
            rest ^= lu
            avail = (avail ^ lu) & adj[u]
        count += 1
    return count


def _clique_cover_order(adj, cand: int):
    """Greedy clique cover of cand; returns vertices in cover order with the
    running clique count.  Any independent subset of the first i vertices has
    size at most the i-th running count, which is the branch-and-bound bound."""
    order = []
    rest = cand
    count = 0
    while rest:
        count += 1
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        order.append((v, count))
        avail = rest & adj[v]
        while avail:
            lu = avail & -avail
            u = lu.bit_length() - 1
            rest ^= lu
            order.append((u, count))
            avail = (avail ^ lu) & adj[u]
    return order


def independence_number(
    g: Graph,
    max_vertices: int = DEFAULT_ALPHA_BUDGET,
    force_pure: bool = False,
):
    """Exact maximum independent set via branch and bound on bitsets.

    Vertices of degree at most one inside the candidate set are taken
    greedily (an exactness-preserving reduction); the remainder branches on
    candidates in reverse greedy-clique-cover order, so the running cover
    count bounds every suffix of the loop and prunes whole nodes at once.
    Larger instances run the same search compiled (``_miscore``); both paths
    are deterministic and return identical results.  The witness is
    re-validated independently before returning (size, witness).
    """
    n = g.n_vertices
    if n > max_vertices:
        raise BudgetError(
            f"exact independence number refused above {max_vertices} vertices "
            f"(got {n}); raise the budget explicitly for larger instances",
            budget=max_vertices,
        )
    if n == 0:
        return 0, ()
    adj = g.adj

    # greedy seed: ascending degree
    best_set: list[int] = []
    used = 0
    for v in sorted(range(n), key=lambda x: (g.degree(x), x)):
        if not (used >> v) & 1:
            best_set.append(v)
            used |= (1 << v) | adj[v]
    best = len(best_set)
    best_vertices = tuple(sorted(best_set))

    if n > _COMPILED_MIS_ABOVE and not force_pure:
        core = _compiled_mis()
        if core is not None:
            size, witness = core.solve(adj, n, best, best_vertices)
            if not is_independent_set(g, witness) or len(witness) != size:
                raise AssertionError("solver produced an invalid independent set")
            return size, witness

    current: list[int] = []

    def reduce_low_degree(cand: int) -> int:
        # taking an isolated or degree-1 vertex never loses optimality
        changed = True
        while changed and cand:
            changed = False
            rest = cand
            while rest:
                low = rest & -rest
                v = low.bit_length() - 1
                rest ^= low
                if not (cand >> v) & 1:
                    continue  # removed by an earlier take this sweep
                neigh = adj[v] & cand
                if int(neigh).bit_count() <= 1:
                    current.append(v)
                    cand &= ~(neigh | low)
                    changed = True
        return cand

    def dfs(cand: int):
        nonlocal best, best_vertices
        mark = len(current)
        cand = reduce_low_degree(cand)
        if cand == 0:
            if len(current) > best:
                best = len(current)
                best_vertices = tuple(sorted(current))
            del current[mark:]
            return
        order = _clique_cover_order(adj, cand)
        size = len(current)
        for i in range(len(order) - 1, -1, -1):
            v, bound = order[i]
            if size + bound <= best:
                break
            bit = 1 << v
            current.append(v)
            dfs(cand & ~(adj[v] | bit))
            current.pop()
            cand &= ~bit
        del current[mark:]

    dfs((1 << n) - 1)
    if not is_independent_set(g, best_vertices):
        raise AssertionError("solver produced an invalid independent set")
    return best, best_vertices


def _max_clique_heuristic(g: Graph) -> int:
    best = 0
    for v in range(g.n_vertices):
        clique = [v]
        avail = g.adj[v]
        while avail:
            low = avail & -avail
            u = low.bit_length() - 1
            clique.append(u)
            avail = (avail ^ low) & g.adj[u]
        best = max(best, len(clique))
    return best


def chromatic_number(g: Graph, max_vertices: int = DEFAULT_CHI_BUDGET):
    """Exact chromatic number with witness coloring.

    Iterative deepening on the color count, starting from a greedy clique
    lower bound, with saturation-ordered backtracking and new-color symmetry
    breaking at each level.  The witness is re-validated before returning.
    """
    n = g.n_vertices
    if n > max_vertices:
        raise BudgetError(
            f"exact chromatic number refused above {max_vertices} vertices (got {n})",
            budget=max_vertices,
        )
    if n == 0:
        return 0, ()
    if g.edge_count == 0:
        return 1, (0,) * n
    adj = g.adj
    degrees = [g.degree(v) for v in range(n)]

    def try_colors(c: int):
        colors = [-1] * n

        def choose():
            best_v, best_key = -1, None
            for v in range(n):
                if colors[v] != -1:
                    continue
                neigh = set()
                row = adj[v]
                while row:
                    low = row & -row
                    u = low.bit_length() - 1
                    row ^= low
                    if colors[u] != -1:
                        neigh.add(colors[u])
                key = (-len(neigh), -degrees[v], v)
                if best_key is None or key < best_key:
                    best_v, best_key = v, key
            return best_v

        def dfs(colored: int, used: int) -> bool:
            if colored == n:
                return True
            v = choose()
            forbidden = set()
            row = adj[v]
            while row:
                low = row & -row
                u = low.bit_length() - 1
                row ^= low
                if colors[u] != -1:
                    forbidden.add(colors[u])
            for col in range(min(used + 1, c)):
                if col in forbidden:
                    continue
                colors[v] = col
                if dfs(colored + 1, max(used, col + 1)):
                    return True
                colors[v] = -1
            return False

        if dfs(0, 0):
            return tuple(colors)
        return None

    for c in range(_max_clique_heuristic(g), n + 1):
        witness = try_colors(c)
        if witness is not None:
            if not is_proper_coloring(g, witness) or len(set(witness)) > c:
                raise AssertionError("solver produced an invalid coloring")
            return c, witness
    raise AssertionError("unreachable: n colors always suffice")

"""Lovasz theta via a dense interior-point SDP with certified two-sided bounds.

Solves the minimization form of the theta program, min t such that
t*I + sum_e y_e E_e - J is PSD, whose dual solution is exactly the
maximization-form variable X (trace one, zero on edges, PSD, objective the
sum of entries).  Both sides are post-processed into rigorous bounds: the
returned primal matrix is projected to exact feasibility, and the dual slack
is eigenvalue-shifted, so ``value <= theta <= dual_bound`` holds up to the
reported residuals regardless of how well the solver converged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ConvergenceError, PreconditionError
from .graphs import Graph

__all__ = ["ThetaResult", "lovasz_theta"]

DEFAULT_THETA_BUDGET = 200
DEFAULT_EPS = 1e-6


@dataclass(frozen=True)
class ThetaResult:
    value: float  # certified value of a feasible primal matrix
    primal_matrix: np.ndarray  # exactly feasible (trace 1, zero on edges, PSD)
    dual_bound: float  # certified upper bound from the shifted dual slack
    gap: float
    iterations: int

    def to_dict(self):
        return {
            "value": self.value,
            "dual_bound": self.dual_bound,
            "gap": self.gap,
            "iterations": self.iterations,
        }


def _certify_primal(x: np.ndarray, edges) -> tuple[np.ndarray, float]:
    """Project onto the feasible set and return the certified objective."""
    n = x.shape[0]
    x = (x + x.T) / 2
    for u, v in edges:
        x[u, v] = x[v, u] = 0.0
    lam = float(np.linalg.eigvalsh(x)[0])
    if lam < 0:
        # mixing with I/n preserves the zero pattern and restores PSD
        x = (x + (-lam) * np.eye(n)) / (1.0 + n * (-lam))
    x = x / np.trace(x)
    return x, float(np.sum(x))


def _certify_dual(t: float, y: np.ndarray, edges, n: int) -> float:
    z = t * np.eye(n) - np.ones((n, n))
    for (u, v), yv in zip(edges, y):
        z[u, v] += yv
        z[v, u] += yv
    lam = float(np.linalg.eigvalsh(z)[0])
    return t + max(0.0, -lam)


def lovasz_theta(
    g: Graph,
    eps: float = DEFAULT_EPS,
    max_vertices: int = DEFAULT_THETA_BUDGET,
    max_iterations: int = 200,
) -> ThetaResult:
    """Lovasz theta of a graph with certified primal and dual bounds.

    The reported ``value`` is the objective of an exactly feasible primal
    matrix and ``dual_bound`` a rigorous upper bound, so
    ``|value - theta| <= max(eps, gap)``.  Raises ConvergenceError (carrying
    the best certified bounds) if the interior point stops early, and
    BudgetError above ``max_vertices``.
    """
    import cvxopt
    import cvxopt.solvers

    n = g.n_vertices
    if n < 1:
        raise PreconditionError("theta needs at least one vertex")
    if n > max_vertices:
        raise BudgetError(
            f"dense theta SDP refused above {max_vertices} vertices (got {n})",
            budget=max_vertices,
        )
    if eps <= 0:
        raise PreconditionError("eps must be positive")

    edges = list(g.edges())
    m = 1 + len(edges)
    c = cvxopt.matrix([1.0] + [0.0] * len(edges))
    coeff = np.zeros((n * n, m))
    coeff[:, 0] = (-np.eye(n)).ravel(order="F")
    for j, (u, v) in enumerate(edges):
        e = np.zeros((n, n))
        e[u, v] = e[v, u] = -1.0
        coeff[:, j + 1] = e.ravel(order="F")
    h = -np.ones((n, n))

    options = {
        "show_progress": False,
        "maxiters": max_iterations,
        "abstol": min(eps * 1e-3, 1e-9),
        "reltol": min(eps * 1e-3, 1e-9),
        "feastol": 1e-9,
    }
    sol = cvxopt.solvers.sdp(
        c, Gs=[cvxopt.matrix(coeff)], hs=[cvxopt.matrix(h)], options=options
    )

    lower = upper = None
    if sol["x"] is not None:
        t = float(sol["x"][0])
        y = np.array(sol["x"]).ravel()[1:]
        upper = _certify_dual(t, y, edges, n)
    if sol["zs"]:
        primal, lower = _certify_primal(np.array(sol["zs"][0]), edges)
    if sol["status"] != "optimal":
        raise ConvergenceError(
            f"theta SDP stopped with status {sol['status']!r} "
            f"(certified bounds: [{lower}, {upper}])",
            lower=lower,
            upper=upper,
        )
    gap = abs(upper - lower)
    primal.setflags(write=False)
    return ThetaResult(
        value=lower,
        primal_matrix=primal,
        dual_bound=upper,
        gap=gap,
        iterations=int(sol["iterations"]),
    )

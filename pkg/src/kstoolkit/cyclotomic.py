"""Exact integer arithmetic with roots of unity.

Inner products between kets whose amplitudes are signed powers of a common
root of unity over a square-root scale reduce to integer coefficient vectors
over the basis {w^k}.  Zero tests divide by the cyclotomic polynomial, so an
orthogonality decision never touches floating point.  This is the exact fast
path used for Hadamard sign vectors and Fourier-phase colorings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "cyclotomic_poly",
    "reduction_matrix",
    "root_sum_is_zero",
    "PhaseKet",
]


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # den is monic with integer coefficients, so the division stays in Z.
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 0)
    for k in range(len(num) - len(den), -1, -1):
        coeff = num[k + len(den) - 1]
        q[k] = coeff
        if coeff:
            for i, d in enumerate(den):
                num[k + i] -= coeff * d
    while num and num[-1] == 0:
        num.pop()
    return q, num


@lru_cache(maxsize=None)
def cyclotomic_poly(order: int) -> tuple[int, ...]:
    """Integer coefficients (low to high) of the order-th cyclotomic polynomial."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if order == 1:
        return (-1, 1)
    num = [0] * (order + 1)
    num[0], num[order] = -1, 1  # x^order - 1
    poly = num
    for d in range(1, order):
        if order % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_poly(d)))
            if rem:
                raise AssertionError("cyclotomic division left a remainder")
    return tuple(poly)


@lru_cache(maxsize=None)
def reduction_matrix(order: int) -> np.ndarray:
    """Rows k = 0..order-1: coefficients of x^k reduced modulo the cyclotomic polynomial.

    A coefficient vector c is the zero algebraic number iff c @ reduction_matrix
    vanishes, since the surviving powers of the root are linearly independent
    over the rationals.
    """
    phi = cyclotomic_poly(order)
    deg = len(phi) - 1
    mat = np.zeros((order, deg), dtype=np.int64)
    for k in range(order):
        mono = [0] * (k + 1)
        mono[k] = 1
        _, rem = _poly_divmod(mono, list(phi))
        for i, c in enumerate(rem):
            mat[k, i] = c
    mat.setflags(write=False)
    return mat


def root_sum_is_zero(coeffs, order: int) -> bool:
    """Exact zero test for sum_k coeffs[k] * w^k with w = exp(2*pi*i/order)."""
    c = np.asarray(coeffs, dtype=np.int64)
    if c.shape != (order,):
        raise ValueError(f"expected {order} coefficients, got shape {c.shape}")
    return not np.any(c @ reduction_matrix(order))


@dataclass(frozen=True)
class PhaseKet:
    """Ket with j-th amplitude signs[j] * w^(phase_step*j) / sqrt(norm_sq).

    Stores the exact symbolic scale so that inner products are integer
    coefficient vectors over powers of w = exp(2*pi*i/order).
    """

    signs: tuple[int, ...]
    phase_step: int
    order: int
    norm_sq: int

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +-1")
        if self.order < 1 or self.norm_sq < 1:
            raise ValueError("order and norm_sq must be positive")
        if self.norm_sq != len(self.signs):
            raise ValueError("norm_sq must equal the number of amplitudes")

    @property
    def dim(self) -> int:
        return len(self.signs)

    def inner_coeffs(self, other: "PhaseKet") -> np.ndarray:
        """Coefficient vector of norm_sq * <self|other> over powers of w."""
        if (self.dim, self.order, self.norm_sq) != (other.dim, other.order, other.norm_sq):
            raise ValueError("kets live in different phase families")
        c = np.zeros(self.order, dtype=np.int64)
        step = (other.phase_step - self.phase_step) % self.order
        for j in range(self.dim):
            c[(step * j) % self.order] += self.signs[j] * other.signs[j]
        return c

    def is_orthogonal_to(self, other: "PhaseKet") -> bool:
        return root_sum_is_zero(self.inner_coeffs(other), self.order)

    def to_complex(self) -> np.ndarray:
        w = np.exp(2j * np.pi / self.order)
        amps = np.array(
            [s * w ** ((self.phase_step * j) % self.order) for j, s in enumerate(self.signs)],
            dtype=np.complex128,
        )
        return amps / np.sqrt(self.norm_sq)

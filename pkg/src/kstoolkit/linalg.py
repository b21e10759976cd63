"""Dense complex linear algebra at small dimension with an explicit tolerance policy.

Every discrete decision that feeds graph structure downstream (orthogonality,
completeness, projector checks) goes through a two-band tolerance test:
magnitudes up to ``zero_tol`` count as zero, magnitudes beyond
``ambiguity_factor * zero_tol`` count as nonzero, and anything in between
raises :class:`~kstoolkit.errors.AmbiguityError` instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguityError, DimensionError, PreconditionError

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "as_matrix",
    "as_ket",
    "ket_to_projector",
    "is_hermitian",
    "is_projector",
    "hs_inner",
    "hs_inner_real",
    "sums_to_identity",
    "support_basis",
    "support_projector",
    "bob_residual",
    "psd_leq",
    "maximally_entangled_ket",
]


@dataclass(frozen=True)
class TolerancePolicy:
    """Two-band zero test: clear zero, clear nonzero, or a hard error between."""

    zero_tol: float = 1e-9
    ambiguity_factor: float = 100.0

    def __post_init__(self):
        if not self.zero_tol > 0:
            raise ValueError("zero_tol must be positive")
        if not self.ambiguity_factor > 1:
            raise ValueError("ambiguity_factor must exceed 1")

    @property
    def ambiguity_tol(self) -> float:
        return self.ambiguity_factor * self.zero_tol

    def is_zero(self, value, context: str = "value") -> bool:
        """Decide whether a scalar is zero, refusing the ambiguity band."""
        mag = abs(value)
        if mag <= self.zero_tol:
            return True
        if mag < self.ambiguity_tol:
            raise AmbiguityError(
                f"{context}: magnitude {mag:.3e} lies in the ambiguity band "
                f"({self.zero_tol:.1e}, {self.ambiguity_tol:.1e})"
            )
        return False

    def is_nonneg(self, value, context: str = "value") -> bool:
        """Decide value >= 0 up to zero_tol, guarding the negative band."""
        if value >= -self.zero_tol:
            return True
        if value > -self.ambiguity_tol:
            raise AmbiguityError(
                f"{context}: value {value:.3e} is negative inside the "
                f"ambiguity band (-{self.ambiguity_tol:.1e}, -{self.zero_tol:.1e})"
            )
        return False


DEFAULT_TOL = TolerancePolicy()


def as_matrix(entries) -> np.ndarray:
    """Coerce to a finite 2-D complex array (read-only)."""
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of ndim {m.ndim}")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValueError("matrix entries must be finite")
    m.setflags(write=False)
    return m


def as_ket(amplitudes, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Coerce to a finite unit-norm 1-D complex array (read-only)."""
    v = np.array(amplitudes, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError("expected a nonempty 1-D amplitude vector")
    if not np.all(np.isfinite(v.view(np.float64))):
        raise ValueError("amplitudes must be finite")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > tol.ambiguity_tol:
        raise PreconditionError(f"ket norm {nrm} is not 1 within tolerance")
    v.setflags(write=False)
    return v


def ket_to_projector(ket) -> np.ndarray:
    v = np.asarray(ket, dtype=np.complex128)
    p = np.outer(v, v.conj())
    p.setflags(write=False)
    return p


def _require_square(m: np.ndarray, name: str = "matrix") -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m.shape[0]


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_hermitian(m, tol: TolerancePolicy = DEFAULT_TOL, context: str = "matrix") -> bool:
    m = np.asarray(m, dtype=np.complex128)
    _require_square(m, context)
    return tol.is_zero(_max_abs(m - m.conj().T), f"{context} hermiticity deviation")


def is_projector(m, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff m is Hermitian and idempotent within the tolerance policy."""
    m = np.asarray(m, dtype=np.complex128)
    _require_square(m, "projector candidate")
    herm = _max_abs(m - m.conj().T)
    idem = _max_abs(m @ m - m)
    return tol.is_zero(herm, "hermiticity deviation") and tol.is_zero(
        idem, "idempotency deviation"
    )


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    _require_square(a, "first operand")
    _require_square(b, "second operand")
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hs_inner_real(a, b, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """hs_inner for Hermitian operands; rejects a significant imaginary part."""
    val = hs_inner(a, b)
    if abs(val.imag) > tol.zero_tol:
        raise PreconditionError(
            f"Hilbert-Schmidt product has imaginary part {val.imag:.3e}; "
            "operands are not both Hermitian"
        )
    return val.real


def sums_to_identity(ops, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff the operators sum to the identity within zero_tol (max entry)."""
    ops = list(ops)
    if not ops:
        return False
    first = np.asarray(ops[0], dtype=np.complex128)
    n = _require_square(first, "operator")
    acc = np.zeros((n, n), dtype=np.complex128)
    for op in ops:
        op = np.asarray(op, dtype=np.complex128)
        if op.shape != (n, n):
            raise DimensionError(f"dimension mismatch: {op.shape} vs {(n, n)}")
        acc += op
    return tol.is_zero(_max_abs(acc - np.eye(n)), "completeness deviation")


# Rank-revealing cutoff for Gram-Schmidt residuals.  Residual norms of spanned
# columns are O(zero_tol); independent directions contribute at least ~1/dim.
_GS_CUTOFF = 1e-6


def support_basis(p, tol: TolerancePolicy = DEFAULT_TOL) -> list[np.ndarray]:
    """Deterministic orthonormal basis of the range of a projector.

    Gram-Schmidt over the projected standard basis vectors in coordinate
    order, each ket phase-normalized so its first significant coordinate is
    real positive.  The output depends only on the matrix, not on any
    eigensolver's degenerate-subspace choices.
    """
    p = np.asarray(p, dtype=np.complex128)
    n = _require_square(p, "projector")
    if not is_projector(p, tol):
        raise PreconditionError("support_basis requires a projector input")
    rank = int(round(float(np.trace(p).real)))
    basis: list[np.ndarray] = []
    for i in range(n):
        if len(basis) == rank:
            break
        w = p[:, i].copy()
        for b in basis:
            w -= b * np.vdot(b, w)
        nrm = np.linalg.norm(w)
        if nrm <= _GS_CUTOFF:
            continue
        w /= nrm
        for b in basis:  # second pass for numerical stability
            w -= b * np.vdot(b, w)
        w /= np.linalg.norm(w)
        k = int(np.argmax(np.abs(w) > _GS_CUTOFF))
        w *= w[k].conj() / abs(w[k])
        w.setflags(write=False)
        basis.append(w)
    if len(basis) != rank:
        raise PreconditionError(
            f"found {len(basis)} independent range directions, expected rank {rank}"
        )
    return basis


def support_projector(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Projector onto the range of a PSD operator, with guarded thresholding."""
    a = np.asarray(a, dtype=np.complex128)
    _require_square(a, "operator")
    vals, vecs = np.linalg.eigh((a + a.conj().T) / 2)
    cols = []
    for lam, col in zip(vals, vecs.T):
        if tol.is_zero(lam, "support eigenvalue"):
            continue
        if lam < 0:
            raise PreconditionError(f"operator is not PSD: eigenvalue {lam:.3e}")
        cols.append(col)
    if not cols:
        return np.zeros_like(a)
    v = np.array(cols).T
    proj = v @ v.conj().T
    proj.setflags(write=False)
    return proj


def maximally_entangled_ket(n: int) -> np.ndarray:
    """(1/sqrt(n)) * sum_i |i>|i> as a length n^2 vector."""
    if n < 1:
        raise DimensionError("local dimension must be >= 1")
    psi = np.eye(n, dtype=np.complex128).reshape(n * n) / np.sqrt(n)
    psi.setflags(write=False)
    return psi


def bob_residual(e, state_dim: int) -> np.ndarray:
    """Partial trace over the first subsystem of (e x I) |Psi><Psi|.

    |Psi> is the canonical maximally entangled state of local dimension
    ``state_dim``.  Computed as a genuine partial trace through the
    vector/matrix correspondence of the rank-1 state, never via the
    transpose shortcut; for projector inputs the result must coincide with
    transpose(e)/state_dim, which the test suite checks against an
    independent dense partial-trace oracle.
    """
    e = np.asarray(e, dtype=np.complex128)
    n = _require_square(e, "operator")
    if n != state_dim:
        raise DimensionError(f"operator dimension {n} != state dimension {state_dim}")
    psi_mat = np.eye(n, dtype=np.complex128) / np.sqrt(n)
    u_mat = e @ psi_mat  # (e x I)|Psi> reshaped to the (A, B) index grid
    res = u_mat.T @ psi_mat.conj()
    res.setflags(write=False)
    return res


def psd_leq(a, b, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff b - a is PSD within the tolerance policy (Hermitian inputs)."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    for name, m in (("first", a), ("second", b)):
        _require_square(m, f"{name} operand")
        if _max_abs(m - m.conj().T) > tol.zero_tol:
            raise PreconditionError(f"{name} operand is not Hermitian")
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    lam = float(np.linalg.eigvalsh(b - a)[0])
    return tol.is_nonneg(lam, "minimum eigenvalue of the operator difference")

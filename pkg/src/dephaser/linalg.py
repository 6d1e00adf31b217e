"""Dense complex linear algebra primitives shared by all other modules.

Everything operates on plain square ``numpy`` arrays of ``complex128``.
Matrices are dimensionless unless stated otherwise; tolerances are
centralized in :class:`Tolerances` so that every "numerically zero"
decision in the package uses the same thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "as_complex_matrix",
    "require_hermitian",
    "matmul",
    "dagger",
    "commutator",
    "kron",
    "is_diagonal",
    "trace",
    "frobenius_distance",
    "max_abs_diff",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    atol_zero: absolute magnitude below which a value counts as zero.
    atol_herm: allowed deviation from Hermiticity, max |M_ij - conj(M_ji)|.
    rtol_rate: relative tolerance for comparing decay/rotation rates.
    """

    atol_zero: float = 1e-10
    atol_herm: float = 1e-10
    rtol_rate: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("atol_zero", "atol_herm", "rtol_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a square complex128 array; raise on anything else."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    return a


def require_hermitian(m, tol: Tolerances = DEFAULT_TOL, what: str = "matrix") -> np.ndarray:
    """Validate Hermiticity of ``m`` within ``tol.atol_herm`` and return it."""
    a = as_complex_matrix(m)
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > tol.atol_herm:
        raise ValueError(f"{what} is not Hermitian: max |M - M^dag| = {dev:.3e}")
    return a


def _require_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def matmul(a, b) -> np.ndarray:
    """Matrix product of two equal-dimension square matrices."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    _require_same_dim(a, b)
    return a @ b


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_complex_matrix(a).conj().T


def commutator(h, rho) -> np.ndarray:
    """H @ rho - rho @ H for equal-dimension square matrices."""
    h = as_complex_matrix(h)
    rho = as_complex_matrix(rho)
    _require_same_dim(h, rho)
    return h @ rho - rho @ h


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor is the most significant digit
    of the composite index."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def is_diagonal(a, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, tuple[int, int, float] | None]:
    """Test whether every off-diagonal magnitude is below ``tol.atol_zero``.

    Returns ``(True, None)`` when diagonal, otherwise ``(False, (i, j, mag))``
    where ``(i, j)`` locates the largest off-diagonal entry.
    """
    a = as_complex_matrix(a)
    off = np.abs(a - np.diag(np.diag(a)))
    worst = float(off.max())
    if worst <= tol.atol_zero:
        return True, None
    i, j = np.unravel_index(int(off.argmax()), off.shape)
    return False, (int(i), int(j), worst)


def trace(a) -> complex:
    return complex(np.trace(as_complex_matrix(a)))


def frobenius_distance(a, b) -> float:
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    _require_same_dim(a, b)
    return float(np.linalg.norm(a - b))


def max_abs_diff(a, b) -> float:
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    _require_same_dim(a, b)
    return float(np.max(np.abs(a - b)))

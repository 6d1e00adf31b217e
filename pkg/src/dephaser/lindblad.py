"""Lindblad channels, the dissipator, and closed-form dephasing rates.

The master equation integrated here is (hbar = 1 throughout)

    d(rho)/dt = -i [H, rho] + D(rho),
    D(rho)    = sum_m (gamma_m / 2) (2 A_m rho A_m^dag
                                     - A_m^dag A_m rho - rho A_m^dag A_m),

with rates gamma_m > 0 and dimensionless Lindblad operators A_m.

When every A_m is diagonal in the computational basis with eigenvalues
lambda_i, the dissipator acts elementwise on rho,

    D(rho)_ij = (i Delta_ij - Gamma_ij) rho_ij,
    Gamma_ij  = (1/2) sum_m gamma_m |lambda_i - lambda_j|^2,
    Delta_ij  = sum_m gamma_m Im(lambda_i conj(lambda_j)),

and with a diagonal Hamiltonian diag(E_i) each coherence evolves in
closed form as rho_ij(t) = rho_ij(0) exp((i omega_ij - Gamma_ij) t) with
omega_ij = E_j - E_i + Delta_ij. Populations rho_ii never change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import DEFAULT_TOL, Tolerances, as_complex_matrix, commutator, is_diagonal

__all__ = [
    "Channel",
    "DiagonalChannel",
    "HamiltonianSpec",
    "RateTable",
    "diagonal_channels",
    "dissipator_apply",
    "rhs",
    "analytic_rates",
    "pair_rates",
    "coherence_closed_form",
    "dissipator_element_closed_form",
]


def _frozen_array(values, dtype) -> np.ndarray:
    a = np.array(values, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Channel:
    """A decoherence rate paired with a general Lindblad operator."""

    gamma: float
    operator: np.ndarray

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"channel rate must be positive, got {self.gamma}")
        object.__setattr__(self, "operator", _frozen_array(as_complex_matrix(self.operator), complex))

    @property
    def dim(self) -> int:
        return self.operator.shape[0]


@dataclass(frozen=True)
class DiagonalChannel:
    """A rate paired with the eigenvalue list of a diagonal Lindblad operator."""

    gamma: float
    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"channel rate must be positive, got {self.gamma}")
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=complex))
        if lam.ndim != 1 or lam.size < 1:
            raise ValueError("eigenvalues must be a non-empty 1-d sequence")
        object.__setattr__(self, "eigenvalues", _frozen_array(lam, complex))

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @classmethod
    def from_channel(cls, channel: Channel, tol: Tolerances = DEFAULT_TOL) -> "DiagonalChannel":
        """Extract the eigenvalue list; refuses non-diagonal operators."""
        ok, witness = is_diagonal(channel.operator, tol)
        if not ok:
            i, j, mag = witness
            raise ValueError(
                f"operator is not diagonal: entry ({i},{j}) has magnitude {mag:.3e}"
            )
        return cls(channel.gamma, np.diag(channel.operator))

    def to_channel(self) -> Channel:
        return Channel(self.gamma, np.diag(self.eigenvalues))


def diagonal_channels(
    channels: Sequence[Channel], tol: Tolerances = DEFAULT_TOL
) -> list[DiagonalChannel]:
    """Convert a channel list to eigenvalue form, refusing any non-diagonal member."""
    out = []
    for m, ch in enumerate(channels):
        try:
            out.append(DiagonalChannel.from_channel(ch, tol))
        except ValueError as exc:
            raise ValueError(f"channel {m}: {exc}") from None
    return out


@dataclass(frozen=True)
class HamiltonianSpec:
    """Diagonal Hamiltonian given by its real energies (hbar = 1, so the
    entries are angular frequencies)."""

    energies: np.ndarray

    def __post_init__(self) -> None:
        e = np.atleast_1d(np.asarray(self.energies, dtype=float))
        if e.ndim != 1 or e.size < 1:
            raise ValueError("energies must be a non-empty 1-d real sequence")
        object.__setattr__(self, "energies", _frozen_array(e, float))

    @property
    def dim(self) -> int:
        return self.energies.size

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.energies).astype(complex)


@dataclass(frozen=True)
class RateTable:
    """Per-element decay rates Gamma_ij, dissipative shifts Delta_ij, and
    total rotation frequencies omega_ij over the computational basis.

    Gamma is symmetric with zero diagonal and non-negative entries;
    Delta and omega are antisymmetric with zero diagonal.
    """

    gamma_ij: np.ndarray
    delta_ij: np.ndarray
    omega_ij: np.ndarray

    def __post_init__(self) -> None:
        g = as_complex_matrix(self.gamma_ij).real
        d = as_complex_matrix(self.delta_ij).real
        w = as_complex_matrix(self.omega_ij).real
        if not g.shape == d.shape == w.shape:
            raise ValueError("rate matrices must share one dimension")
        scale = max(1.0, np.abs(g).max(), np.abs(d).max(), np.abs(w).max())
        slack = 1e-9 * scale
        if g.min() < -slack:
            raise ValueError("decay rates must be non-negative")
        if np.abs(g - g.T).max() > slack or np.abs(np.diag(g)).max() > slack:
            raise ValueError("gamma_ij must be symmetric with zero diagonal")
        for name, m in (("delta_ij", d), ("omega_ij", w)):
            if np.abs(m + m.T).max() > slack:
                raise ValueError(f"{name} must be antisymmetric")
        object.__setattr__(self, "gamma_ij", _frozen_array(g, float))
        object.__setattr__(self, "delta_ij", _frozen_array(d, float))
        object.__setattr__(self, "omega_ij", _frozen_array(w, float))

    @property
    def dim(self) -> int:
        return self.gamma_ij.shape[0]


def dissipator_apply(channels: Sequence[Channel], rho) -> np.ndarray:
    """Apply the dissipator sum_m (gamma_m/2)(2 A rho A^dag - A^dag A rho
    - rho A^dag A) to a density matrix. Works for arbitrary (not only
    diagonal) Lindblad operators."""
    rho = as_complex_matrix(rho)
    out = np.zeros_like(rho)
    for ch in channels:
        a = ch.operator
        if a.shape != rho.shape:
            raise ValueError(f"operator dim {a.shape[0]} does not match rho dim {rho.shape[0]}")
        ad = a.conj().T
        ada = ad @ a
        out += 0.5 * ch.gamma * (2.0 * (a @ rho @ ad) - ada @ rho - rho @ ada)
    return out


def rhs(h, channels: Sequence[Channel], rho) -> np.ndarray:
    """Full master-equation right-hand side -i[H, rho] + D(rho).

    ``h`` may be None for purely dissipative evolution.
    """
    rho = as_complex_matrix(rho)
    if h is None:
        out = np.zeros_like(rho)
    else:
        out = -1j * commutator(h, rho)
    if channels:
        out = out + dissipator_apply(channels, rho)
    return out


def analytic_rates(
    h: HamiltonianSpec | None, channels: Sequence[DiagonalChannel]
) -> RateTable:
    """Closed-form rate table for diagonal channels and a diagonal Hamiltonian.

    Gamma_ij = (1/2) sum_m gamma_m |lambda_i - lambda_j|^2
    Delta_ij = sum_m gamma_m Im(lambda_i conj(lambda_j))
    omega_ij = E_j - E_i + Delta_ij
    """
    if not channels and h is None:
        raise ValueError("need at least a Hamiltonian or one channel")
    dim = channels[0].dim if channels else h.dim
    for m, ch in enumerate(channels):
        if ch.dim != dim:
            raise ValueError(f"channel {m} has {ch.dim} eigenvalues, expected {dim}")
    gamma = np.zeros((dim, dim))
    delta = np.zeros((dim, dim))
    for ch in channels:
        lam = ch.eigenvalues
        diff = lam[:, None] - lam[None, :]
        gamma += 0.5 * ch.gamma * np.abs(diff) ** 2
        delta += ch.gamma * np.imag(lam[:, None] * lam[None, :].conj())
    if h is not None:
        if h.dim != dim:
            raise ValueError(f"Hamiltonian has {h.dim} energies, expected {dim}")
        e = h.energies
        omega = e[None, :] - e[:, None] + delta
    else:
        omega = delta.copy()
    return RateTable(gamma, delta, omega)


def pair_rates(channels: Sequence[DiagonalChannel], i: int, j: int) -> tuple[float, float]:
    """(Gamma_ij, Delta_ij) for a single index pair, without building the
    full table. Intended for large registers and randomized audits."""
    gamma = 0.0
    delta = 0.0
    for ch in channels:
        li = complex(ch.eigenvalues[i])
        lj = complex(ch.eigenvalues[j])
        gamma += 0.5 * ch.gamma * abs(li - lj) ** 2
        delta += ch.gamma * (li * lj.conjugate()).imag
    return gamma, delta


def coherence_closed_form(table: RateTable, rho0_ij: complex, i: int, j: int, t: float) -> complex:
    """rho_ij(t) = rho_ij(0) * exp((i omega_ij - Gamma_ij) t) for t >= 0."""
    if t < 0:
        raise ValueError("time must be non-negative")
    rate = 1j * table.omega_ij[i, j] - table.gamma_ij[i, j]
    return complex(rho0_ij) * np.exp(rate * t)


def dissipator_element_closed_form(
    channels: Sequence[DiagonalChannel], i: int, j: int, rho_ij: complex
) -> complex:
    """Per-element dissipator action for diagonal channels,

        D(rho)_ij = sum_m (gamma_m/2) (2 lambda_i conj(lambda_j)
                     - |lambda_i|^2 - |lambda_j|^2) rho_ij,

    which equals (i Delta_ij - Gamma_ij) rho_ij."""
    factor = 0.0 + 0.0j
    for ch in channels:
        li = complex(ch.eigenvalues[i])
        lj = complex(ch.eigenvalues[j])
        factor += 0.5 * ch.gamma * (2.0 * li * lj.conjugate() - abs(li) ** 2 - abs(lj) ** 2)
    return factor * complex(rho_ij)

"""Qubit-register bookkeeping: basis states, named entangled states, and
spin-flip paths.

Conventions, fixed once for the whole package:

* qubit 1 is the leftmost / most significant position,
* up maps to bit 0 and down to bit 1, so the basis index of a state is
  ``sum_k b_k * 2**(n-k)`` and the all-up state has index 0,
* basis states render as strings of ``u``/``d`` characters ("udd"),
  whitespace in the input is ignored.

Register sizes are capped: dense analytic rate tables up to 10 qubits,
numerical integration up to 6 (see :mod:`dephaser.dynamics`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, Tolerances, require_hermitian

__all__ = [
    "MAX_ANALYTIC_QUBITS",
    "MAX_DYNAMICS_QUBITS",
    "BasisState",
    "SpinFlipPath",
    "ghz_state",
    "bell_state",
    "product_state",
    "ghz_chain",
    "hamming_path",
    "density_from_pure",
    "validate_density",
]

MAX_ANALYTIC_QUBITS = 10
MAX_DYNAMICS_QUBITS = 6

BELL_STATE_NAMES = ("psi_plus", "psi_minus", "phi_plus", "phi_minus")


def _check_qubit_count(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError("qubit count must be at least 1")
    if n > MAX_ANALYTIC_QUBITS:
        raise ValueError(f"register capped at {MAX_ANALYTIC_QUBITS} qubits, got {n}")
    return n


@dataclass(frozen=True)
class BasisState:
    """A computational basis state of an n-qubit register.

    ``bits`` holds one entry per qubit (qubit 1 first), 0 for up and 1
    for down.
    """

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.bits) < 1:
            raise ValueError("basis state needs at least one qubit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be 0 (up) or 1 (down), got {self.bits}")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        """Position of this state in the 2^n computational basis."""
        idx = 0
        for b in self.bits:
            idx = (idx << 1) | b
        return idx

    @classmethod
    def from_index(cls, index: int, n: int) -> "BasisState":
        n = _check_qubit_count(n)
        if not 0 <= index < 2**n:
            raise ValueError(f"index {index} out of range for {n} qubits")
        return cls(tuple((index >> (n - 1 - k)) & 1 for k in range(n)))

    @classmethod
    def from_string(cls, s: str) -> "BasisState":
        """Parse "udd"-style labels; whitespace is ignored ("ud d" == "udd")."""
        cleaned = "".join(s.split()).lower()
        if not cleaned or any(c not in "ud" for c in cleaned):
            raise ValueError(f"basis state label must be u/d characters, got {s!r}")
        return cls(tuple(0 if c == "u" else 1 for c in cleaned))

    def flipped(self, qubit: int) -> "BasisState":
        """Return the state with qubit ``qubit`` (1-based) flipped."""
        if not 1 <= qubit <= self.n:
            raise ValueError(f"qubit {qubit} out of range 1..{self.n}")
        bits = list(self.bits)
        bits[qubit - 1] ^= 1
        return BasisState(tuple(bits))

    def hamming_distance(self, other: "BasisState") -> int:
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        return sum(a != b for a, b in zip(self.bits, other.bits))

    def __str__(self) -> str:
        return "".join("u" if b == 0 else "d" for b in self.bits)


def _as_basis_state(state, n: int | None = None) -> BasisState:
    """Accept BasisState, integer index (requires n), or u/d label."""
    if isinstance(state, BasisState):
        return state
    if isinstance(state, str):
        return BasisState.from_string(state)
    if isinstance(state, (int, np.integer)):
        if n is None:
            raise ValueError("an integer basis index needs an explicit qubit count")
        return BasisState.from_index(int(state), n)
    raise TypeError(f"cannot interpret {state!r} as a basis state")


@dataclass(frozen=True)
class SpinFlipPath:
    """An ordered sequence of basis states, adjacent ones differing by
    exactly one single-qubit flip."""

    states: tuple[BasisState, ...]

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError("path must contain at least one state")
        n = self.states[0].n
        for a, b in zip(self.states, self.states[1:]):
            if a.n != n or b.n != n:
                raise ValueError("all states on a path must share the qubit count")
            if a.hamming_distance(b) != 1:
                raise ValueError(f"adjacent path states {a} and {b} are not one flip apart")

    @property
    def n_links(self) -> int:
        return len(self.states) - 1

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(s.index for s in self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)


def ghz_state(n: int) -> np.ndarray:
    """Amplitudes of (|up...up> + |down...down>)/sqrt(2) on n qubits."""
    n = _check_qubit_count(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def bell_state(which: str) -> np.ndarray:
    """Two-qubit Bell states.

    psi_plus/psi_minus = (|ud> +/- |du>)/sqrt(2) live on indices 1 and 2;
    phi_plus/phi_minus = (|uu> +/- |dd>)/sqrt(2) live on indices 0 and 3.
    """
    psi = np.zeros(4, dtype=complex)
    r = 1 / np.sqrt(2)
    if which == "psi_plus":
        psi[1], psi[2] = r, r
    elif which == "psi_minus":
        psi[1], psi[2] = r, -r
    elif which == "phi_plus":
        psi[0], psi[3] = r, r
    elif which == "phi_minus":
        psi[0], psi[3] = r, -r
    else:
        raise ValueError(f"unknown Bell state {which!r}; expected one of {BELL_STATE_NAMES}")
    return psi


def product_state(state) -> np.ndarray:
    """Amplitude vector of a single computational basis state."""
    b = _as_basis_state(state)
    psi = np.zeros(2**b.n, dtype=complex)
    psi[b.index] = 1.0
    return psi


def ghz_chain(n: int) -> SpinFlipPath:
    """The spin-flip path from |down...down> to |up...up> whose k-th state
    has the first k qubits up."""
    n = _check_qubit_count(n)
    states = tuple(BasisState((0,) * k + (1,) * (n - k)) for k in range(n + 1))
    return SpinFlipPath(states)


def hamming_path(i, j) -> SpinFlipPath:
    """Spin-flip path from ``i`` to ``j`` flipping the differing qubits in
    ascending order; length equals the Hamming distance (a single-state
    path when ``i == j``)."""
    a = _as_basis_state(i)
    b = _as_basis_state(j)
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    states = [a]
    current = a
    for qubit in range(1, a.n + 1):
        if current.bits[qubit - 1] != b.bits[qubit - 1]:
            current = current.flipped(qubit)
            states.append(current)
    return SpinFlipPath(tuple(states))


def density_from_pure(psi, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Outer product |psi><psi| of a normalized amplitude vector."""
    v = np.asarray(psi, dtype=complex).ravel()
    norm_sq = float(np.vdot(v, v).real)
    if abs(norm_sq - 1.0) > max(tol.rtol_rate, 1e-12):
        raise ValueError(f"state vector is not normalized: |psi|^2 = {norm_sq:.12f}")
    return np.outer(v, v.conj())


def validate_density(rho, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Full density-matrix validation: Hermitian, unit trace, eigenvalues
    above -1e-8. Used on user-facing entry points, not in inner loops."""
    rho = require_hermitian(rho, tol, what="density matrix")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > max(tol.rtol_rate, 1e-9):
        raise ValueError(f"density matrix trace is {tr:.12f}, expected 1")
    evals = np.linalg.eigvalsh(rho)
    if float(evals.min()) < -1e-8:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min():.3e}")
    return rho

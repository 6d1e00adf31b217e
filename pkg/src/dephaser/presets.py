"""Named dephasing scenarios: local projector channels, collective
up/down channels, and their n-qubit generalizations.

All presets are diagonal in the computational basis and emit H = 0
unless explicit energies are attached, so every one of them passes the
population-preservation check by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lindblad import Channel, HamiltonianSpec
from .linalg import kron
from .register import BasisState, _check_qubit_count

__all__ = [
    "PRESETS",
    "PresetSpec",
    "build_preset",
    "named_operator",
    "NAMED_OPERATORS",
    "up_projector",
]

PRESETS = {
    "local_projectors": "two qubits, one up-projector channel per qubit (rates g1, g2)",
    "collective_updown": "two qubits, single channel |uu><uu| - |dd><dd| (rate g)",
    "split_updown": "two qubits, channels |uu><uu| and |dd><dd| sharing one rate g",
    "local_dephasing_n": "n qubits, one local up-projector channel per qubit (rates g1..gn)",
    "collective_linear_n": "n qubits, single channel counting the up spins (rate g)",
}

NAMED_OPERATORS = (
    "up_projector_<k>",
    "all_up_projector",
    "all_down_projector",
    "updown_difference",
    "up_count",
)

_ARITY = {
    "local_projectors": 2,
    "collective_updown": 1,
    "split_updown": 1,
    "local_dephasing_n": None,  # one rate per qubit
    "collective_linear_n": 1,
}


@dataclass(frozen=True)
class PresetSpec:
    """A preset name with its qubit count and rate list."""

    name: str
    n: int = 2
    gammas: tuple[float, ...] = (1.0,)
    energies: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.name not in PRESETS:
            raise ValueError(f"unknown preset {self.name!r}; known: {sorted(PRESETS)}")
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if any(g <= 0 for g in self.gammas):
            raise ValueError("preset rates must all be positive")
        n = _check_qubit_count(self.n)
        if self.name in ("local_projectors", "collective_updown", "split_updown") and n != 2:
            raise ValueError(f"preset {self.name!r} is defined on 2 qubits, got n={n}")
        expected = _ARITY[self.name]
        if expected is None:
            expected = n
        if len(self.gammas) != expected:
            raise ValueError(
                f"preset {self.name!r} takes {expected} rate(s), got {len(self.gammas)}"
            )
        if self.energies is not None:
            energies = tuple(float(e) for e in self.energies)
            if len(energies) != 2**n:
                raise ValueError(f"energies must have 2^{n} entries")
            object.__setattr__(self, "energies", energies)


def up_projector(qubit: int, n: int) -> np.ndarray:
    """|up><up| acting on one qubit of an n-qubit register (identity elsewhere)."""
    n = _check_qubit_count(n)
    if not 1 <= qubit <= n:
        raise ValueError(f"qubit {qubit} out of range 1..{n}")
    op = np.eye(1, dtype=complex)
    proj = np.diag([1.0, 0.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    for k in range(1, n + 1):
        op = kron(op, proj if k == qubit else eye)
    return op


def _basis_projector(state: BasisState) -> np.ndarray:
    op = np.eye(1, dtype=complex)
    proj_up = np.diag([1.0, 0.0]).astype(complex)
    proj_down = np.diag([0.0, 1.0]).astype(complex)
    for b in state.bits:
        op = kron(op, proj_up if b == 0 else proj_down)
    return op


def named_operator(name: str, n: int) -> np.ndarray:
    """Resolve a stable operator name usable in scenario files.

    up_projector_<k>    local up-projector on qubit k
    all_up_projector    |u...u><u...u|
    all_down_projector  |d...d><d...d|
    updown_difference   |u...u><u...u| - |d...d><d...d|
    up_count            diagonal operator counting the up spins
    """
    n = _check_qubit_count(n)
    if name.startswith("up_projector_"):
        qubit = int(name.removeprefix("up_projector_"))
        return up_projector(qubit, n)
    if name == "all_up_projector":
        return _basis_projector(BasisState((0,) * n))
    if name == "all_down_projector":
        return _basis_projector(BasisState((1,) * n))
    if name == "updown_difference":
        return _basis_projector(BasisState((0,) * n)) - _basis_projector(BasisState((1,) * n))
    if name == "up_count":
        out = np.zeros((2**n, 2**n), dtype=complex)
        for qubit in range(1, n + 1):
            out += up_projector(qubit, n)
        return out
    raise ValueError(f"unknown operator name {name!r}; known: {NAMED_OPERATORS}")


def build_preset(spec: PresetSpec) -> tuple[HamiltonianSpec, list[Channel]]:
    """Build the Hamiltonian (zero unless energies were attached) and the
    channel list of a named preset."""
    n = spec.n
    if spec.name == "local_projectors":
        channels = [
            Channel(spec.gammas[0], up_projector(1, 2)),
            Channel(spec.gammas[1], up_projector(2, 2)),
        ]
    elif spec.name == "collective_updown":
        channels = [Channel(spec.gammas[0], named_operator("updown_difference", 2))]
    elif spec.name == "split_updown":
        channels = [
            Channel(spec.gammas[0], named_operator("all_up_projector", 2)),
            Channel(spec.gammas[0], named_operator("all_down_projector", 2)),
        ]
    elif spec.name == "local_dephasing_n":
        channels = [Channel(g, up_projector(k + 1, n)) for k, g in enumerate(spec.gammas)]
    elif spec.name == "collective_linear_n":
        channels = [Channel(spec.gammas[0], named_operator("up_count", n))]
    else:  # unreachable: PresetSpec validates the name
        raise ValueError(f"unknown preset {spec.name!r}")
    energies = spec.energies if spec.energies is not None else (0.0,) * 2**n
    return HamiltonianSpec(np.array(energies)), channels

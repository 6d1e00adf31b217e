"""Scenario files and result reports.

Scenarios are JSON; complex numbers are encoded as two-element
``[re, im]`` arrays so the files stay language neutral and diff friendly.
A scenario names the register size, an optional diagonal (energy list)
or explicit Hamiltonian, the channels (either one preset reference or a
list of per-channel entries whose operator is a stable operator name or
an explicit matrix), an initial state, the integration window, and the
coherence elements to track.

Parsing normalizes a scenario to a canonical form: serializing a parsed
scenario and parsing it again is a fixed point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import FitResult
from .lindblad import Channel, HamiltonianSpec, RateTable
from .linalg import DEFAULT_TOL, Tolerances, is_diagonal
from .register import (
    BasisState,
    BELL_STATE_NAMES,
    bell_state,
    density_from_pure,
    ghz_state,
    product_state,
)
from .presets import PresetSpec, build_preset, named_operator

__all__ = [
    "Scenario",
    "Report",
    "encode_complex_matrix",
    "decode_complex_matrix",
    "encode_complex_vector",
    "decode_complex_vector",
    "serialize_rate_table",
]

STATE_PRESETS = ("ghz",) + BELL_STATE_NAMES


def _decode_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"cannot parse {value!r} as a complex number; expected [re, im]")


def _encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def decode_complex_matrix(rows) -> np.ndarray:
    m = np.array([[_decode_complex(v) for v in row] for row in rows], dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def encode_complex_matrix(m: np.ndarray) -> list[list[list[float]]]:
    return [[_encode_complex(complex(v)) for v in row] for row in np.asarray(m, dtype=complex)]


def decode_complex_vector(values) -> np.ndarray:
    return np.array([_decode_complex(v) for v in values], dtype=complex)


def encode_complex_vector(v: np.ndarray) -> list[list[float]]:
    return [_encode_complex(complex(x)) for x in np.asarray(v, dtype=complex)]


def _canonical_label(label: str) -> str:
    return str(BasisState.from_string(label))


@dataclass
class Scenario:
    """A parsed, validated scenario."""

    n_qubits: int
    hamiltonian_energies: tuple[float, ...] | None = None
    hamiltonian_matrix: np.ndarray | None = None
    channel_preset: PresetSpec | None = None
    channel_entries: tuple[tuple[float, object], ...] = ()  # (gamma, name-or-matrix)
    initial_state: object = "ghz"  # preset name, bitstring, or amplitude array
    t_max: float | None = None
    steps: int | None = None
    track: tuple[tuple[str, str], ...] = ()

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if "n_qubits" not in data:
            raise ValueError("scenario is missing n_qubits")
        n = int(data["n_qubits"])
        if n < 1:
            raise ValueError("n_qubits must be at least 1")
        dim = 2**n

        energies = None
        matrix = None
        ham = data.get("hamiltonian")
        if ham is not None:
            if all(isinstance(x, (int, float)) for x in ham):
                energies = tuple(float(x) for x in ham)
                if len(energies) != dim:
                    raise ValueError(f"hamiltonian energy list must have {dim} entries")
            else:
                matrix = decode_complex_matrix(ham)
                if matrix.shape[0] != dim:
                    raise ValueError(f"hamiltonian matrix must be {dim}x{dim}")

        preset = None
        entries: list[tuple[float, object]] = []
        raw_channels = data.get("channels")
        if raw_channels is None:
            raise ValueError("scenario is missing channels")
        if isinstance(raw_channels, dict):
            preset = PresetSpec(
                name=raw_channels["preset"],
                n=int(raw_channels.get("n", n)),
                gammas=tuple(raw_channels.get("gammas", (1.0,))),
                energies=(
                    tuple(raw_channels["energies"]) if "energies" in raw_channels else None
                ),
            )
            if preset.n != n:
                raise ValueError(f"preset qubit count {preset.n} != scenario n_qubits {n}")
        else:
            for k, entry in enumerate(raw_channels):
                try:
                    gamma = float(entry["gamma"])
                    op = entry["operator"]
                except (KeyError, TypeError):
                    raise ValueError(f"channel {k} must be an object with gamma and operator")
                if isinstance(op, str):
                    entries.append((gamma, op))
                else:
                    entries.append((gamma, decode_complex_matrix(op)))

        initial = data.get("initial_state", "ghz")
        if isinstance(initial, str):
            if initial not in STATE_PRESETS:
                initial = _canonical_label(initial)  # product bitstring
        else:
            initial = decode_complex_vector(initial)
            if initial.size != dim:
                raise ValueError(f"initial amplitude list must have {dim} entries")

        t_max = data.get("t_max")
        if t_max is not None:
            t_max = float(t_max)
            if t_max <= 0:
                raise ValueError("t_max must be positive")
        steps = data.get("steps")
        if steps is not None:
            steps = int(steps)
            if steps < 1:
                raise ValueError("steps must be at least 1")

        track = []
        for pair in data.get("track", []):
            if len(pair) != 2:
                raise ValueError(f"track entries must be pairs, got {pair!r}")
            a, b = (_canonical_label(x) for x in pair)
            if len(a) != n or len(b) != n:
                raise ValueError(f"tracked pair ({a}, {b}) does not match n_qubits={n}")
            track.append((a, b))

        scenario = cls(
            n_qubits=n,
            hamiltonian_energies=energies,
            hamiltonian_matrix=matrix,
            channel_preset=preset,
            channel_entries=tuple(entries),
            initial_state=initial,
            t_max=t_max,
            steps=steps,
            track=tuple(track),
        )
        scenario.channels()  # validate operator names and dimensions now
        return scenario

    @classmethod
    def from_json(cls, path) -> "Scenario":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        out: dict = {"n_qubits": self.n_qubits}
        if self.hamiltonian_energies is not None:
            out["hamiltonian"] = list(self.hamiltonian_energies)
        elif self.hamiltonian_matrix is not None:
            out["hamiltonian"] = encode_complex_matrix(self.hamiltonian_matrix)
        else:
            out["hamiltonian"] = None
        if self.channel_preset is not None:
            preset: dict = {
                "preset": self.channel_preset.name,
                "n": self.channel_preset.n,
                "gammas": list(self.channel_preset.gammas),
            }
            if self.channel_preset.energies is not None:
                preset["energies"] = list(self.channel_preset.energies)
            out["channels"] = preset
        else:
            out["channels"] = [
                {
                    "gamma": gamma,
                    "operator": op if isinstance(op, str) else encode_complex_matrix(op),
                }
                for gamma, op in self.channel_entries
            ]
        if isinstance(self.initial_state, str):
            out["initial_state"] = self.initial_state
        else:
            out["initial_state"] = encode_complex_vector(self.initial_state)
        out["t_max"] = self.t_max
        out["steps"] = self.steps
        out["track"] = [list(pair) for pair in self.track]
        return out

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")

    # -- builders ----------------------------------------------------------

    def hamiltonian(self) -> np.ndarray | None:
        """The Hamiltonian as an explicit matrix, or None when absent."""
        if self.hamiltonian_energies is not None:
            return np.diag(np.array(self.hamiltonian_energies, dtype=float)).astype(complex)
        if self.hamiltonian_matrix is not None:
            return self.hamiltonian_matrix
        if self.channel_preset is not None and self.channel_preset.energies is not None:
            return HamiltonianSpec(np.array(self.channel_preset.energies)).matrix
        return None

    def hamiltonian_spec(self, tol: Tolerances = DEFAULT_TOL) -> HamiltonianSpec | None:
        """Diagonal-energy view of the Hamiltonian; raises when it is not
        diagonal."""
        h = self.hamiltonian()
        if h is None:
            return None
        ok, witness = is_diagonal(h, tol)
        if not ok:
            i, j, mag = witness
            raise ValueError(
                f"hamiltonian is not diagonal: entry ({i},{j}) has magnitude {mag:.3e}"
            )
        return HamiltonianSpec(np.diag(h).real)

    def channels(self) -> list[Channel]:
        if self.channel_preset is not None:
            _, channels = build_preset(self.channel_preset)
            return channels
        channels = []
        for gamma, op in self.channel_entries:
            matrix = named_operator(op, self.n_qubits) if isinstance(op, str) else op
            if matrix.shape[0] != self.dim:
                raise ValueError(
                    f"channel operator dimension {matrix.shape[0]} != register dim {self.dim}"
                )
            channels.append(Channel(gamma, matrix))
        return channels

    def initial_density(self, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
        if isinstance(self.initial_state, str):
            name = self.initial_state
            if name == "ghz":
                psi = ghz_state(self.n_qubits)
            elif name in BELL_STATE_NAMES:
                if self.n_qubits != 2:
                    raise ValueError("Bell states need a 2-qubit scenario")
                psi = bell_state(name)
            else:
                state = BasisState.from_string(name)
                if state.n != self.n_qubits:
                    raise ValueError(
                        f"initial state {name!r} has {state.n} qubits, expected {self.n_qubits}"
                    )
                psi = product_state(state)
        else:
            psi = self.initial_state
        return density_from_pure(psi, tol)

    def tracked_pairs(self) -> list[tuple[BasisState, BasisState]]:
        return [
            (BasisState.from_string(a), BasisState.from_string(b)) for a, b in self.track
        ]


def serialize_rate_table(table: RateTable, n_qubits: int) -> dict:
    labels = [str(BasisState.from_index(i, n_qubits)) for i in range(table.dim)]
    return {
        "labels": labels,
        "gamma_ij": table.gamma_ij.tolist(),
        "delta_ij": table.delta_ij.tolist(),
        "omega_ij": table.omega_ij.tolist(),
    }


@dataclass
class Report:
    """Aggregated command output; sections are filled by the commands that
    produce them."""

    rate_table: dict | None = None
    fits: dict = field(default_factory=dict)
    bounds: list = field(default_factory=list)
    preservation: dict | None = None
    fit_tolerance: float = 1e-3

    def to_dict(self) -> dict:
        out: dict = {}
        if self.rate_table is not None:
            out["rate_table"] = self.rate_table
        if self.fits:
            out["fits"] = self.fits
        if self.bounds:
            out["bounds"] = self.bounds
        if self.preservation is not None:
            out["preservation"] = self.preservation
        out["fit_tolerance"] = self.fit_tolerance
        return out


def fit_to_dict(fit: FitResult) -> dict:
    return {
        "gamma_hat": fit.gamma_hat,
        "omega_hat": fit.omega_hat,
        "residual": fit.residual,
        "n_points": fit.n_points,
    }

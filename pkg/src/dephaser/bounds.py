"""Population-preservation checks, the chain inequality for dephasing
rates, and randomized audits of both.

The central inequality: if the evolution preserves populations in the
computational basis (equivalently, H and every Lindblad operator are
diagonal in it), then for any sequence of basis states p_0 ... p_n

    Gamma_{p0,pn} <= n * sum_k Gamma_{p(k-1),p(k)},

with equality if and only if, for each channel, the eigenvalue step
lambda_{p(k-1)} - lambda_{p(k)} is the same for every link k. Applied to
a spin-flip chain this bounds the dephasing rate of an n-qubit GHZ-type
coherence by n times the sum of single-qubit dephasing rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np

from .lindblad import (
    Channel,
    DiagonalChannel,
    analytic_rates,
    dissipator_element_closed_form,
    dissipator_apply,
    pair_rates,
    rhs,
)
from .linalg import DEFAULT_TOL, Tolerances, as_complex_matrix, is_diagonal
from .register import BasisState, SpinFlipPath, ghz_chain
from . import dynamics

__all__ = [
    "TheoremViolation",
    "StructuralWitness",
    "LeakageWitness",
    "PreservationReport",
    "BoundReport",
    "check_population_preserving",
    "chain_bound",
    "chain_equality_condition",
    "ghz_bound",
    "best_hamming_bound",
    "ElementwiseRatesAudit",
    "PreservationAudit",
    "ChainBoundAudit",
    "audit_elementwise_rates",
    "audit_population_preservation",
    "audit_chain_bound",
]

TIGHTNESS_FLOOR = 1e-12


class TheoremViolation(Exception):
    """A guaranteed mathematical property failed numerically; carries the
    offending seed/instance in its message."""


@dataclass(frozen=True)
class StructuralWitness:
    """Largest off-diagonal entry of a generator that must be diagonal."""

    operator_id: str
    i: int
    j: int
    magnitude: float

    def to_dict(self) -> dict:
        return {
            "operator": self.operator_id,
            "i": self.i,
            "j": self.j,
            "magnitude": self.magnitude,
        }


@dataclass(frozen=True)
class LeakageWitness:
    """Probe-state evidence: a basis state whose population moves."""

    state: str
    rate: float

    def to_dict(self) -> dict:
        return {"state": self.state, "rate": self.rate}


@dataclass(frozen=True)
class PreservationReport:
    """Outcome of the population-preservation check."""

    verdict: bool
    structural_witness: StructuralWitness | None = None
    leakage_witness: LeakageWitness | None = None

    def __post_init__(self) -> None:
        if self.verdict and (self.structural_witness or self.leakage_witness):
            raise ValueError("a passing report cannot carry witnesses")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "structural_witness": (
                None if self.structural_witness is None else self.structural_witness.to_dict()
            ),
            "leakage_witness": (
                None if self.leakage_witness is None else self.leakage_witness.to_dict()
            ),
        }


@dataclass(frozen=True)
class BoundReport:
    """One evaluation of the chain inequality along a basis-state path."""

    lhs: float
    link_rates: tuple[float, ...]
    n: int
    rhs: float
    tight: bool
    margin: float

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "link_rates": list(self.link_rates),
            "n": self.n,
            "rhs": self.rhs,
            "tight": self.tight,
            "margin": self.margin,
        }


def _state_label(index: int, dim: int) -> str:
    n = int(round(math.log2(dim)))
    if 2**n == dim:
        return str(BasisState.from_index(index, n))
    return str(index)


def check_population_preserving(
    h, channels: Sequence[Channel], tol: Tolerances = DEFAULT_TOL
) -> PreservationReport:
    """Decide whether the evolution keeps every population rho_ii constant.

    The verdict is structural: true iff H and every Lindblad operator are
    diagonal in the computational basis. When the check fails, the report
    carries the worst off-diagonal entry plus dynamics-based evidence:

    * a non-diagonal operator A is probed with rho = |j><j| at the
      offending column, whose population leaks at rate
      sum_m gamma_m sum_{k != j} |A_kj|^2;
    * a non-diagonal H (with diagonal channels) is probed with
      (|i> + e^{i phi}|j>)/sqrt(2) for phi in {0, pi/2}, one of which
      moves rho_ii at rate |Im(H_ij e^{i phi})|.
    """
    hm = None if h is None else as_complex_matrix(h)
    dim = hm.shape[0] if hm is not None else (channels[0].dim if channels else 0)
    if dim == 0:
        return PreservationReport(True)
    if hm is not None and hm.shape[0] != dim:
        raise ValueError("Hamiltonian dimension mismatch")
    for m, ch in enumerate(channels):
        if ch.dim != dim:
            raise ValueError(f"channel {m} dimension mismatch")

    worst_channel: StructuralWitness | None = None
    for m, ch in enumerate(channels):
        ok, witness = is_diagonal(ch.operator, tol)
        if not ok:
            i, j, mag = witness
            if worst_channel is None or mag > worst_channel.magnitude:
                worst_channel = StructuralWitness(f"A[{m}]", i, j, mag)

    if worst_channel is not None:
        j = worst_channel.j
        probe = np.zeros((dim, dim), dtype=complex)
        probe[j, j] = 1.0
        leak = -float(rhs(hm, channels, probe)[j, j].real)
        return PreservationReport(
            False,
            structural_witness=worst_channel,
            leakage_witness=LeakageWitness(_state_label(j, dim), leak),
        )

    if hm is not None:
        ok, witness = is_diagonal(hm, tol)
        if not ok:
            i, j, mag = witness
            best_rate = 0.0
            for phi in (0.0, math.pi / 2):
                psi = np.zeros(dim, dtype=complex)
                psi[i] = 1 / math.sqrt(2)
                psi[j] = np.exp(1j * phi) / math.sqrt(2)
                probe = np.outer(psi, psi.conj())
                rate = abs(float(rhs(hm, channels, probe)[i, i].real))
                best_rate = max(best_rate, rate)
            return PreservationReport(
                False,
                structural_witness=StructuralWitness("H", i, j, mag),
                leakage_witness=LeakageWitness(_state_label(i, dim), best_rate),
            )

    return PreservationReport(True)


def _path_indices(path, dim: int) -> list[int]:
    if isinstance(path, SpinFlipPath):
        indices = list(path.indices)
    else:
        indices = [s.index if isinstance(s, BasisState) else int(s) for s in path]
    if not indices:
        raise ValueError("path must contain at least one state")
    for p in indices:
        if not 0 <= p < dim:
            raise ValueError(f"path index {p} out of range for dimension {dim}")
    return indices


def _tightness_tolerance(rhs_value: float, tol: Tolerances) -> float:
    return tol.rtol_rate * rhs_value if rhs_value > 0 else TIGHTNESS_FLOOR


def _bound_report(
    lhs: float, links: Sequence[float], tol: Tolerances, context: str = ""
) -> BoundReport:
    n = len(links)
    rhs_value = n * float(sum(links))
    margin = rhs_value - lhs
    if margin < -tol.rtol_rate * max(rhs_value, TIGHTNESS_FLOOR):
        raise TheoremViolation(
            f"chain bound violated{context}: lhs {lhs!r} exceeds rhs {rhs_value!r}"
        )
    tight = margin <= _tightness_tolerance(rhs_value, tol)
    return BoundReport(
        lhs=lhs,
        link_rates=tuple(float(x) for x in links),
        n=n,
        rhs=rhs_value,
        tight=tight,
        margin=margin,
    )


def chain_bound(rate_table, path, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Evaluate Gamma_{p0,pn} <= n * sum_k Gamma_{p(k-1),p(k)} along a path.

    Accepts a SpinFlipPath or any sequence of basis states / indices; a
    single-state path yields the trivial report lhs = rhs = 0.
    """
    indices = _path_indices(path, rate_table.dim)
    lhs = float(rate_table.gamma_ij[indices[0], indices[-1]])
    links = [float(rate_table.gamma_ij[a, b]) for a, b in zip(indices, indices[1:])]
    return _bound_report(lhs, links, tol)


def chain_equality_condition(
    channels: Sequence[DiagonalChannel], path, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """True iff for every channel the eigenvalue differences along the
    path links are all equal (within ``tol.atol_zero``); this is exactly
    the condition under which the chain bound holds with equality."""
    if not channels:
        return True
    indices = _path_indices(path, channels[0].dim)
    if len(indices) < 3:
        return True  # zero or one link: a single step is trivially uniform
    for ch in channels:
        lam = ch.eigenvalues
        steps = [lam[a] - lam[b] for a, b in zip(indices, indices[1:])]
        first = steps[0]
        if any(abs(s - first) > tol.atol_zero for s in steps[1:]):
            return False
    return True


def ghz_bound(rate_table, n: int, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Chain bound along the GHZ spin-flip chain: the lhs is the decay
    rate of <down...down| rho |up...up>, the links are the single-qubit
    rates."""
    if rate_table.dim != 2**n:
        raise ValueError(f"rate table dimension {rate_table.dim} is not 2^{n}")
    return chain_bound(rate_table, ghz_chain(n), tol)


def best_hamming_bound(
    rate_table, i, j, tol: Tolerances = DEFAULT_TOL, max_distance: int = 8
) -> tuple[BoundReport, SpinFlipPath]:
    """Minimum-rhs chain bound over all spin-flip paths between two basis
    states (all flip orders of the differing qubits). Implementation
    convenience: the inequality itself is per-path; this simply reports
    the most informative one."""
    a = i if isinstance(i, BasisState) else BasisState.from_index(int(i), int(round(math.log2(rate_table.dim))))
    b = j if isinstance(j, BasisState) else BasisState.from_index(int(j), a.n)
    if a.n != b.n:
        raise ValueError("qubit counts differ")
    differing = [q for q in range(1, a.n + 1) if a.bits[q - 1] != b.bits[q - 1]]
    if len(differing) > max_distance:
        raise ValueError(
            f"Hamming distance {len(differing)} exceeds enumeration cap {max_distance}"
        )
    if not differing:
        path = SpinFlipPath((a,))
        return chain_bound(rate_table, path, tol), path
    best: tuple[BoundReport, SpinFlipPath] | None = None
    for order in permutations(differing):
        states = [a]
        for q in order:
            states.append(states[-1].flipped(q))
        path = SpinFlipPath(tuple(states))
        report = chain_bound(rate_table, path, tol)
        if best is None or report.rhs < best[0].rhs:
            best = (report, path)
    return best


# ---------------------------------------------------------------------------
# Randomized audits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ElementwiseRatesAudit:
    """Worst disagreement between the matrix-product dissipator and the
    elementwise closed form over random diagonal instances."""

    trials: int
    max_relative_error: float

    def to_dict(self) -> dict:
        return {"trials": self.trials, "max_relative_error": self.max_relative_error}


@dataclass(frozen=True)
class PreservationAudit:
    trials: int
    max_diagonal_drift: float
    mutants_detected: int

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "max_diagonal_drift": self.max_diagonal_drift,
            "mutants_detected": self.mutants_detected,
        }


@dataclass(frozen=True)
class ChainBoundAudit:
    trials: int
    tight_trials: int
    min_relative_margin: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "tight_trials": self.tight_trials,
            "min_relative_margin": self.min_relative_margin,
        }


def _random_diagonal_channels(rng, dim: int, max_channels: int) -> list[DiagonalChannel]:
    count = int(rng.integers(1, max_channels + 1))
    out = []
    for _ in range(count):
        gamma = 1.0 - float(rng.random())  # uniform in (0, 1]
        lam = rng.random(dim) + 1j * rng.random(dim)
        out.append(DiagonalChannel(gamma, lam))
    return out


def audit_elementwise_rates(
    n_trials: int,
    rng_seed: int,
    max_qubits: int = 4,
    max_channels: int = 4,
    rel_tol: float = 1e-9,
) -> ElementwiseRatesAudit:
    """Random-instance check that, for diagonal channels, the brute-force
    dissipator equals the elementwise closed form and the
    (i Delta - Gamma) rate factors, elementwise to ``rel_tol`` relative
    to the matrix scale. Raises TheoremViolation on any disagreement.
    """
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for trial in range(n_trials):
        nq = int(rng.integers(1, max_qubits + 1))
        dim = 2**nq
        diag = _random_diagonal_channels(rng, dim, max_channels)
        matrix_channels = [ch.to_channel() for ch in diag]
        x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = 0.5 * (x + x.conj().T)

        brute = dissipator_apply(matrix_channels, rho)
        elementwise = np.empty_like(brute)
        for i in range(dim):
            for j in range(dim):
                elementwise[i, j] = dissipator_element_closed_form(diag, i, j, rho[i, j])
        table = analytic_rates(None, diag)
        factors = 1j * table.delta_ij - table.gamma_ij
        from_rates = factors * rho

        scale = max(np.abs(brute).max(), np.abs(elementwise).max(), np.abs(from_rates).max(), 1e-300)
        err = max(
            np.abs(brute - elementwise).max(),
            np.abs(brute - from_rates).max(),
            np.abs(elementwise - from_rates).max(),
        ) / scale
        worst = max(worst, float(err))
        if err > rel_tol:
            raise TheoremViolation(
                f"elementwise rate mismatch {err:.3e} at trial {trial} (seed {rng_seed})"
            )
    return ElementwiseRatesAudit(trials=n_trials, max_relative_error=worst)


def audit_population_preservation(
    n_trials: int,
    rng_seed: int,
    max_qubits: int = 3,
    integrate: bool = True,
    t_max: float = 1.0,
    drift_tol: float = 1e-8,
) -> PreservationAudit:
    """Random-instance check of the population-preservation criterion in
    both directions.

    Every trial builds a random diagonal scenario, requires a passing
    verdict and (optionally) integrates it to ``t_max`` requiring every
    diagonal element to stay constant within ``drift_tol``; the trial's
    mutant injects one off-diagonal entry (magnitude >= 1e-3) into a
    channel or into H and must be detected with a nonzero leakage rate.
    Raises TheoremViolation on any failure.
    """
    rng = np.random.default_rng(rng_seed)
    max_drift = 0.0
    mutants_detected = 0
    for trial in range(n_trials):
        nq = int(rng.integers(1, max_qubits + 1))
        dim = 2**nq
        diag = _random_diagonal_channels(rng, dim, max_channels=3)
        channels = [ch.to_channel() for ch in diag]
        h = np.diag(rng.uniform(-1.0, 1.0, size=dim)).astype(complex)

        report = check_population_preserving(h, channels)
        if not report.verdict:
            raise TheoremViolation(
                f"diagonal scenario flagged non-preserving at trial {trial} (seed {rng_seed})"
            )

        if integrate:
            psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            psi /= np.linalg.norm(psi)
            rho0 = np.outer(psi, psi.conj())
            steps = dynamics.required_steps(h, channels, t_max)
            traj = dynamics.evolve(h, channels, rho0, t_max, steps)
            pops = np.abs(np.einsum("tii->ti", traj.snapshots) - np.diag(rho0)[None, :])
            drift = float(pops.max())
            max_drift = max(max_drift, drift)
            if drift > drift_tol:
                raise TheoremViolation(
                    f"population drift {drift:.3e} at trial {trial} (seed {rng_seed})"
                )

        # Mutant: one injected off-diagonal entry must be caught.
        i, j = 0, 0
        while i == j:
            i, j = int(rng.integers(dim)), int(rng.integers(dim))
        magnitude = float(rng.uniform(1e-3, 1e-1))
        entry = magnitude * np.exp(1j * rng.uniform(0, 2 * np.pi))
        mutate_h = bool(rng.integers(2))
        if mutate_h:
            bad_h = h.copy()
            bad_h[i, j] = entry
            bad_h[j, i] = np.conj(entry)  # keep H Hermitian
            mutant_report = check_population_preserving(bad_h, channels)
        else:
            k = int(rng.integers(len(channels)))
            bad_op = channels[k].operator.copy()
            bad_op[i, j] = entry
            mutated = list(channels)
            mutated[k] = Channel(channels[k].gamma, bad_op)
            mutant_report = check_population_preserving(h, mutated)
        if mutant_report.verdict or mutant_report.leakage_witness is None:
            raise TheoremViolation(
                f"mutant not detected at trial {trial} (seed {rng_seed})"
            )
        if not abs(mutant_report.leakage_witness.rate) > 0:
            raise TheoremViolation(
                f"mutant detected without leakage evidence at trial {trial} (seed {rng_seed})"
            )
        mutants_detected += 1
    return PreservationAudit(
        trials=n_trials, max_diagonal_drift=max_drift, mutants_detected=mutants_detected
    )


def audit_chain_bound(
    n_qubits: int,
    n_channels: int,
    n_trials: int,
    rng_seed: int,
    max_chain_len: int = 10,
    tol: Tolerances = DEFAULT_TOL,
) -> ChainBoundAudit:
    """Random-instance audit of the chain inequality.

    Draws random diagonal channels (complex eigenvalues uniform in the
    unit square, rates uniform in (0, 1]) and random basis-state paths,
    requiring the bound to hold on every trial and tightness to agree
    with the equality condition. Raises TheoremViolation otherwise.
    """
    if n_qubits > 10:
        raise ValueError("audit capped at 10 qubits")
    rng = np.random.default_rng(rng_seed)
    dim = 2**n_qubits
    tight_trials = 0
    min_rel_margin = math.inf
    for trial in range(n_trials):
        channels = _random_diagonal_channels(rng, dim, n_channels)
        n_links = int(rng.integers(1, max_chain_len + 1))
        path = [int(p) for p in rng.integers(0, dim, size=n_links + 1)]

        lhs, _ = pair_rates(channels, path[0], path[-1])
        links = [pair_rates(channels, a, b)[0] for a, b in zip(path, path[1:])]
        try:
            report = _bound_report(lhs, links, tol, context=f" at trial {trial} (seed {rng_seed})")
        except TheoremViolation:
            raise
        equality = chain_equality_condition(channels, path, tol)
        if equality != report.tight:
            raise TheoremViolation(
                f"tightness/equality disagreement at trial {trial} (seed {rng_seed}): "
                f"tight={report.tight} equality={equality} margin={report.margin!r}"
            )
        if report.tight:
            tight_trials += 1
        if report.rhs > 0:
            min_rel_margin = min(min_rel_margin, report.margin / report.rhs)
    if math.isinf(min_rel_margin):
        min_rel_margin = 0.0
    return ChainBoundAudit(
        trials=n_trials, tight_trials=tight_trials, min_relative_margin=min_rel_margin
    )

"""Numerical time evolution of the master equation and rate extraction.

Integration is classical fixed-step 4th-order Runge-Kutta with a hard
step-size bound

    dt <= 0.05 / max(||H||_F, sum_m gamma_m ||A_m||_F^2),

chosen so that trajectories are deterministic and reproducible and the
per-sample phase advance of any coherence stays well below pi (which
keeps phase unwrapping unambiguous). After each step the state is
re-Hermitized as (rho + rho^dag)/2; positivity is asserted upstream, not
enforced, so integrator bugs surface instead of being masked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .lindblad import Channel, dissipator_apply
from .linalg import as_complex_matrix, commutator
from .register import MAX_DYNAMICS_QUBITS, BasisState

__all__ = [
    "Trajectory",
    "FitResult",
    "MAGNITUDE_FLOOR",
    "stability_step_bound",
    "required_steps",
    "evolve",
    "fit_decay_rate",
    "write_trajectory_csv",
]

STEP_SAFETY = 0.05
MAGNITUDE_FLOOR = 1e-8
TRACE_DRIFT_LIMIT = 1e-6
HERMITICITY_DRIFT_LIMIT = 1e-8


@dataclass
class Trajectory:
    """Time grid plus one density-matrix snapshot per grid point."""

    times: np.ndarray
    snapshots: np.ndarray

    @property
    def dim(self) -> int:
        return self.snapshots.shape[1]

    def element(self, i, j) -> np.ndarray:
        """The coherence rho_ij sampled over the whole grid."""
        return self.snapshots[:, _index_of(i), _index_of(j)]


@dataclass(frozen=True)
class FitResult:
    """Exponential decay fit of one coherence element.

    gamma_hat: decay rate, minus the slope of ln|rho_ij| vs t.
    omega_hat: angular frequency, slope of the unwrapped phase vs t.
    residual: RMS of the log-magnitude fit residuals.
    n_points: samples above the magnitude floor used for the fit.
    """

    gamma_hat: float
    omega_hat: float
    residual: float
    n_points: int

    def __post_init__(self) -> None:
        if self.residual < 0 or self.n_points < 2:
            raise ValueError("invalid fit: residual must be >= 0 and n_points >= 2")


def _index_of(state) -> int:
    if isinstance(state, BasisState):
        return state.index
    return int(state)


def stability_step_bound(h, channels: Sequence[Channel]) -> float:
    """Largest admissible RK4 step for the given generators; inf when both
    the Hamiltonian and the channel list are trivial."""
    scale = 0.0
    if h is not None:
        scale = float(np.linalg.norm(as_complex_matrix(h)))
    channel_scale = sum(ch.gamma * float(np.linalg.norm(ch.operator)) ** 2 for ch in channels)
    scale = max(scale, channel_scale)
    if scale <= 0.0:
        return math.inf
    return STEP_SAFETY / scale


def required_steps(h, channels: Sequence[Channel], t_max: float) -> int:
    """Minimal step count satisfying the stability bound over [0, t_max]."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    bound = stability_step_bound(h, channels)
    if math.isinf(bound):
        return 1
    return max(1, math.ceil(t_max / bound - 1e-12))


def evolve(h, channels: Sequence[Channel], rho0, t_max: float, steps: int) -> Trajectory:
    """Integrate d(rho)/dt = -i[H, rho] + D(rho) with fixed-step RK4.

    Parameters
    ----------
    h : square complex matrix or None
        Hamiltonian (hbar = 1); None means free of coherent dynamics.
    channels : sequence of Channel
        Lindblad channels; may be empty.
    rho0 : square complex matrix
        Initial density matrix.
    t_max, steps : float, int
        Integration horizon and number of equal steps; ``t_max/steps``
        must satisfy the stability bound or a ValueError names the
        required step count.

    Returns
    -------
    Trajectory with ``steps + 1`` snapshots, including t = 0.
    """
    rho0 = as_complex_matrix(rho0)
    if rho0.shape[0] > 2**MAX_DYNAMICS_QUBITS:
        raise ValueError(
            f"integration capped at {MAX_DYNAMICS_QUBITS} qubits "
            f"(dim {2**MAX_DYNAMICS_QUBITS}), got dim {rho0.shape[0]}"
        )
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    hm = None if h is None else as_complex_matrix(h)
    if hm is not None and hm.shape != rho0.shape:
        raise ValueError("Hamiltonian dimension does not match the state")
    for m, ch in enumerate(channels):
        if ch.operator.shape != rho0.shape:
            raise ValueError(f"channel {m} dimension does not match the state")

    dt = t_max / steps
    bound = stability_step_bound(hm, channels)
    if dt > bound * (1 + 1e-12):
        need = required_steps(hm, channels, t_max)
        raise ValueError(
            f"step size {dt:.3e} violates the stability bound {bound:.3e}; "
            f"use at least {need} steps"
        )

    # Pre-assemble the dissipator pieces so the RK4 stages only multiply.
    ops = [(ch.gamma, ch.operator, ch.operator.conj().T) for ch in channels]
    adas = [ad @ a for _, a, ad in ops]

    def f(rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho) if hm is None else -1j * (hm @ rho - rho @ hm)
        for (g, a, ad), ada in zip(ops, adas):
            out += 0.5 * g * (2.0 * (a @ rho @ ad) - ada @ rho - rho @ ada)
        return out

    times = np.linspace(0.0, t_max, steps + 1)
    snapshots = np.empty((steps + 1,) + rho0.shape, dtype=complex)
    rho = rho0.copy()
    snapshots[0] = rho
    for step in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * dt * k1)
        k3 = f(rho + 0.5 * dt * k2)
        k4 = f(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        t = times[step + 1]
        herm_drift = float(np.max(np.abs(rho - rho.conj().T)))
        if herm_drift > HERMITICITY_DRIFT_LIMIT:
            raise RuntimeError(f"Hermiticity drift {herm_drift:.3e} at t = {t:.6g}")
        rho = 0.5 * (rho + rho.conj().T)
        trace_drift = abs(float(np.trace(rho).real) - 1.0)
        if trace_drift > TRACE_DRIFT_LIMIT:
            raise RuntimeError(f"trace drift {trace_drift:.3e} at t = {t:.6g}")
        snapshots[step + 1] = rho
    return Trajectory(times, snapshots)


def fit_decay_rate(traj: Trajectory, i, j) -> FitResult:
    """Least-squares estimate of the decay rate and rotation frequency of
    one coherence element.

    Only samples with |rho_ij| above ``MAGNITUDE_FLOOR`` enter the fit
    (the surviving prefix of the trajectory); the phase is unwrapped by
    nearest-multiple-of-2*pi continuation before its slope is taken.
    """
    values = traj.element(i, j)
    mags = np.abs(values)
    if mags[0] < MAGNITUDE_FLOOR:
        raise ValueError(
            f"no signal: initial |rho_ij| = {mags[0]:.3e} is below {MAGNITUDE_FLOOR}"
        )
    above = mags > MAGNITUDE_FLOOR
    cutoff = int(np.argmin(above)) if not above.all() else len(values)
    if cutoff < 2:
        raise ValueError(f"only {cutoff} usable samples above the magnitude floor")
    ts = traj.times[:cutoff]
    vals = values[:cutoff]

    log_mags = np.log(np.abs(vals))
    slope, intercept = np.polyfit(ts, log_mags, 1)
    residual = float(np.sqrt(np.mean((log_mags - (slope * ts + intercept)) ** 2)))

    phases = np.unwrap(np.angle(vals))
    omega, _ = np.polyfit(ts, phases, 1)

    return FitResult(
        gamma_hat=float(-slope),
        omega_hat=float(omega),
        residual=residual,
        n_points=int(cutoff),
    )


def write_trajectory_csv(traj: Trajectory, pairs: Sequence[tuple], out: IO[str]) -> None:
    """Write tracked coherence elements as CSV.

    One row per time sample; per pair (i, j) the columns re_<i>_<j>,
    im_<i>_<j>, abs_<i>_<j> labeled by u/d bitstrings, values with 12
    significant digits.
    """
    n = int(round(math.log2(traj.dim)))
    columns = []
    for a, b in pairs:
        ia, ib = _index_of(a), _index_of(b)
        la = str(a) if isinstance(a, BasisState) else str(BasisState.from_index(ia, n))
        lb = str(b) if isinstance(b, BasisState) else str(BasisState.from_index(ib, n))
        columns.append((ia, ib, la, lb))
    header = ["t"]
    for _, _, la, lb in columns:
        header += [f"re_{la}_{lb}", f"im_{la}_{lb}", f"abs_{la}_{lb}"]
    out.write(",".join(header) + "\n")
    for k, t in enumerate(traj.times):
        row = [f"{t:.11e}"]
        for ia, ib, _, _ in columns:
            v = traj.snapshots[k, ia, ib]
            row += [f"{v.real:.11e}", f"{v.imag:.11e}", f"{abs(v):.11e}"]
        out.write(",".join(row) + "\n")

import io

import numpy as np
import pytest

from dephaser.dynamics import (
    MAGNITUDE_FLOOR,
    Trajectory,
    evolve,
    fit_decay_rate,
    required_steps,
    stability_step_bound,
    write_trajectory_csv,
)
from dephaser.lindblad import Channel, DiagonalChannel, HamiltonianSpec, analytic_rates
from dephaser.register import BasisState, bell_state, density_from_pure

UP_PROJECTOR = np.diag([1.0, 0.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)
EXAMPLE2_OP = np.diag([1.0, 0.0, 0.0, -1.0]).astype(complex)


def synthetic_trajectory(rate: complex, rho0_01: complex, t_max: float, samples: int) -> Trajectory:
    times = np.linspace(0.0, t_max, samples)
    snapshots = np.zeros((samples, 2, 2), dtype=complex)
    values = rho0_01 * np.exp(rate * times)
    snapshots[:, 0, 0] = 0.5
    snapshots[:, 1, 1] = 0.5
    snapshots[:, 0, 1] = values
    snapshots[:, 1, 0] = values.conj()
    return Trajectory(times, snapshots)


def test_stability_bound_and_required_steps():
    ch = [Channel(1.0, UP_PROJECTOR)]
    assert stability_step_bound(None, ch) == pytest.approx(0.05)
    assert required_steps(None, ch, 1.0) == 20
    assert stability_step_bound(None, []) == np.inf
    assert required_steps(None, [], 5.0) == 1
    with pytest.raises(ValueError):
        required_steps(None, ch, 0.0)


def test_evolve_rejects_too_few_steps():
    ch = [Channel(1.0, UP_PROJECTOR)]
    with pytest.raises(ValueError, match="at least 20 steps"):
        evolve(None, ch, PLUS, 1.0, 10)


def test_evolve_register_cap():
    dim = 2**7
    rho = np.eye(dim, dtype=complex) / dim
    with pytest.raises(ValueError, match="capped"):
        evolve(None, [], rho, 1.0, 1)


def test_stationary_without_generators():
    traj = evolve(None, [], PLUS, 1.0, 10)
    assert np.abs(traj.snapshots - PLUS[None]).max() == 0
    traj = evolve(np.zeros((2, 2)), [], PLUS, 1.0, 10)
    assert np.abs(traj.snapshots - PLUS[None]).max() == 0


def test_single_qubit_dephasing_value():
    # Gamma_{01} = 1/2, so |rho_01(1)| = 0.5 exp(-1/2)
    ch = [Channel(1.0, UP_PROJECTOR)]
    traj = evolve(None, ch, PLUS, 1.0, required_steps(None, ch, 1.0))
    assert abs(traj.element(0, 1)[-1]) == pytest.approx(0.3032653298563167, abs=1e-6)


def test_decoherence_free_state_is_stationary():
    rho0 = density_from_pure(bell_state("psi_plus"))
    ch = [Channel(1.0, EXAMPLE2_OP)]
    traj = evolve(None, ch, rho0, 2.0, 200)
    assert np.abs(traj.snapshots - rho0[None]).max() <= 1e-12


def test_unitary_rotation_keeps_magnitudes():
    h = np.diag([1.5, 0.0]).astype(complex)
    traj = evolve(h, [], PLUS, 1.0, required_steps(h, [], 1.0))
    diag = np.einsum("tii->ti", traj.snapshots).real
    assert np.abs(diag - 0.5).max() <= 1e-10
    assert np.abs(np.abs(traj.element(0, 1)) - 0.5).max() <= 1e-10


def test_trajectory_trace_and_hermiticity_invariants():
    rng = np.random.default_rng(14)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    rho0 = np.outer(psi, psi.conj())
    ch = [Channel(0.8, EXAMPLE2_OP), Channel(0.3, np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex))]
    h = np.diag([0.4, -0.2, 0.1, 0.0]).astype(complex)
    traj = evolve(h, ch, rho0, 1.0, required_steps(h, ch, 1.0))
    traces = np.einsum("tii->t", traj.snapshots)
    assert np.abs(traces - 1.0).max() <= 1e-6
    herm = np.abs(traj.snapshots - traj.snapshots.conj().transpose(0, 2, 1)).max()
    assert herm <= 1e-8


def test_diagonals_constant_for_diagonal_generators():
    rng = np.random.default_rng(15)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    rho0 = np.outer(psi, psi.conj())
    ch = [Channel(1.0, EXAMPLE2_OP)]
    h = np.diag([1.0, 0.5, -0.25, 0.0]).astype(complex)
    traj = evolve(h, ch, rho0, 1.0, required_steps(h, ch, 1.0))
    diag = np.einsum("tii->ti", traj.snapshots).real
    assert np.abs(diag - diag[0]).max() <= 1e-8


def test_fit_constant_magnitude():
    traj = synthetic_trajectory(0.0, 0.5, 1.0, 50)
    fit = fit_decay_rate(traj, 0, 1)
    assert abs(fit.gamma_hat) <= 1e-9
    assert abs(fit.omega_hat) <= 1e-9
    assert fit.n_points == 50


def test_fit_exact_exponential():
    traj = synthetic_trajectory(3j - 2.0, 0.5, 1.0, 100)
    fit = fit_decay_rate(traj, BasisState((0,)), BasisState((1,)))
    assert fit.gamma_hat == pytest.approx(2.0, abs=1e-9)
    assert fit.omega_hat == pytest.approx(3.0, abs=1e-9)
    assert fit.residual <= 1e-12


def test_fit_respects_magnitude_floor():
    # decays to ~5e-10 by t=1, so the tail must be dropped
    traj = synthetic_trajectory(-20.0, 0.5, 1.0, 101)
    fit = fit_decay_rate(traj, 0, 1)
    assert fit.n_points < 101
    assert fit.gamma_hat == pytest.approx(20.0, rel=1e-6)


def test_fit_error_cases():
    traj = synthetic_trajectory(0.0, MAGNITUDE_FLOOR / 10, 1.0, 10)
    with pytest.raises(ValueError, match="no signal"):
        fit_decay_rate(traj, 0, 1)
    steep = synthetic_trajectory(-100.0, 0.5, 1.0, 11)  # only t=0 survives
    with pytest.raises(ValueError, match="usable samples"):
        fit_decay_rate(steep, 0, 1)


def test_fit_from_evolved_trajectory():
    ch = [Channel(1.0, UP_PROJECTOR)]
    traj = evolve(None, ch, PLUS, 1.0, required_steps(None, ch, 1.0))
    fit = fit_decay_rate(traj, 0, 1)
    assert fit.gamma_hat == pytest.approx(0.5, abs=1e-3)


def test_fit_matches_rate_table_end_to_end():
    rng = np.random.default_rng(16)
    diag = [
        DiagonalChannel(float(rng.uniform(0.2, 1.0)), rng.random(4) + 1j * rng.random(4))
        for _ in range(2)
    ]
    energies = rng.uniform(-1, 1, size=4)
    h = HamiltonianSpec(energies)
    table = analytic_rates(h, diag)
    channels = [c.to_channel() for c in diag]
    psi = np.full(4, 0.5, dtype=complex)
    rho0 = np.outer(psi, psi.conj())
    steps = required_steps(h.matrix, channels, 1.0)
    traj = evolve(h.matrix, channels, rho0, 1.0, steps)
    for i, j in [(0, 1), (0, 3), (1, 2), (2, 3)]:
        fit = fit_decay_rate(traj, i, j)
        gamma = table.gamma_ij[i, j]
        omega = table.omega_ij[i, j]
        assert abs(fit.gamma_hat - gamma) <= max(1e-3, 1e-3 * gamma)
        assert abs(fit.omega_hat - omega) <= max(1e-3, 1e-3 * abs(omega))


def test_rk4_convergence_order():
    ch = [Channel(1.0, UP_PROJECTOR)]
    h = np.diag([2.0, 0.0]).astype(complex)
    table = analytic_rates(HamiltonianSpec([2.0, 0.0]), [DiagonalChannel(1.0, [1.0, 0.0])])

    def max_error(steps: int) -> float:
        traj = evolve(h, ch, PLUS, 1.0, steps)
        exact = np.array(
            [0.5 * np.exp((1j * table.omega_ij[0, 1] - table.gamma_ij[0, 1]) * t) for t in traj.times]
        )
        return float(np.abs(traj.element(0, 1) - exact).max())

    base = required_steps(h, ch, 1.0)
    errors = [max_error(base), max_error(2 * base), max_error(4 * base)]
    orders = [np.log2(a / b) for a, b in zip(errors, errors[1:])]
    assert min(orders) >= 3.5


def test_trajectory_csv_format():
    traj = synthetic_trajectory(-2.0, 0.5, 1.0, 3)
    buf = io.StringIO()
    write_trajectory_csv(traj, [(BasisState((0,)), BasisState((1,)))], buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "t,re_u_d,im_u_d,abs_u_d"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == pytest.approx(0.5)
    # 12 significant digits: d.dddddddddddE+xx
    assert len(first[1].split("e")[0].replace("-", "").replace(".", "")) == 12
    mid = lines[2].split(",")
    assert float(mid[3]) == pytest.approx(0.5 * np.exp(-2 * 0.5), rel=1e-10)

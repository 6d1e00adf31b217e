"""Command-line interface: scenario ingestion, command dispatch, and
report emission.

Verbs: rates, evolve, bound, verify, presets. Scenario files are JSON,
time series are CSV, reports are JSON printed to stdout and optionally
written under --out. Exit codes: 0 success, 2 validation error, 3
theorem violation (reserved; should not occur on a correct build).

The environment variable DEPHASER_TOL overrides the relative rate
tolerance used for tightness and consistency decisions.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile

from . import __version__
from .bounds import (
    TheoremViolation,
    audit_chain_bound,
    audit_elementwise_rates,
    audit_population_preservation,
    chain_bound,
    chain_equality_condition,
    check_population_preserving,
    ghz_bound,
)
from .dynamics import evolve, fit_decay_rate, required_steps, write_trajectory_csv
from .lindblad import analytic_rates, diagonal_channels
from .linalg import DEFAULT_TOL, Tolerances
from .register import BasisState, ghz_chain, hamming_path
from .presets import NAMED_OPERATORS, PRESETS
from .scenario import Report, Scenario, fit_to_dict, serialize_rate_table

DEFAULT_SEED = 20120601
FIT_TOLERANCE = 1e-3


def _tolerances_from_env() -> Tolerances:
    raw = os.environ.get("DEPHASER_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        rtol = float(raw)
    except ValueError:
        raise ValueError(f"DEPHASER_TOL must be a number, got {raw!r}")
    return Tolerances(rtol_rate=rtol)


def _write_text(out_dir: str, name: str, content: str) -> str:
    """Atomic per-file write: temp file in the target dir, then rename."""
    os.makedirs(out_dir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(content)
        path = os.path.join(out_dir, name)
        os.replace(tmp, path)
        return path
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(payload: dict, out_dir: str | None, name: str) -> None:
    text = json.dumps(payload, indent=2)
    print(text)
    if out_dir:
        _write_text(out_dir, name, text + "\n")


def _rate_table_csv(table, n_qubits: int) -> str:
    lines = ["i,j,gamma,delta,omega"]
    labels = [str(BasisState.from_index(i, n_qubits)) for i in range(table.dim)]
    for i in range(table.dim):
        for j in range(table.dim):
            lines.append(
                f"{labels[i]},{labels[j]},{table.gamma_ij[i, j]:.12g},"
                f"{table.delta_ij[i, j]:.12g},{table.omega_ij[i, j]:.12g}"
            )
    return "\n".join(lines) + "\n"


def cmd_rates(args, tol: Tolerances) -> int:
    scenario = Scenario.from_json(args.scenario)
    h = scenario.hamiltonian()
    channels = scenario.channels()
    preservation = check_population_preserving(h, channels, tol)
    if not preservation.verdict:
        _emit({"preservation": preservation.to_dict()}, args.out, "rates.json")
        print("refused: the scenario is not population preserving, "
              "so the elementwise rate formulas do not apply", file=sys.stderr)
        return 2
    table = analytic_rates(scenario.hamiltonian_spec(tol), diagonal_channels(channels, tol))
    payload = {
        "n_qubits": scenario.n_qubits,
        "preservation": preservation.to_dict(),
        "rate_table": serialize_rate_table(table, scenario.n_qubits),
    }
    _emit(payload, args.out, "rates.json")
    if args.out:
        _write_text(args.out, "rates.csv", _rate_table_csv(table, scenario.n_qubits))
    return 0


def cmd_evolve(args, tol: Tolerances) -> int:
    scenario = Scenario.from_json(args.scenario)
    h = scenario.hamiltonian()
    channels = scenario.channels()
    rho0 = scenario.initial_density(tol)

    t_max = args.tmax if args.tmax is not None else scenario.t_max
    if t_max is None:
        raise ValueError("t_max is required (scenario field t_max or flag --tmax)")
    steps = args.steps if args.steps is not None else scenario.steps
    if steps is None:
        steps = required_steps(h, channels, t_max)

    traj = evolve(h, channels, rho0, t_max, steps)
    pairs = scenario.tracked_pairs()

    preservation = check_population_preserving(h, channels, tol)
    table = None
    if preservation.verdict:
        table = analytic_rates(scenario.hamiltonian_spec(tol), diagonal_channels(channels, tol))

    report = Report(preservation=preservation.to_dict(), fit_tolerance=FIT_TOLERANCE)
    for a, b in pairs:
        fit = fit_decay_rate(traj, a, b)
        entry = fit_to_dict(fit)
        if table is not None:
            entry["analytic_gamma"] = float(table.gamma_ij[a.index, b.index])
            entry["analytic_omega"] = float(table.omega_ij[a.index, b.index])
            entry["gamma_error"] = abs(fit.gamma_hat - entry["analytic_gamma"])
            entry["omega_error"] = abs(fit.omega_hat - entry["analytic_omega"])
        report.fits[f"{a}_{b}"] = entry

    payload = {"t_max": t_max, "steps": steps, **report.to_dict()}
    _emit(payload, args.out, "fits.json")
    if args.out:
        buf = io.StringIO()
        write_trajectory_csv(traj, pairs, buf)
        _write_text(args.out, "trajectory.csv", buf.getvalue())
    return 0


def cmd_bound(args, tol: Tolerances) -> int:
    scenario = Scenario.from_json(args.scenario)
    channels = diagonal_channels(scenario.channels(), tol)
    table = analytic_rates(scenario.hamiltonian_spec(tol), channels)
    if args.ghz:
        path = ghz_chain(scenario.n_qubits)
        report = ghz_bound(table, scenario.n_qubits, tol)
    elif args.pair:
        left, right = (BasisState.from_string(s) for s in args.pair.split(","))
        if left.n != scenario.n_qubits or right.n != scenario.n_qubits:
            raise ValueError("--pair labels must match the scenario qubit count")
        path = hamming_path(left, right)
        report = chain_bound(table, path, tol)
    else:
        raise ValueError("bound needs --ghz or --pair <bits,bits>")
    payload = {
        "path": [str(s) for s in path],
        "bound": report.to_dict(),
        "equality_condition": chain_equality_condition(channels, path, tol),
    }
    _emit(payload, args.out, "bound.json")
    return 0


def cmd_verify(args, tol: Tolerances) -> int:
    if args.trials == 0:
        _emit({}, args.out, "verify.json")
        return 0
    rates_audit = audit_elementwise_rates(
        n_trials=args.trials, rng_seed=args.seed, max_qubits=min(args.n_qubits, 4)
    )
    preservation_audit = audit_population_preservation(
        n_trials=max(1, args.trials // 10), rng_seed=args.seed + 1
    )
    chain_audit = audit_chain_bound(
        n_qubits=args.n_qubits,
        n_channels=4,
        n_trials=args.trials,
        rng_seed=args.seed + 2,
        tol=tol,
    )
    payload = {
        "seed": args.seed,
        "elementwise_rates": rates_audit.to_dict(),
        "population_preservation": preservation_audit.to_dict(),
        "chain_bound": chain_audit.to_dict(),
    }
    _emit(payload, args.out, "verify.json")
    return 0


def cmd_presets(args, tol: Tolerances) -> int:
    for name in sorted(PRESETS):
        print(f"{name}: {PRESETS[name]}")
    print("operator names:", ", ".join(NAMED_OPERATORS))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dephaser",
        description="Phase damping of small qubit registers: analytic rates, "
        "trajectories, and entangled-state rate bounds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True, help="path to a scenario JSON file")
        p.add_argument("--out", default=None, help="directory for report files")

    p_rates = sub.add_parser("rates", help="analytic decay/rotation rate table")
    add_common(p_rates)
    p_rates.set_defaults(func=cmd_rates)

    p_evolve = sub.add_parser("evolve", help="integrate the master equation and fit rates")
    add_common(p_evolve)
    p_evolve.add_argument("--tmax", type=float, default=None, help="override scenario t_max")
    p_evolve.add_argument("--steps", type=int, default=None, help="override scenario steps")
    p_evolve.set_defaults(func=cmd_evolve)

    p_bound = sub.add_parser("bound", help="chain inequality along a spin-flip path")
    add_common(p_bound)
    p_bound.add_argument("--ghz", action="store_true", help="use the GHZ chain")
    p_bound.add_argument("--pair", default=None, help="endpoint labels, e.g. uu,dd")
    p_bound.set_defaults(func=cmd_bound)

    p_verify = sub.add_parser("verify", help="randomized audits of the rate formulas and bounds")
    add_common(p_verify, scenario=False)
    p_verify.add_argument("--trials", type=int, default=1000)
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_verify.add_argument("--n-qubits", type=int, default=4)
    p_verify.set_defaults(func=cmd_verify)

    p_presets = sub.add_parser("presets", help="list scenario presets and operator names")
    p_presets.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _tolerances_from_env()
        return args.func(args, tol)
    except TheoremViolation as exc:
        print(f"theorem violation: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError, json.JSONDecodeError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

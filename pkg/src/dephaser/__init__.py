"""Phase damping of small qubit registers.

A numpy library for simulating Lindblad-form pure dephasing, computing
the analytic per-element decay rates and frequency shifts of diagonal
channels, verifying population preservation, and evaluating the chain
inequality that bounds entangled-state dephasing rates by single-qubit
ones.
"""

__version__ = "0.1.0"

from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    commutator,
    dagger,
    frobenius_distance,
    is_diagonal,
    kron,
    matmul,
    max_abs_diff,
    trace,
)
from .register import (
    BasisState,
    SpinFlipPath,
    bell_state,
    density_from_pure,
    ghz_chain,
    ghz_state,
    hamming_path,
    product_state,
    validate_density,
)
from .lindblad import (
    Channel,
    DiagonalChannel,
    HamiltonianSpec,
    RateTable,
    analytic_rates,
    coherence_closed_form,
    diagonal_channels,
    dissipator_apply,
    dissipator_element_closed_form,
    pair_rates,
    rhs,
)
from .dynamics import (
    FitResult,
    Trajectory,
    evolve,
    fit_decay_rate,
    required_steps,
    stability_step_bound,
    write_trajectory_csv,
)
from .bounds import (
    BoundReport,
    PreservationReport,
    TheoremViolation,
    audit_chain_bound,
    audit_elementwise_rates,
    audit_population_preservation,
    best_hamming_bound,
    chain_bound,
    chain_equality_condition,
    check_population_preserving,
    ghz_bound,
)
from .presets import PRESETS, PresetSpec, build_preset, named_operator, up_projector
from .scenario import Report, Scenario

__all__ = [
    "DEFAULT_TOL",
    "Tolerances",
    "commutator",
    "dagger",
    "frobenius_distance",
    "is_diagonal",
    "kron",
    "matmul",
    "max_abs_diff",
    "trace",
    "BasisState",
    "SpinFlipPath",
    "bell_state",
    "density_from_pure",
    "ghz_chain",
    "ghz_state",
    "hamming_path",
    "product_state",
    "validate_density",
    "Channel",
    "DiagonalChannel",
    "HamiltonianSpec",
    "RateTable",
    "analytic_rates",
    "coherence_closed_form",
    "diagonal_channels",
    "dissipator_apply",
    "dissipator_element_closed_form",
    "pair_rates",
    "rhs",
    "FitResult",
    "Trajectory",
    "evolve",
    "fit_decay_rate",
    "required_steps",
    "stability_step_bound",
    "write_trajectory_csv",
    "BoundReport",
    "PreservationReport",
    "TheoremViolation",
    "audit_chain_bound",
    "audit_elementwise_rates",
    "audit_population_preservation",
    "best_hamming_bound",
    "chain_bound",
    "chain_equality_condition",
    "check_population_preserving",
    "ghz_bound",
    "PRESETS",
    "PresetSpec",
    "build_preset",
    "named_operator",
    "up_projector",
    "Report",
    "Scenario",
]

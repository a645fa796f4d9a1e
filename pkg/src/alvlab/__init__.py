"""Entanglement-driven evolutionary game dynamics.

Quantum two-player payoffs feed an anti-symmetric Lotka-Volterra equation
whose stable vertex switches from all-defect to all-quantum at a critical
entanglement angle; this package computes the payoffs from the circuit,
integrates the mean-field dynamics, classifies fixed points, sweeps the
phase diagram, and cross-checks everything against an exact small-N master
equation and agent-based Monte Carlo on networks.
"""

from ._kernels import BACKEND
from .agentsim import (
    ExperimentResult,
    ScanResult,
    SimParams,
    SimState,
    bifurcation_scan,
    init_state,
    mc_step,
    node_payoff,
    run_experiment,
)
from .dynamics import (
    FixedPointReport,
    IntegrationError,
    MatrixDynamics,
    TrajectoryResult,
    alv_rhs,
    classify_fixed_points,
    fermi_rate,
    growth_matrix,
    integrate,
    net_rate_matrix,
    vertex_jacobian_eigenvalues,
)
from .master import (
    DistributionTrajectory,
    ProbabilityLeakError,
    build_generator,
    configurational_rate,
    enumerate_configurations,
    evolve_distribution,
    mean_occupation,
)
from .networks import (
    Network,
    build_erdos_renyi,
    build_small_world,
    build_square_lattice,
    read_edge_list,
    write_edge_list,
)
from .phase import (
    CriticalGammas,
    GameFamily,
    PhaseGrid,
    critical_condition_gap,
    critical_gammas,
    effective_payoff_matrix,
    meanfield_dynamics,
    meanfield_payoffs,
    phase_boundary_r,
    sweep_phase_diagram,
)
from .quantum import (
    GAMMA_MAX,
    PayoffTable,
    Strategy,
    entangler,
    final_state,
    outcome_probs,
    pairwise_payoff,
    payoff_matrix_from_circuit,
    strategy_unitary,
)
from .rng import Xoshiro256StarStar, derive_seed

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CriticalGammas",
    "DistributionTrajectory",
    "ExperimentResult",
    "FixedPointReport",
    "GAMMA_MAX",
    "GameFamily",
    "IntegrationError",
    "MatrixDynamics",
    "Network",
    "PayoffTable",
    "PhaseGrid",
    "ProbabilityLeakError",
    "ScanResult",
    "SimParams",
    "SimState",
    "Strategy",
    "TrajectoryResult",
    "Xoshiro256StarStar",
    "alv_rhs",
    "bifurcation_scan",
    "build_erdos_renyi",
    "build_generator",
    "build_small_world",
    "build_square_lattice",
    "classify_fixed_points",
    "configurational_rate",
    "critical_condition_gap",
    "critical_gammas",
    "derive_seed",
    "effective_payoff_matrix",
    "entangler",
    "enumerate_configurations",
    "evolve_distribution",
    "fermi_rate",
    "final_state",
    "growth_matrix",
    "init_state",
    "integrate",
    "mc_step",
    "mean_occupation",
    "meanfield_dynamics",
    "meanfield_payoffs",
    "net_rate_matrix",
    "node_payoff",
    "outcome_probs",
    "pairwise_payoff",
    "payoff_matrix_from_circuit",
    "phase_boundary_r",
    "read_edge_list",
    "run_experiment",
    "strategy_unitary",
    "sweep_phase_diagram",
    "vertex_jacobian_eigenvalues",
    "write_edge_list",
]

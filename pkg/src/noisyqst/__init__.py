"""Measurement-set design and evaluation for two-qubit tomography with noisy entangling gates."""

from .core import (
    bloch_gram_volume,
    gram_volume,
    haar_random_unitary,
    random_density,
    state_fidelity,
    traceless_part,
)
from .gates import (
    CanonicalParams,
    HeisenbergTimes,
    MeasurementParams,
    QuorumParams,
    SingleQubitParams,
    canonical_two_qubit,
    entangling_time,
    heisenberg_two_qubit,
    ising_two_qubit,
    measurement_unitary,
    nine_pauli_bases,
    single_qubit_gate,
    standard_mub_params,
)
from .noise import (
    NoiseModel,
    Povm,
    apply_depolarizing,
    apply_ou_heisenberg,
    apply_ou_ising,
    average_gate_fidelity,
    depolarizing_q,
    effective_povm,
    ideal_povm,
    kraus_depolarizing,
    kraus_ou_heisenberg,
    kraus_ou_ising,
    ou_gammas_heisenberg,
    ou_gammas_ising,
)
from .optimize import (
    OptimizationResult,
    OptimizerOptions,
    diverse_starts,
    optimize_quorum,
    powell_minimize,
    quorum_distance,
    simulated_annealing,
)
from .quality import (
    QualityReport,
    analytic_alpha_max,
    analytic_beta_max,
    estimate_log_coefficient,
    geometric_quality,
    noisy_quality,
    quality_report,
    single_qubit_optimal_angle,
    single_qubit_quality,
)
from .tomography import (
    ExperimentReport,
    Scheme,
    ml_reconstruct,
    run_experiment,
    sample_measurement,
)

__version__ = "0.1.0"

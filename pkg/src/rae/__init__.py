"""Robust amplitude estimation on a density-matrix simulator.

Parity outcomes from noisy Grover-layered circuits are turned into estimates
of a Pauli expectation value by grid-based maximum likelihood over the
expectation value and a per-layer decay rate.
"""

from .circuits import (
    Circuit,
    EnhancedSamplingSpec,
    build_ansatz,
    build_enhanced_circuit,
    build_grover_iterate,
    depth_units,
)
from .inference import (
    GridSpec,
    OutcomeDataset,
    PosteriorGrid,
    bayes_update,
    mle_estimate,
    standard_sampling_estimate,
    trial_statistics,
)
from .likelihood import LikelihoodParams, chebyshev_t, fisher_info_per_time, likelihood
from .noise import NoiseModel, outcome_probability, run_noisy
from .scheduler import Schedule, equal_runtime_budget, select_layers
from .sim import DensityMatrix, Gate, GateKind, PauliString, apply_gate, apply_global_depolarizing, expectation, measure_parity

__version__ = "0.1.0"

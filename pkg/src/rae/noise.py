"""Noise models and noisy execution of enhanced-sampling circuits."""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import exp, isfinite

from .circuits import (
    Circuit,
    EnhancedSamplingSpec,
    build_ansatz,
    build_enhanced_circuit,
    build_grover_iterate,
)
from .likelihood import chebyshev_t
from .sim import DensityMatrix, Gate, GateKind, apply_gates, apply_global_depolarizing, expectation


@dataclass(frozen=True)
class NoiseModel:
    """Exponential signal decay per Grover layer plus an optional Rz over-rotation.

    With ``prep_half_layer`` the prepared ansatz state also loses a factor
    ``exp(-lam / 2)``, which gives the ``L + 1/2`` exponent overall.
    """

    lam: float = 0.0
    prep_half_layer: bool = True
    coherent_epsilon: float = 0.0

    def __post_init__(self):
        if not isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lambda must be a finite nonnegative number, got {self.lam}")
        if not isfinite(self.coherent_epsilon):
            raise ValueError("coherent_epsilon must be finite")

    @property
    def is_coherent(self) -> bool:
        return self.coherent_epsilon != 0.0

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "prep_half_layer": self.prep_half_layer,
            "coherent_epsilon": self.coherent_epsilon,
        }


NOISELESS = NoiseModel(0.0, True, 0.0)


def _over_rotate(circuit: Circuit, epsilon: float) -> tuple[Gate, ...]:
    if epsilon == 0.0:
        return circuit.gates
    return tuple(
        replace(g, angle=g.angle + epsilon) if g.kind is GateKind.RZ else g for g in circuit.gates
    )


def run_noisy(circuit: Circuit, spec: EnhancedSamplingSpec, model: NoiseModel) -> DensityMatrix:
    """Execute ``circuit`` (which must be ``build_enhanced_circuit(spec)``) under ``model``."""
    expected = build_enhanced_circuit(spec)
    if circuit.n != expected.n or circuit.gates != expected.gates:
        raise ValueError("circuit was not built from the given enhanced-sampling spec")

    ansatz = build_ansatz(spec.ansatz_theta)
    state = apply_gates(DensityMatrix.zero_state(ansatz.n), _over_rotate(ansatz, model.coherent_epsilon))
    if model.prep_half_layer:
        state = apply_global_depolarizing(state, exp(-model.lam / 2))
    if spec.layers:
        iterate = _over_rotate(build_grover_iterate(ansatz, spec.observable), model.coherent_epsilon)
        layer_survival = exp(-model.lam)
        for _ in range(spec.layers):
            state = apply_gates(state, iterate)
            state = apply_global_depolarizing(state, layer_survival)
    return state


def simulate_prob_plus(spec: EnhancedSamplingSpec, model: NoiseModel) -> float:
    """P(+1) obtained from the simulated density matrix."""
    state = run_noisy(build_enhanced_circuit(spec), spec, model)
    return 0.5 * (1.0 + expectation(state, spec.observable))


def outcome_probability(model: NoiseModel, pi: float, layers: int) -> float:
    """Closed-form P(+1) for the incoherent model."""
    if model.is_coherent:
        raise ValueError("closed-form outcome probability needs coherent_epsilon = 0")
    if not -1.0 <= pi <= 1.0:
        raise ValueError(f"pi must lie in [-1, 1], got {pi}")
    exponent = layers + (0.5 if model.prep_half_layer else 0.0)
    return 0.5 * (1.0 + exp(-exponent * model.lam) * chebyshev_t(2 * layers + 1, pi))

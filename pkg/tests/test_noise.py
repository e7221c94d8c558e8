import numpy as np
import pytest
from mpmath import mp, mpf, cos, acos, exp

from rae.circuits import DEFAULT_THETA, EnhancedSamplingSpec, build_enhanced_circuit
from rae.noise import NoiseModel, outcome_probability, run_noisy, simulate_prob_plus
from rae.sim import PauliString, expectation

XX = PauliString("XX")


def eq3_oracle(pi, lam, layers):
    mp.dps = 40
    x = 2 * layers + 1
    return float((1 + exp(-(layers + mpf(1) / 2) * mpf(lam)) * cos(x * acos(mpf(pi)))) / 2)


def test_zero_noise_matches_noiseless_run():
    spec = EnhancedSamplingSpec(DEFAULT_THETA, XX, 4)
    circuit = build_enhanced_circuit(spec)
    assert run_noisy(circuit, spec, NoiseModel()).distance(circuit.run()) <= 1e-12


def test_single_layer_matches_closed_form(ansatz_pi):
    spec = EnhancedSamplingSpec(DEFAULT_THETA, XX, 1)
    p = simulate_prob_plus(spec, NoiseModel(0.08))
    assert abs(p - eq3_oracle(ansatz_pi, 0.08, 1)) <= 1e-10


@pytest.mark.parametrize("layers", [1, 3, 8])
def test_heavy_noise_mixes_completely(layers):
    spec = EnhancedSamplingSpec(DEFAULT_THETA, XX, layers)
    state = run_noisy(build_enhanced_circuit(spec), spec, NoiseModel(50.0))
    assert abs(expectation(state, XX)) <= 1e-10


def test_outcome_probability_examples():
    assert abs(outcome_probability(NoiseModel(0.0), -0.2238, 0) - 0.3881) < 1e-15
    for layers in range(6):
        assert outcome_probability(NoiseModel(0.0), 1.0, layers) == 1.0
    assert abs(outcome_probability(NoiseModel(0.08), -0.2238, 1) - eq3_oracle(-0.2238, 0.08, 1)) <= 1e-12
    with pytest.raises(ValueError):
        outcome_probability(NoiseModel(0.08), 1.1, 1)
    with pytest.raises(ValueError):
        outcome_probability(NoiseModel(0.08, coherent_epsilon=0.01), 0.2, 1)


@pytest.mark.parametrize("obs", ["XX", "YY"])
@pytest.mark.parametrize("lam", [0.0, 0.04, 0.08, 0.2])
def test_channel_realizes_closed_form(obs, lam):
    p = PauliString(obs)
    pi = expectation(build_enhanced_circuit(EnhancedSamplingSpec(DEFAULT_THETA, p, 0)).run(), p)
    model = NoiseModel(lam)
    for layers in range(11):
        spec = EnhancedSamplingSpec(DEFAULT_THETA, p, layers)
        assert abs(simulate_prob_plus(spec, model) - outcome_probability(model, pi, layers)) <= 1e-9


def test_without_prep_half_layer_exponent_is_whole_layers(ansatz_pi):
    model = NoiseModel(0.1, prep_half_layer=False)
    spec = EnhancedSamplingSpec(DEFAULT_THETA, XX, 3)
    expected = 0.5 * (1 + np.exp(-0.3) * np.cos(7 * np.arccos(ansatz_pi)))
    assert abs(simulate_prob_plus(spec, model) - expected) <= 1e-10
    assert abs(outcome_probability(model, ansatz_pi, 3) - expected) <= 1e-12


@pytest.mark.parametrize("pi", [-0.2238, 0.4, 0.9])
@pytest.mark.parametrize("layers", [0, 2, 5])
def test_decay_is_monotone(pi, layers):
    x = 2 * layers + 1
    if abs(np.cos(x * np.arccos(pi))) < 1e-6:
        pytest.skip("no signal to decay")
    gaps = [abs(outcome_probability(NoiseModel(lam), pi, layers) - 0.5) for lam in np.linspace(0, 1, 21)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_coherent_error_breaks_closed_form(ansatz_pi):
    model = NoiseModel(0.05, coherent_epsilon=0.05)
    worst = max(
        abs(simulate_prob_plus(EnhancedSamplingSpec(DEFAULT_THETA, XX, l), model)
            - outcome_probability(NoiseModel(0.05), ansatz_pi, l))
        for l in range(1, 6)
    )
    assert worst > 1e-4


def test_run_noisy_rejects_foreign_circuit():
    spec = EnhancedSamplingSpec(DEFAULT_THETA, XX, 2)
    other = build_enhanced_circuit(EnhancedSamplingSpec(DEFAULT_THETA, XX, 1))
    with pytest.raises(ValueError):
        run_noisy(other, spec, NoiseModel(0.1))


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(-0.1)
    with pytest.raises(ValueError):
        NoiseModel(0.1, coherent_epsilon=float("nan"))

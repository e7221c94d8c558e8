"""Experiment configuration.

A config file is a flat YAML mapping. Every key is optional; unknown keys are
rejected. Keys and defaults:

    observable          XX            XX or YY
    ansatz_theta        -6.0575       Rz angle of the ansatz (radians)
    lambda              0.0           per-layer decay rate of the simulated device
    prep_half_layer     true          ansatz prep also decays by exp(-lambda/2)
    coherent_epsilon    0.0           over-rotation added to every Rz (radians)
    backend             simulator     simulator | analytic
    layers              null          explicit layer list; default 0..l_max
    l_max               10
    shots_per_layer     8192
    layer_shots         null          explicit per-layer shots, aligned with layers
    M                   1000          resample size per MLE trial
    n_trials            32
    stratified          false         resample within layers instead of pooled
    pi_points           2001          grid over pi in [pi_min, pi_max]
    pi_min / pi_max     -1.0 / 1.0
    lambda_points       501           grid over lambda in [lambda_min, lambda_max]
    lambda_min / lambda_max  0.0 / 0.5
    baseline_shots      12875         standard-sampling shots in compare-runtime
    rae_layers          [1, 5, 6, 7]  RAE layers in compare-runtime; "auto" selects
                                      by Fisher rate from (pi_guess, lambda_guess)
    rae_shots           null          explicit RAE shots per layer; default equal split
                                      of the baseline depth budget
    select_k            4             layer count picked when rae_layers is auto
    pi_guess            -0.22
    lambda_guess        0.08
    rae_data            pooled        pooled | fresh (see experiments.compare_runtime)
    pool_shots_per_layer 8192
    dataset             null          existing dataset file for sweep-lmax / bias-study
    workers             1             threads for independent trials
    seed                0
    out                 null          output path; stdout when unset
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import yaml

from ..inference import GridSpec
from ..noise import NoiseModel
from ..sim import PauliString


class ConfigError(ValueError):
    pass


OBSERVABLES = {"XX": PauliString("XX"), "YY": PauliString("YY")}

# Config-file spelling -> attribute name, where they differ.
_ALIASES = {"lambda": "lam", "M": "m"}
_REVERSE = {v: k for k, v in _ALIASES.items()}
EXECUTION_KEYS = ("workers", "out")


@dataclass(frozen=True)
class ExperimentConfig:
    observable: str = "XX"
    ansatz_theta: float = -6.0575
    lam: float = 0.0
    prep_half_layer: bool = True
    coherent_epsilon: float = 0.0
    backend: str = "simulator"
    layers: tuple[int, ...] | None = None
    l_max: int = 10
    shots_per_layer: int = 8192
    layer_shots: tuple[int, ...] | None = None
    m: int = 1000
    n_trials: int = 32
    stratified: bool = False
    pi_points: int = 2001
    pi_min: float = -1.0
    pi_max: float = 1.0
    lambda_points: int = 501
    lambda_min: float = 0.0
    lambda_max: float = 0.5
    baseline_shots: int = 12875
    rae_layers: tuple[int, ...] | str = (1, 5, 6, 7)
    rae_shots: tuple[int, ...] | None = None
    select_k: int = 4
    pi_guess: float = -0.22
    lambda_guess: float = 0.08
    rae_data: str = "pooled"
    pool_shots_per_layer: int = 8192
    dataset: str | None = None
    workers: int = 1
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        for name in ("layers", "layer_shots", "rae_shots"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(int(x) for x in v))
        if not isinstance(self.rae_layers, str):
            object.__setattr__(self, "rae_layers", tuple(int(x) for x in self.rae_layers))
        self.validate()

    def validate(self) -> None:
        if self.observable not in OBSERVABLES:
            raise ConfigError(f"observable must be one of {sorted(OBSERVABLES)}, got {self.observable!r}")
        if self.backend not in ("simulator", "analytic"):
            raise ConfigError(f"backend must be simulator or analytic, got {self.backend!r}")
        if self.backend == "analytic" and self.coherent_epsilon != 0.0:
            raise ConfigError("the analytic backend cannot express coherent_epsilon != 0")
        if self.rae_data not in ("pooled", "fresh"):
            raise ConfigError(f"rae_data must be pooled or fresh, got {self.rae_data!r}")
        if isinstance(self.rae_layers, str) and self.rae_layers != "auto":
            raise ConfigError(f"rae_layers must be a list or 'auto', got {self.rae_layers!r}")
        if self.l_max < 0:
            raise ConfigError("l_max must be nonnegative")
        layers = self.layer_list
        if len(set(layers)) != len(layers) or any(l < 0 for l in layers):
            raise ConfigError(f"layers must be distinct nonnegative integers, got {list(layers)}")
        if self.layer_shots is not None and len(self.layer_shots) != len(layers):
            raise ConfigError("layer_shots must have one entry per layer")
        if any(s < 1 for s in self.shot_list + (self.rae_shots or ())):
            raise ConfigError("every layer needs at least one shot")
        for name in ("m", "n_trials", "baseline_shots", "pool_shots_per_layer", "workers", "select_k"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{_REVERSE.get(name, name)} must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        try:
            NoiseModel(self.lam, self.prep_half_layer, self.coherent_epsilon)
            self.grid
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def layer_list(self) -> tuple[int, ...]:
        return self.layers if self.layers is not None else tuple(range(self.l_max + 1))

    @property
    def shot_list(self) -> tuple[int, ...]:
        if self.layer_shots is not None:
            return self.layer_shots
        return (self.shots_per_layer,) * len(self.layer_list)

    @property
    def pauli(self) -> PauliString:
        return OBSERVABLES[self.observable]

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.lam, self.prep_half_layer, self.coherent_epsilon)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(
            self.pi_points, self.pi_min, self.pi_max, self.lambda_points, self.lambda_min, self.lambda_max
        )

    def with_overrides(self, **kw) -> ExperimentConfig:
        kw = {_ALIASES.get(k, k): v for k, v in kw.items() if v is not None}
        try:
            return replace(self, **kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[_REVERSE.get(f.name, f.name)] = list(v) if isinstance(v, tuple) else v
        return out

    def report_dict(self) -> dict:
        """Config as embedded in reports; execution-only keys are left out so
        thread count and output path never change report bytes."""
        d = self.to_dict()
        for k in EXECUTION_KEYS:
            d.pop(k)
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> ExperimentConfig:
        known = {_REVERSE.get(f.name, f.name) for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for k, v in raw.items():
            if isinstance(v, (dict, set)):
                raise ConfigError(f"config must be flat; key {k!r} holds a {type(v).__name__}")
        try:
            return cls(**{_ALIASES.get(k, k): v for k, v in raw.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None


def load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}".replace("\n", " ")) from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must hold a key-value mapping")
    return ExperimentConfig.from_dict(raw)

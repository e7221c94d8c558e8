"""Experiment drivers behind the CLI subcommands.

Every random draw comes from :func:`rae.rng.stream` keyed by the config seed
and a fixed tag (plus layer and trial indices), so outputs depend only on the
config and never on thread scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..circuits import EnhancedSamplingSpec, build_ansatz, build_enhanced_circuit, depth_units
from ..inference import (
    EstimateReport,
    OutcomeDataset,
    TrialStats,
    mle_estimate,
    posterior,
    standard_sampling_estimate,
    trial_statistics,
)
from ..noise import outcome_probability, run_noisy
from ..rng import stream
from ..scheduler import Schedule, dead_spots, equal_runtime_budget, fisher_scan, local_maxima, select_layers
from ..sim import PauliString, expectation, sample_parities
from .config import ConfigError, ExperimentConfig
from .datasets import DatasetFile
from .reference import HARDWARE_TABLE

log = logging.getLogger(__name__)


def true_expectation(cfg: ExperimentConfig) -> float:
    return expectation(build_ansatz(cfg.ansatz_theta).run(), cfg.pauli)


def draw_outcomes(cfg: ExperimentConfig, layers: int, shots: int, rng: np.random.Generator) -> np.ndarray:
    """``shots`` parity outcomes from the L-layer circuit on the configured backend."""
    if cfg.backend == "analytic":
        p = outcome_probability(cfg.noise, true_expectation(cfg), layers)
        return np.where(rng.random(shots) < p, 1, -1).astype(np.int8)
    spec = EnhancedSamplingSpec(cfg.ansatz_theta, cfg.pauli, layers)
    state = run_noisy(build_enhanced_circuit(spec), spec, cfg.noise)
    return sample_parities(state, cfg.pauli, shots, rng)


def sample(cfg: ExperimentConfig, layers=None, shots=None, tag: str = "sample") -> DatasetFile:
    layers = cfg.layer_list if layers is None else tuple(layers)
    shots = cfg.shot_list if shots is None else tuple(shots)
    data = {l: draw_outcomes(cfg, l, s, stream(cfg.seed, tag, l)) for l, s in zip(layers, shots)}
    return DatasetFile(cfg.observable, cfg.ansatz_theta, cfg.noise, cfg.backend, cfg.seed, OutcomeDataset(data))


def _run_trials(fn, n_trials: int, workers: int) -> list:
    if workers <= 1:
        return [fn(t) for t in range(n_trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_trials)))


def _load_or_sample(cfg: ExperimentConfig) -> DatasetFile:
    if cfg.dataset is None:
        return sample(cfg)
    ds = DatasetFile.read(cfg.dataset)
    if ds.observable != cfg.observable:
        raise ConfigError(f"dataset observable {ds.observable} differs from config {cfg.observable}")
    return ds


def _check_trials(cfg: ExperimentConfig) -> None:
    if cfg.n_trials < 2:
        raise ConfigError("trial statistics need n_trials >= 2")


def mle_trials(cfg: ExperimentConfig, data: OutcomeDataset, tag) -> list[tuple[float, float]]:
    if cfg.m > data.total:
        raise ConfigError(f"M={cfg.m} exceeds the {data.total} outcomes available")
    grid = cfg.grid
    return _run_trials(
        lambda t: mle_estimate(data, cfg.m, grid, stream(cfg.seed, *tag, t), stratified=cfg.stratified),
        cfg.n_trials,
        cfg.workers,
    )


@dataclass(frozen=True)
class SweepRow:
    l_max: int
    layers: tuple[int, ...]
    lambda_mean: float
    stats: TrialStats


def sweep_lmax(cfg: ExperimentConfig, ds: DatasetFile | None = None) -> list[SweepRow]:
    """MLE trials on the dataset layers up to each L_max in 1..max layer.

    L=0 data, when present, enters every row; every layer in 1..L_max must be
    present.
    """
    _check_trials(cfg)
    ds = ds or _load_or_sample(cfg)
    truth = expectation(build_ansatz(ds.theta).run(), cfg.pauli)
    top = max(ds.data.layers)
    rows = []
    for l_max in range(1, top + 1):
        missing = [l for l in range(1, l_max + 1) if l not in ds.data]
        if missing:
            raise ConfigError(f"dataset lacks layers {missing} needed for L_max={l_max}")
        layers = tuple(l for l in ds.data.layers if l <= l_max)
        trials = mle_trials(cfg, ds.data.subset(layers), ("sweep", l_max))
        rows.append(
            SweepRow(l_max, layers, float(np.mean([t[1] for t in trials])), trial_statistics([t[0] for t in trials], truth))
        )
        log.info("L_max=%d rmse=%.5f", l_max, rows[-1].stats.rmse)
    return rows


def bias_study(cfg: ExperimentConfig, ds: DatasetFile | None = None) -> list[SweepRow]:
    if cfg.backend != "simulator":
        raise ConfigError("bias-study needs the simulator backend to inject coherent error")
    if ds is not None and ds.backend != "simulator":
        raise ConfigError("bias-study needs a dataset produced by the simulator backend")
    return sweep_lmax(cfg, ds)


def rae_schedule(cfg: ExperimentConfig) -> Schedule:
    if cfg.rae_layers == "auto":
        layers = select_layers(cfg.pi_guess, cfg.lambda_guess, range(cfg.l_max + 1), cfg.select_k)
    else:
        layers = list(cfg.rae_layers)
    if cfg.rae_shots is not None:
        if len(cfg.rae_shots) != len(layers):
            raise ConfigError("rae_shots needs one entry per RAE layer")
        return Schedule(tuple(zip(layers, cfg.rae_shots)))
    try:
        return equal_runtime_budget(cfg.baseline_shots, layers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def compare_runtime(cfg: ExperimentConfig) -> dict:
    """Standard sampling against RAE at equal total circuit depth.

    The standard arm draws ``baseline_shots`` fresh L=0 outcomes per trial and
    takes the sample mean (decay ignored). The RAE arm runs the MLE with
    ``M = schedule.total_shots``: resampled from one pooled dataset of
    ``pool_shots_per_layer`` outcomes per scheduled layer (``rae_data:
    pooled``), or from the schedule's own fresh outcomes each trial with every
    outcome used once (``rae_data: fresh``).
    """
    _check_trials(cfg)
    truth = true_expectation(cfg)
    sched = rae_schedule(cfg)

    def standard_trial(t):
        outcomes = draw_outcomes(cfg, 0, cfg.baseline_shots, stream(cfg.seed, "standard", t))
        return standard_sampling_estimate(outcomes), None

    standard = EstimateReport.from_trials(
        "standard_sampling", cfg.observable, [0], cfg.baseline_shots, truth,
        _run_trials(standard_trial, cfg.n_trials, cfg.workers), cfg.seed,
    )

    m = sched.total_shots
    if cfg.rae_data == "pooled":
        pool = sample(cfg, sched.layers, [cfg.pool_shots_per_layer] * len(sched.layers), tag="rae-pool")
        rae_cfg = cfg.with_overrides(m=m)
        trials = mle_trials(rae_cfg, pool.data, ("rae",))
    else:
        def fresh_trial(t):
            data = OutcomeDataset(
                {l: draw_outcomes(cfg, l, s, stream(cfg.seed, "rae-fresh", t, l)) for l, s in sched.entries}
            )
            return posterior(data, cfg.grid).mode()

        trials = _run_trials(fresh_trial, cfg.n_trials, cfg.workers)
    rae = EstimateReport.from_trials("rae", cfg.observable, sched.layers, m, truth, trials, cfg.seed)

    s, r = standard.stats, rae.stats
    return {
        "config": cfg.report_dict(),
        "seed": cfg.seed,
        "truth": truth,
        "schedule": sched.to_text(),
        "schedule_depth_units": str(sched.total_depth_units),
        "baseline_depth_units": cfg.baseline_shots,
        "standard_sampling": standard.to_dict(),
        "rae": rae.to_dict(),
        "ratios": {
            "rmse": s.rmse / r.rmse if r.rmse else None,
            "sigma": s.sigma / r.sigma if r.sigma else None,
            "bias": abs(s.bias) / abs(r.bias) if r.bias else None,
        },
        "hardware_reference": HARDWARE_TABLE,
    }


def infer(cfg: ExperimentConfig, ds: DatasetFile) -> dict:
    _check_trials(cfg)
    truth = expectation(build_ansatz(ds.theta).run(), PauliString.parse(ds.observable))
    trials = mle_trials(cfg, ds.data, ("infer",))
    report = EstimateReport.from_trials("rae", ds.observable, ds.data.layers, cfg.m, truth, trials, cfg.seed)
    return {"config": cfg.report_dict(), "seed": cfg.seed, "report": report.to_dict()}


@dataclass(frozen=True)
class FisherRow:
    layers: int
    queries: int
    fisher_per_time: float
    depth: object
    local_max: bool
    dead_spot: bool


def fisher_table(pi: float, lam: float, l_min: int, l_max: int) -> list[FisherRow]:
    if l_max < l_min or l_min < 0:
        raise ConfigError(f"invalid layer range {l_min}..{l_max}")
    layer_range = list(range(l_min, l_max + 1))
    try:
        rates = fisher_scan(pi, lam, layer_range)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    peaks, dips = set(local_maxima(rates)), set(dead_spots(rates))
    return [
        FisherRow(l, 2 * l + 1, f, depth_units(l), i in peaks, i in dips)
        for i, (l, f) in enumerate(zip(layer_range, rates))
    ]


# CSV rendering. Headers carry units in brackets.

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


SWEEP_HEADER = [
    "l_max [layers]", "layers_used [layers]", "n_trials [count]", "mean [expectation]",
    "sigma [expectation]", "sigma_se [expectation]", "rmse [expectation]", "rmse_se [expectation]",
    "bias [expectation]", "bias_se [expectation]", "lambda_mean [1/layer]",
]


def sweep_csv(rows: list[SweepRow]) -> str:
    return _csv(
        SWEEP_HEADER,
        [
            [r.l_max, " ".join(map(str, r.layers)), r.stats.n_trials, repr(r.stats.mean), repr(r.stats.sigma),
             repr(r.stats.sigma_se), repr(r.stats.rmse), repr(r.stats.rmse_se), repr(r.stats.bias),
             repr(r.stats.bias_se), repr(r.lambda_mean)]
            for r in rows
        ],
    )


FISHER_HEADER = [
    "L [layers]", "x [ansatz queries]", "fisher_per_time [1/query]", "depth [ansatz units]",
    "local_max [flag]", "dead_spot [flag]",
]


def fisher_csv(rows: list[FisherRow]) -> str:
    return _csv(
        FISHER_HEADER,
        [[r.layers, r.queries, repr(r.fisher_per_time), str(r.depth), int(r.local_max), int(r.dead_spot)]
         for r in rows],
    )


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"

"""Grid Bayesian inference of (pi, lambda) from parity outcomes.

The posterior lives on a rectangular grid indexed ``[p, q]`` with ``p`` the
decay-rate index and ``q`` the expectation-value index, held in the log
domain. The prior is uniform unless one is supplied.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .likelihood import chebyshev_t


@dataclass(frozen=True)
class GridSpec:
    pi_points: int = 2001
    pi_min: float = -1.0
    pi_max: float = 1.0
    lambda_points: int = 501
    lambda_min: float = 0.0
    lambda_max: float = 0.5

    def __post_init__(self):
        if self.pi_points < 2 or not -1.0 <= self.pi_min < self.pi_max <= 1.0:
            raise ValueError(f"invalid pi axis {self.pi_min}..{self.pi_max} x {self.pi_points}")
        if self.lambda_points < 1 or self.lambda_min < 0:
            raise ValueError("invalid lambda axis")
        if self.lambda_points > 1 and not self.lambda_max > self.lambda_min:
            raise ValueError("lambda_max must exceed lambda_min")

    @classmethod
    def fixed_lambda(cls, lam: float = 0.0, **kw) -> GridSpec:
        return cls(lambda_points=1, lambda_min=lam, lambda_max=lam, **kw)

    @property
    def pi_axis(self) -> np.ndarray:
        return np.linspace(self.pi_min, self.pi_max, self.pi_points)

    @property
    def lambda_axis(self) -> np.ndarray:
        if self.lambda_points == 1:
            return np.array([self.lambda_min])
        return np.linspace(self.lambda_min, self.lambda_max, self.lambda_points)

    @property
    def pi_step(self) -> float:
        return (self.pi_max - self.pi_min) / (self.pi_points - 1)


@lru_cache(maxsize=64)
def _log_likelihood_table(spec: GridSpec, layers: int) -> tuple[np.ndarray, np.ndarray]:
    """(log P(+1), log P(-1)) over the grid for one layer count."""
    decay = np.exp(-(layers + 0.5) * spec.lambda_axis)[:, None]
    signal = decay * chebyshev_t(2 * layers + 1, spec.pi_axis)[None, :]
    with np.errstate(divide="ignore"):
        plus = np.log(0.5 * (1.0 + signal))
        minus = np.log(0.5 * (1.0 - signal))
    plus.setflags(write=False)
    minus.setflags(write=False)
    return plus, minus


class PosteriorGrid:
    """Unnormalized log posterior over (lambda, pi)."""

    def __init__(self, spec: GridSpec, log_weights: np.ndarray | None = None):
        self.spec = spec
        shape = (spec.lambda_points, spec.pi_points)
        if log_weights is None:
            log_weights = np.zeros(shape)
        log_weights = np.asarray(log_weights, dtype=float)
        if log_weights.shape != shape:
            raise ValueError(f"log_weights shape {log_weights.shape} != {shape}")
        if np.any(np.isnan(log_weights)) or np.any(log_weights == np.inf):
            raise ValueError("log_weights must be finite or -inf")
        self.log_weights = log_weights

    @classmethod
    def uniform(cls, spec: GridSpec | None = None) -> PosteriorGrid:
        return cls(spec or GridSpec())

    @property
    def pi_axis(self) -> np.ndarray:
        return self.spec.pi_axis

    @property
    def lambda_axis(self) -> np.ndarray:
        return self.spec.lambda_axis

    def copy(self) -> PosteriorGrid:
        return PosteriorGrid(self.spec, self.log_weights.copy())

    def rescaled(self) -> PosteriorGrid:
        """Shift so the largest log weight is 0."""
        top = np.max(self.log_weights)
        if not np.isfinite(top):
            raise FloatingPointError("posterior vanished everywhere on the grid")
        return PosteriorGrid(self.spec, self.log_weights - top)

    def normalized(self) -> PosteriorGrid:
        g = self.rescaled()
        log_z = np.log(np.sum(np.exp(g.log_weights)))
        return PosteriorGrid(self.spec, g.log_weights - log_z)

    def probabilities(self) -> np.ndarray:
        return np.exp(self.normalized().log_weights)

    def argmax(self) -> tuple[int, int]:
        """Index ``(p, q)`` of the maximum; ties go to the smallest lambda
        index, then the smallest pi index."""
        flat = int(np.argmax(self.log_weights))
        return divmod(flat, self.spec.pi_points)

    def mode(self) -> tuple[float, float]:
        """``(pi_hat, lambda_hat)`` at the argmax."""
        p, q = self.argmax()
        return float(self.pi_axis[q]), float(self.lambda_axis[p])


def bayes_update(grid: PosteriorGrid, outcome: int, layers: int) -> PosteriorGrid:
    """Multiply in the likelihood of one outcome from an L-layer circuit."""
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    plus, minus = _log_likelihood_table(grid.spec, int(layers))
    return PosteriorGrid(grid.spec, grid.log_weights + (plus if outcome == 1 else minus)).rescaled()


def bayes_update_counts(grid: PosteriorGrid, counts: Mapping[int, tuple[int, int]]) -> PosteriorGrid:
    """Apply many outcomes at once. ``counts[L] = (n_plus, n_minus)``.

    Equivalent to calling :func:`bayes_update` once per outcome in any order.
    """
    lw = grid.log_weights.copy()
    for layers in sorted(counts):
        n_plus, n_minus = counts[layers]
        plus, minus = _log_likelihood_table(grid.spec, int(layers))
        # 0 * -inf would poison the grid; skip absent outcomes entirely.
        if n_plus:
            lw += n_plus * plus
        if n_minus:
            lw += n_minus * minus
    return PosteriorGrid(grid.spec, lw).rescaled()


class OutcomeDataset:
    """Parity outcomes grouped by Grover layer count."""

    def __init__(self, outcomes: Mapping[int, Iterable[int]]):
        data = {}
        for layers, values in sorted(outcomes.items()):
            if int(layers) != layers or layers < 0:
                raise ValueError(f"invalid layer count {layers!r}")
            arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
            arr = arr.astype(np.int8)
            if arr.size and not np.all(np.abs(arr) == 1):
                raise ValueError(f"outcomes at L={layers} must be +1 or -1")
            arr.setflags(write=False)
            data[int(layers)] = arr
        self._data = data

    @property
    def layers(self) -> list[int]:
        return list(self._data)

    def __getitem__(self, layers: int) -> np.ndarray:
        return self._data[layers]

    def __contains__(self, layers: int) -> bool:
        return layers in self._data

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OutcomeDataset)
            and self.layers == other.layers
            and all(np.array_equal(self[l], other[l]) for l in self.layers)
        )

    def shots(self, layers: int) -> int:
        return int(self._data[layers].size)

    @property
    def total(self) -> int:
        return sum(a.size for a in self._data.values())

    def subset(self, layers: Iterable[int]) -> OutcomeDataset:
        layers = list(layers)
        missing = [l for l in layers if l not in self._data]
        if missing:
            raise KeyError(f"dataset has no outcomes for layers {missing}")
        return OutcomeDataset({l: self._data[l] for l in layers})

    def pooled(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat ``(layer_labels, outcomes)`` in layer order."""
        if not self._data:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int8)
        labels = np.concatenate([np.full(a.size, l, dtype=np.int64) for l, a in self._data.items()])
        return labels, np.concatenate(list(self._data.values()))

    def counts(self) -> dict[int, tuple[int, int]]:
        return {l: (int(np.sum(a == 1)), int(np.sum(a == -1))) for l, a in self._data.items()}


def tally(labels: np.ndarray, outcomes: np.ndarray) -> dict[int, tuple[int, int]]:
    counts = {}
    for l in np.unique(labels):
        sel = outcomes[labels == l]
        counts[int(l)] = (int(np.sum(sel == 1)), int(np.sum(sel == -1)))
    return counts


def resample(
    data: OutcomeDataset, m: int, rng: np.random.Generator, stratified: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``m`` outcomes with replacement, keeping each one's layer label.

    Pooled mode draws uniformly from all outcomes. Stratified mode fixes each
    layer's share at its proportion of the dataset (largest remainder) and
    draws within layers.
    """
    n = data.total
    if n == 0:
        raise ValueError("cannot resample an empty dataset")
    if not 1 <= m <= n:
        raise ValueError(f"resample size must lie in 1..{n}, got {m}")
    if not stratified:
        labels, outcomes = data.pooled()
        idx = rng.integers(0, n, size=m)
        return labels[idx], outcomes[idx]
    shares = np.array([data.shots(l) for l in data.layers], dtype=float) * m / n
    alloc = np.floor(shares).astype(int)
    order = np.argsort(-(shares - alloc), kind="stable")
    alloc[order[: m - alloc.sum()]] += 1
    labels, outcomes = [], []
    for l, k in zip(data.layers, alloc):
        src = data[l]
        labels.append(np.full(k, l, dtype=np.int64))
        outcomes.append(src[rng.integers(0, src.size, size=k)])
    return np.concatenate(labels), np.concatenate(outcomes)


def posterior(data: OutcomeDataset, spec: GridSpec | None = None, prior: PosteriorGrid | None = None) -> PosteriorGrid:
    """Posterior from every outcome in ``data`` used exactly once."""
    spec = spec or GridSpec()
    grid = prior.copy() if prior is not None else PosteriorGrid.uniform(spec)
    return bayes_update_counts(grid, data.counts())


def mle_estimate(
    data: OutcomeDataset,
    m: int,
    spec: GridSpec | None = None,
    rng=None,
    *,
    stratified: bool = False,
    prior: PosteriorGrid | None = None,
) -> tuple[float, float]:
    """Resample ``m`` labelled outcomes with duplicates, update a grid posterior
    with each, and return the ``(pi, lambda)`` grid point of maximum weight."""
    spec = spec or GridSpec()
    rng = np.random.default_rng(rng)
    labels, outcomes = resample(data, m, rng, stratified)
    grid = prior.copy() if prior is not None else PosteriorGrid.uniform(spec)
    return bayes_update_counts(grid, tally(labels, outcomes)).mode()


def standard_sampling_estimate(outcomes) -> float:
    outcomes = np.asarray(outcomes)
    if outcomes.size == 0:
        raise ValueError("standard sampling needs at least one outcome")
    return float(np.clip(np.mean(outcomes), -1.0, 1.0))


@dataclass(frozen=True)
class TrialStats:
    """Spread of repeated estimates around a known truth.

    ``sigma`` uses the population convention (divide by n) so that
    ``rmse**2 == bias**2 + sigma**2`` holds exactly up to rounding.
    ``rmse_se`` is sqrt(std of squared errors) / sqrt(n).
    """

    n_trials: int
    mean: float
    bias: float
    bias_se: float
    sigma: float
    sigma_se: float
    rmse: float
    rmse_se: float


def trial_statistics(estimates, truth: float) -> TrialStats:
    est = np.asarray(estimates, dtype=float)
    n = est.size
    if n < 2:
        raise ValueError(f"trial statistics need at least 2 trials, got {n}")
    err = est - truth
    sq = err**2
    sigma = float(np.std(est))
    return TrialStats(
        n_trials=n,
        mean=float(np.mean(est)),
        bias=float(np.mean(err)),
        bias_se=sigma / math.sqrt(n),
        sigma=sigma,
        sigma_se=sigma / math.sqrt(2 * (n - 1)),
        rmse=float(np.sqrt(np.mean(sq))),
        rmse_se=float(np.sqrt(np.std(sq)) / math.sqrt(n)),
    )


@dataclass
class EstimateReport:
    method: str
    observable: str
    layers: list[int]
    shots: int
    truth: float
    pi_hat: float
    lambda_hat: float | None
    stats: TrialStats
    seed: int
    trials: list[tuple[float, float | None]] = field(default_factory=list)

    @classmethod
    def from_trials(cls, method, observable, layers, shots, truth, trials, seed) -> EstimateReport:
        pis = [t[0] for t in trials]
        lams = [t[1] for t in trials if t[1] is not None]
        return cls(
            method=method,
            observable=str(observable),
            layers=[int(l) for l in layers],
            shots=int(shots),
            truth=float(truth),
            pi_hat=float(np.mean(pis)),
            lambda_hat=float(np.mean(lams)) if lams else None,
            stats=trial_statistics(pis, truth),
            seed=int(seed),
            trials=[(float(p), None if l is None else float(l)) for p, l in trials],
        )

    def to_dict(self) -> dict:
        s = self.stats
        return {
            "method": self.method,
            "observable": self.observable,
            "layers": self.layers,
            "shots": self.shots,
            "truth": self.truth,
            "pi_hat": self.pi_hat,
            "lambda_hat": self.lambda_hat,
            "rmse": s.rmse,
            "rmse_se": s.rmse_se,
            "bias": s.bias,
            "bias_se": s.bias_se,
            "sigma": s.sigma,
            "sigma_se": s.sigma_se,
            "n_trials": s.n_trials,
            "seed": self.seed,
            "trials": [list(t) for t in self.trials],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

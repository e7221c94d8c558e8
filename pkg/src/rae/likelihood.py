"""Chebyshev likelihoods for L-layer enhanced sampling and their Fisher information.

An L-layer circuit makes ``x = 2L + 1`` queries to the ansatz. Its +1
outcome probability under exponential decay is

    P(+1 | pi, lam; L) = (1 + exp(-(L + 1/2) lam) * T_x(pi)) / 2

where ``T_x`` is the Chebyshev polynomial of degree x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOMAIN_GUARD = 1e-12


def _clamp_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + DOMAIN_GUARD):
        raise ValueError(f"Chebyshev argument outside [-1, 1]: {np.max(np.abs(x))!r}")
    return np.clip(x, -1.0, 1.0)


def chebyshev_t(m: int, x):
    """``cos(m * arccos(x))``; accepts scalars or arrays."""
    if int(m) != m or m < 0:
        raise ValueError(f"degree must be a nonnegative integer, got {m}")
    out = np.cos(m * np.arccos(_clamp_unit(x)))
    return float(out) if out.ndim == 0 else out


def decay_factor(lam, layers):
    """Signal survival ``exp(-(L + 1/2) lam)``."""
    return np.exp(-(layers + 0.5) * np.asarray(lam, dtype=float))


@dataclass(frozen=True)
class LikelihoodParams:
    pi: float
    lam: float
    layers: int

    def __post_init__(self):
        if not -1.0 - DOMAIN_GUARD <= self.pi <= 1.0 + DOMAIN_GUARD:
            raise ValueError(f"pi must lie in [-1, 1], got {self.pi}")
        if self.lam < 0:
            raise ValueError(f"decay rate must be nonnegative, got {self.lam}")
        if int(self.layers) != self.layers or self.layers < 0:
            raise ValueError(f"layer count must be a nonnegative integer, got {self.layers}")


def prob_plus(pi, lam, layers: int):
    """P(+1) on scalars or broadcastable arrays of (pi, lam)."""
    signal = decay_factor(lam, layers) * chebyshev_t(2 * layers + 1, pi)
    return 0.5 * (1.0 + signal)


def likelihood(params: LikelihoodParams, outcome: int) -> float:
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    p = float(prob_plus(params.pi, params.lam, params.layers))
    # One side is computed, the other is its complement, so the pair sums to 1.
    return p if outcome == 1 else 1.0 - p


def fisher_info_per_time(pi: float, lam: float, layers: int) -> float:
    """Fisher information about ``theta = arccos(pi)`` per ansatz query.

    With ``x = 2L + 1`` this is

        x * exp(-lam x) sin^2(x theta) / (1 - exp(-lam x) cos^2(x theta)),

    i.e. the per-shot information of the decayed Bernoulli law divided by the
    x queries each shot costs. At ``lam = 0`` it reduces to x away from the
    zeros of ``sin(x theta)``.
    """
    if not -1.0 < pi < 1.0:
        raise ValueError(f"pi must lie strictly inside (-1, 1), got {pi}")
    if lam < 0:
        raise ValueError(f"decay rate must be nonnegative, got {lam}")
    x = 2 * layers + 1
    theta = np.arccos(pi)
    s2 = np.sin(x * theta) ** 2
    if s2 == 0.0:
        return 0.0
    decay = np.exp(-lam * x)
    denom = 1.0 - decay * np.cos(x * theta) ** 2
    if denom <= 0.0:
        return float("inf")
    return float(x * decay * s2 / denom)


def fisher_info_per_shot(pi: float, lam: float, layers: int) -> float:
    return (2 * layers + 1) * fisher_info_per_time(pi, lam, layers)

"""Layer selection by Fisher information rate and equal-runtime shot budgets."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .circuits import depth_units, mean_depth
from .likelihood import fisher_info_per_time


@dataclass(frozen=True)
class Schedule:
    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        entries = tuple((int(l), int(s)) for l, s in self.entries)
        layers = [l for l, _ in entries]
        if len(set(layers)) != len(layers):
            raise ValueError(f"duplicate layer counts in schedule {layers}")
        if any(l < 0 for l in layers) or any(s < 1 for _, s in entries):
            raise ValueError("schedule needs nonnegative layers and positive shot counts")
        object.__setattr__(self, "entries", entries)

    @property
    def layers(self) -> list[int]:
        return [l for l, _ in self.entries]

    @property
    def shots(self) -> dict[int, int]:
        return dict(self.entries)

    @property
    def total_shots(self) -> int:
        return sum(s for _, s in self.entries)

    @property
    def total_depth_units(self) -> Fraction:
        return sum((s * depth_units(l) for l, s in self.entries), Fraction(0))

    def to_text(self) -> str:
        """``L:shots`` pairs, comma separated."""
        return ",".join(f"{l}:{s}" for l, s in self.entries)

    @classmethod
    def from_text(cls, text: str) -> Schedule:
        pairs = [p.split(":") for p in text.replace(" ", "").split(",") if p]
        return cls(tuple((int(l), int(s)) for l, s in pairs))


def fisher_scan(pi: float, lam: float, layer_range) -> list[float]:
    return [fisher_info_per_time(pi, lam, l) for l in layer_range]


def local_maxima(values) -> list[int]:
    """Indices strictly above their neighbours; endpoints compare to one side."""
    v = list(values)
    out = []
    for i, x in enumerate(v):
        left = v[i - 1] if i > 0 else float("-inf")
        right = v[i + 1] if i + 1 < len(v) else float("-inf")
        if x > left and x > right:
            out.append(i)
    return out


def dead_spots(values) -> list[int]:
    """Interior indices strictly below both neighbours."""
    v = list(values)
    return [i for i in range(1, len(v) - 1) if v[i] < v[i - 1] and v[i] < v[i + 1]]


def select_layers(pi_guess: float, lambda_guess: float, layer_range, k: int) -> list[int]:
    """The ``k`` layer counts with the highest Fisher information per query,
    returned in ascending order. Ties go to the smaller L."""
    layer_range = list(layer_range)
    if not 1 <= k <= len(layer_range):
        raise ValueError(f"k must lie in 1..{len(layer_range)}, got {k}")
    if not -1.0 < pi_guess < 1.0:
        raise ValueError(f"pi_guess must lie strictly inside (-1, 1), got {pi_guess}")
    rates = fisher_scan(pi_guess, lambda_guess, layer_range)
    ranked = sorted(zip(layer_range, rates), key=lambda lr: (-lr[1], lr[0]))
    return sorted(l for l, _ in ranked[:k])


def equal_runtime_budget(baseline_shots: int, layers) -> Schedule:
    """Equal shots per layer so the total depth matches ``baseline_shots``
    single-ansatz circuits as closely as possible from below.

    With mean depth D over the layers, ``floor(baseline_shots / D)`` shots are
    split evenly; any remainder that does not divide evenly is dropped so every
    layer gets the same count.
    """
    layers = list(layers)
    if not layers:
        raise ValueError("need at least one layer count")
    if len(set(layers)) != len(layers):
        raise ValueError(f"duplicate layer counts {layers}")
    total = int(Fraction(baseline_shots) / mean_depth(layers))
    per_layer = total // len(layers)
    if per_layer < 1:
        raise ValueError(
            f"baseline of {baseline_shots} shots cannot fund one shot on each of layers {layers}"
        )
    return Schedule(tuple((l, per_layer) for l in layers))

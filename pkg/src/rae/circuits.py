"""Ansatz, Grover iterate and enhanced-sampling circuits.

Depth is tracked in units of one ansatz query. The reflection about the
all-zeros state is costed at half an ansatz, so an L-layer enhanced-sampling
circuit costs ``2.5 L + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import pi

from .sim import DensityMatrix, Gate, GateKind, PauliString, apply_gates, _check_qubits

ANSATZ_COST = Fraction(1)
REFLECTION_COST = Fraction(1, 2)
PAULI_COST = Fraction(0)

DEFAULT_THETA = -6.0575


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...]
    depth: Fraction = Fraction(0)

    def __post_init__(self):
        _check_qubits(self.n)
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "depth", Fraction(self.depth))
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        for g in self.gates:
            if max(g.targets) >= self.n:
                raise ValueError(f"gate {g} out of range for {self.n} qubits")
            if g.kind is GateKind.R0 and len(g.targets) != self.n:
                raise ValueError("R0 must span every qubit")

    def inverse(self) -> Circuit:
        return Circuit(self.n, tuple(g.inverse() for g in reversed(self.gates)), self.depth)

    def __add__(self, other: Circuit) -> Circuit:
        if other.n != self.n:
            raise ValueError(f"cannot join {self.n}- and {other.n}-qubit circuits")
        return Circuit(self.n, self.gates + other.gates, self.depth + other.depth)

    def run(self, state: DensityMatrix | None = None) -> DensityMatrix:
        if state is None:
            state = DensityMatrix.zero_state(self.n)
        return apply_gates(state, self.gates)

    def to_text(self) -> str:
        """One gate per line: ``KIND ANGLE TARGETS`` with ``-`` for no angle."""
        lines = [f"# qubits {self.n} depth {self.depth}"]
        for g in self.gates:
            angle = "-" if g.angle is None else repr(g.angle)
            lines.append(f"{g.kind.value} {angle} {' '.join(map(str, g.targets))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[:2] != ["#", "qubits"] or head[3] != "depth":
            raise ValueError(f"bad circuit header {lines[0]!r}")
        gates = []
        for ln in lines[1:]:
            kind, angle, *targets = ln.split()
            gates.append(
                Gate(GateKind(kind), tuple(int(t) for t in targets), None if angle == "-" else float(angle))
            )
        return cls(int(head[2]), tuple(gates), Fraction(head[4]))


@dataclass(frozen=True)
class EnhancedSamplingSpec:
    ansatz_theta: float
    observable: PauliString
    layers: int

    def __post_init__(self):
        if isinstance(self.observable, str):
            object.__setattr__(self, "observable", PauliString.parse(self.observable))
        if int(self.layers) != self.layers or self.layers < 0:
            raise ValueError(f"layer count must be a nonnegative integer, got {self.layers}")
        object.__setattr__(self, "layers", int(self.layers))


def build_ansatz(theta: float) -> Circuit:
    """Two-qubit hydrogen ansatz with a single variational Rz."""
    g = GateKind
    gates = (
        Gate(g.RY, (0,), pi / 2),
        Gate(g.RX, (1,), pi),
        Gate(g.RX, (1,), -pi / 2),
        Gate(g.CNOT, (0, 1)),
        Gate(g.RZ, (1,), theta),
        Gate(g.CNOT, (0, 1)),
        Gate(g.RY, (0,), -pi / 2),
        Gate(g.RX, (1,), pi / 2),
    )
    return Circuit(2, gates, ANSATZ_COST)


def build_reflection(n: int) -> Circuit:
    return Circuit(n, (Gate(GateKind.R0, tuple(range(n))),), REFLECTION_COST)


def build_grover_iterate(ansatz: Circuit, observable: PauliString) -> Circuit:
    """``A R0 A^dagger P`` in time order: P first, then A^dagger, R0, A."""
    if observable.n != ansatz.n:
        raise ValueError(f"observable {observable} acts on {observable.n} qubits, ansatz on {ansatz.n}")
    p = Circuit(ansatz.n, tuple(observable.gates()), PAULI_COST)
    return p + ansatz.inverse() + build_reflection(ansatz.n) + ansatz


def build_enhanced_circuit(spec: EnhancedSamplingSpec) -> Circuit:
    ansatz = build_ansatz(spec.ansatz_theta)
    circuit = ansatz
    if spec.layers:
        iterate = build_grover_iterate(ansatz, spec.observable)
        for _ in range(spec.layers):
            circuit = circuit + iterate
    return circuit


def depth_units(layers: int) -> Fraction:
    """Cost of an L-layer circuit in ansatz units."""
    return ANSATZ_COST + layers * (2 * ANSATZ_COST + REFLECTION_COST + PAULI_COST)


def mean_depth(layers) -> Fraction:
    layers = list(layers)
    return sum((depth_units(l) for l in layers), Fraction(0)) / len(layers)

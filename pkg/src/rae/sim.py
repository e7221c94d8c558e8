"""Dense density-matrix simulation for few-qubit circuits.

Qubit 0 is the most significant bit of the computational-basis index, so a
bitstring ``"01"`` means qubit 0 reads 0 and qubit 1 reads 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

MAX_QUBITS = 6

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
REAL_TOL = 1e-10

_I2 = np.eye(2, dtype=complex)
_PAULI = {
    "I": _I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)

# Rotates each Pauli eigenbasis onto the computational basis.
_BASIS_CHANGE = {
    "I": _I2,
    "Z": _I2,
    "X": _H,
    "Y": _H @ _SDG,
}


class DimensionError(ValueError):
    """Raised when a state, gate or observable disagree on qubit count."""


def _check_qubits(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise DimensionError(f"qubit count must be an integer in 1..{MAX_QUBITS}, got {n!r}")
    return int(n)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


class DensityMatrix:
    """Immutable n-qubit density matrix."""

    __slots__ = ("_data", "_n")

    def __init__(self, data, *, validate: bool = True):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {data.shape}")
        dim = data.shape[0]
        n = dim.bit_length() - 1
        if 1 << n != dim:
            raise DimensionError(f"dimension {dim} is not a power of two")
        self._n = _check_qubits(n)
        self._data = _frozen(data)
        if validate:
            self._validate()

    def _validate(self) -> None:
        d = self._data
        if np.max(np.abs(d - d.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(d) - 1) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {np.trace(d).real:.3g}, expected 1")

    @classmethod
    def zero_state(cls, n: int) -> DensityMatrix:
        n = _check_qubits(n)
        rho = np.zeros((1 << n, 1 << n), dtype=complex)
        rho[0, 0] = 1.0
        return cls(rho)

    @classmethod
    def from_statevector(cls, psi) -> DensityMatrix:
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n: int) -> DensityMatrix:
        n = _check_qubits(n)
        return cls(np.eye(1 << n, dtype=complex) / (1 << n))

    @property
    def n(self) -> int:
        return self._n

    @property
    def dim(self) -> int:
        return 1 << self._n

    @property
    def data(self) -> np.ndarray:
        return self._data

    def trace(self) -> complex:
        return complex(np.trace(self._data))

    def purity(self) -> float:
        return float(np.real(np.trace(self._data @ self._data)))

    def probabilities(self) -> np.ndarray:
        """Computational-basis outcome probabilities."""
        p = np.clip(np.real(np.diag(self._data)), 0.0, None)
        return p / p.sum()

    def distance(self, other: DensityMatrix) -> float:
        """Frobenius distance."""
        return float(np.linalg.norm(self._data - other._data))

    def __repr__(self) -> str:
        return f"DensityMatrix(n={self._n})"


class GateKind(str, Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"
    X = "X"
    Y = "Y"
    Z = "Z"
    R0 = "R0"

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RX, GateKind.RY, GateKind.RZ)


@dataclass(frozen=True)
class Gate:
    """A single gate. ``targets`` is ``(control, target)`` for CNOT and all
    qubits for the reflection about ``|0...0>``."""

    kind: GateKind
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if any(t < 0 for t in self.targets):
            raise ValueError(f"negative qubit index in {self.targets}")
        if self.kind.is_rotation:
            if self.angle is None or not np.isfinite(self.angle):
                raise ValueError(f"{self.kind.value} needs a finite angle")
            if len(self.targets) != 1:
                raise ValueError(f"{self.kind.value} acts on exactly one qubit")
            object.__setattr__(self, "angle", float(self.angle))
        else:
            if self.angle is not None:
                raise ValueError(f"{self.kind.value} takes no angle")
            if self.kind is GateKind.CNOT:
                if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                    raise ValueError("CNOT needs distinct control and target")
            elif self.kind is GateKind.R0:
                if self.targets != tuple(range(len(self.targets))) or not self.targets:
                    raise ValueError("R0 must act on all qubits 0..n-1")
            elif len(self.targets) != 1:
                raise ValueError(f"{self.kind.value} acts on exactly one qubit")

    def inverse(self) -> Gate:
        if self.kind.is_rotation:
            return Gate(self.kind, self.targets, -self.angle)
        return self

    def matrix(self, n: int) -> np.ndarray:
        """Full 2^n x 2^n unitary."""
        n = _check_qubits(n)
        if max(self.targets) >= n:
            raise DimensionError(f"gate {self.kind.value} targets {self.targets} on {n} qubits")
        if self.kind is GateKind.R0:
            if len(self.targets) != n:
                raise DimensionError(f"R0 spans {len(self.targets)} qubits, state has {n}")
            diag = -np.ones(1 << n, dtype=complex)
            diag[0] = 1.0
            return np.diag(diag)
        if self.kind is GateKind.CNOT:
            control, target = self.targets
            idx = np.arange(1 << n)
            cbit = (idx >> (n - 1 - control)) & 1
            perm = np.where(cbit == 1, idx ^ (1 << (n - 1 - target)), idx)
            u = np.zeros((1 << n, 1 << n), dtype=complex)
            u[perm, idx] = 1.0
            return u
        return embed(self._local_matrix(), self.targets[0], n)

    def _local_matrix(self) -> np.ndarray:
        if self.kind in (GateKind.X, GateKind.Y, GateKind.Z):
            return _PAULI[self.kind.value]
        c, s = np.cos(self.angle / 2), np.sin(self.angle / 2)
        if self.kind is GateKind.RX:
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        if self.kind is GateKind.RY:
            return np.array([[c, -s], [s, c]], dtype=complex)
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)


def embed(local: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Lift a single-qubit matrix onto ``qubit`` of an n-qubit register."""
    ops = [_I2] * n
    ops[qubit] = local
    return reduce(np.kron, ops)


@dataclass(frozen=True)
class PauliString:
    """Signed tensor product of single-qubit Paulis, letter i acting on qubit i."""

    letters: str
    sign: int = 1

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or set(letters) - set("IXYZ"):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        if set(letters) == {"I"}:
            raise ValueError("Pauli string must have a non-identity letter")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        _check_qubits(len(letters))
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> PauliString:
        text = text.strip()
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        return cls(text, sign)

    @property
    def n(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        return self.sign * reduce(np.kron, [_PAULI[c] for c in self.letters])

    def gates(self) -> list[Gate]:
        """The operator as explicit single-qubit gates; the sign is a global phase."""
        return [Gate(GateKind(c), (q,)) for q, c in enumerate(self.letters) if c != "I"]

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "") + self.letters


def _check_match(state: DensityMatrix, n: int, what: str) -> None:
    if state.n != n:
        raise DimensionError(f"{what} acts on {n} qubits, state has {state.n}")


def apply_unitary(state: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    if u.shape != (state.dim, state.dim):
        raise DimensionError(f"unitary shape {u.shape} does not match dimension {state.dim}")
    rho = u @ state.data @ u.conj().T
    # Re-symmetrize to keep rounding from accumulating across long circuits.
    return DensityMatrix(0.5 * (rho + rho.conj().T), validate=False)


def apply_gate(state: DensityMatrix, gate: Gate) -> DensityMatrix:
    return apply_unitary(state, gate.matrix(state.n))


def apply_gates(state: DensityMatrix, gates) -> DensityMatrix:
    u = np.eye(state.dim, dtype=complex)
    for g in gates:
        u = g.matrix(state.n) @ u
    return apply_unitary(state, u)


def expectation(state: DensityMatrix, observable: PauliString) -> float:
    _check_match(state, observable.n, f"observable {observable}")
    value = np.trace(state.data @ observable.matrix())
    if abs(value.imag) > REAL_TOL:
        raise ValueError(f"expectation has imaginary part {value.imag:.3g}")
    return float(np.clip(value.real, -1.0, 1.0))


def apply_global_depolarizing(state: DensityMatrix, survival: float) -> DensityMatrix:
    """``survival * rho + (1 - survival) * I / 2^n``."""
    if not 0.0 <= survival <= 1.0:
        raise ValueError(f"survival must lie in [0, 1], got {survival}")
    if survival == 1.0:
        return state
    mixed = np.eye(state.dim, dtype=complex) / state.dim
    return DensityMatrix(survival * state.data + (1.0 - survival) * mixed, validate=False)


def parity_distribution(state: DensityMatrix, observable: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Bitstring probabilities after rotating into the measurement basis, and
    the +/-1 eigenvalue attached to each bitstring."""
    _check_match(state, observable.n, f"observable {observable}")
    n = state.n
    u = reduce(np.kron, [_BASIS_CHANGE[c] for c in observable.letters])
    probs = apply_unitary(state, u).probabilities()
    idx = np.arange(1 << n)
    active = [q for q, c in enumerate(observable.letters) if c != "I"]
    ones = sum(((idx >> (n - 1 - q)) & 1) for q in active)
    eig = observable.sign * np.where(ones % 2 == 0, 1, -1)
    return probs, eig


def bitstring_parity(bits: str, observable: PauliString) -> int:
    """Eigenvalue of ``observable`` for a bitstring measured in its eigenbasis."""
    if len(bits) != observable.n:
        raise DimensionError(f"bitstring {bits!r} has wrong length for {observable}")
    ones = sum(b == "1" for b, c in zip(bits, observable.letters) if c != "I")
    return observable.sign * (-1 if ones % 2 else 1)


def sample_parities(
    state: DensityMatrix, observable: PauliString, shots: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``shots`` parity outcomes as an int8 array of +/-1."""
    probs, eig = parity_distribution(state, observable)
    draws = rng.choice(len(probs), size=shots, p=probs)
    return eig[draws].astype(np.int8)


def measure_parity(state: DensityMatrix, observable: PauliString, rng) -> int:
    """Single-shot parity measurement. ``rng`` is a Generator or an integer seed."""
    rng = np.random.default_rng(rng)
    return int(sample_parities(state, observable, 1, rng)[0])

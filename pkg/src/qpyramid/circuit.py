"""Circuit IR: gate kinds, validation, gate-count/depth metrics, JSON serialization.

Conventions used throughout the package:
    - qubit 0 is the MOST significant bit of a basis-state index (big-endian),
    - Phase(phi) = diag(1, e^{i phi}), RotationZ(lmbda) = diag(e^{-i lmbda/2}, e^{+i lmbda/2}),
    - a circuit's global phase multiplies the final state by e^{i global_phase}.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum


class CircuitError(ValueError):
    """Base class for circuit construction/validation errors."""


class IndexOutOfRange(CircuitError):
    """A gate addresses a qubit index >= circuit width."""


class DuplicateQubit(CircuitError):
    """A gate lists the same qubit more than once."""


class ArityMismatch(CircuitError):
    """Qubit count or angle presence does not match the gate kind."""


class InvalidWidth(CircuitError):
    """Operation requested for an unsupported qubit count."""


class GateKind(Enum):
    PAULI_X = "PauliX"
    HADAMARD = "Hadamard"
    PHASE = "Phase"
    CONTROLLED_PHASE = "ControlledPhase"
    CONTROLLED_NOT = "ControlledNot"
    SWAP = "Swap"
    CONTROLLED_SWAP = "ControlledSwap"
    ROTATION_Z = "RotationZ"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def parametric(self) -> bool:
        return self in (GateKind.PHASE, GateKind.CONTROLLED_PHASE, GateKind.ROTATION_Z)


_ARITY = {
    GateKind.PAULI_X: 1,
    GateKind.HADAMARD: 1,
    GateKind.PHASE: 1,
    GateKind.ROTATION_Z: 1,
    GateKind.CONTROLLED_PHASE: 2,
    GateKind.CONTROLLED_NOT: 2,
    GateKind.SWAP: 2,
    GateKind.CONTROLLED_SWAP: 3,
}


@dataclass(frozen=True)
class Gate:
    """One gate application. Controls come first in `qubits`; `angle` in radians."""

    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))


@dataclass
class Circuit:
    """Ordered gate list over `n_qubits` wires plus a global phase (radians).

    Built with the fluent helpers below; treated as immutable once constructed.
    """

    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    global_phase: float = 0.0

    def _add(self, kind: GateKind, qubits: tuple[int, ...], angle: float | None = None) -> "Circuit":
        self.gates.append(Gate(kind, qubits, angle))
        return self

    def x(self, q: int) -> "Circuit":
        return self._add(GateKind.PAULI_X, (q,))

    def h(self, q: int) -> "Circuit":
        return self._add(GateKind.HADAMARD, (q,))

    def p(self, q: int, phi: float) -> "Circuit":
        return self._add(GateKind.PHASE, (q,), phi)

    def rz(self, q: int, lmbda: float) -> "Circuit":
        return self._add(GateKind.ROTATION_Z, (q,), lmbda)

    def cp(self, control: int, target: int, phi: float) -> "Circuit":
        return self._add(GateKind.CONTROLLED_PHASE, (control, target), phi)

    def cx(self, control: int, target: int) -> "Circuit":
        return self._add(GateKind.CONTROLLED_NOT, (control, target))

    def swap(self, a: int, b: int) -> "Circuit":
        return self._add(GateKind.SWAP, (a, b))

    def cswap(self, control: int, a: int, b: int) -> "Circuit":
        return self._add(GateKind.CONTROLLED_SWAP, (control, a, b))

    def extend(self, other: "Circuit") -> "Circuit":
        """Append another circuit's gates and add its global phase. Widths must match."""
        if other.n_qubits != self.n_qubits:
            raise InvalidWidth(f"cannot extend width {self.n_qubits} with width {other.n_qubits}")
        self.gates.extend(other.gates)
        self.global_phase += other.global_phase
        return self


@dataclass(frozen=True)
class GateMetrics:
    one_qubit_count: int
    two_qubit_count: int
    three_qubit_count: int
    total: int
    depth: int


def validation_error(circuit: Circuit) -> CircuitError | None:
    """Return the first invariant violation, or None if the circuit is well formed."""
    if circuit.n_qubits < 1:
        return InvalidWidth(f"n_qubits must be positive, got {circuit.n_qubits}")
    if not math.isfinite(circuit.global_phase):
        return CircuitError("global_phase is not finite")
    for i, gate in enumerate(circuit.gates):
        if len(gate.qubits) != gate.kind.arity:
            return ArityMismatch(f"gate {i} ({gate.kind.value}) expects {gate.kind.arity} qubits, got {len(gate.qubits)}")
        if gate.kind.parametric:
            if gate.angle is None or not math.isfinite(gate.angle):
                return ArityMismatch(f"gate {i} ({gate.kind.value}) requires a finite angle")
        elif gate.angle is not None:
            return ArityMismatch(f"gate {i} ({gate.kind.value}) takes no angle")
        if len(set(gate.qubits)) != len(gate.qubits):
            return DuplicateQubit(f"gate {i} ({gate.kind.value}) repeats a qubit: {gate.qubits}")
        for q in gate.qubits:
            if not 0 <= q < circuit.n_qubits:
                return IndexOutOfRange(f"gate {i} ({gate.kind.value}) touches qubit {q} outside width {circuit.n_qubits}")
    return None


def validate(circuit: Circuit) -> None:
    """Raise the typed error from `validation_error`, if any."""
    err = validation_error(circuit)
    if err is not None:
        raise err


def count_gates(circuit: Circuit) -> GateMetrics:
    """Count gates by arity and compute depth as greedy ASAP layers.

    A gate lands in layer 1 + max(previous layer over its qubits); gates in one
    layer act on pairwise-disjoint qubits and per-qubit program order is kept.
    """
    validate(circuit)
    counts = [0, 0, 0]
    frontier = [0] * circuit.n_qubits
    depth = 0
    for gate in circuit.gates:
        counts[gate.kind.arity - 1] += 1
        layer = 1 + max(frontier[q] for q in gate.qubits)
        for q in gate.qubits:
            frontier[q] = layer
        depth = max(depth, layer)
    return GateMetrics(counts[0], counts[1], counts[2], sum(counts), depth)


def _qate_template(n: int) -> list[Gate]:
    """Canonical gate order of the pyramid encoder: left CX ladder, per-qubit
    phases, all controlled-phase pairs (lexicographic), right CX ladder."""
    gates = [Gate(GateKind.CONTROLLED_NOT, (0, k)) for k in range(1, n)]
    gates += [Gate(GateKind.PHASE, (k,), 0.0) for k in range(1, n)]
    gates += [
        Gate(GateKind.CONTROLLED_PHASE, (k, l), 0.0)
        for k in range(1, n)
        for l in range(k + 1, n)
    ]
    gates += [Gate(GateKind.CONTROLLED_NOT, (0, k)) for k in range(1, n)]
    return gates


def qate_gate_count(n: int) -> GateMetrics:
    """Predicted metrics of the pyramid encoder for `n` qubits.

    1q = n-1 phase gates; 2q = C(n-1,2) controlled phases + 2(n-1) ladder CX.
    Depth is the ASAP depth of the canonical gate order.
    """
    if n < 2:
        raise InvalidWidth(f"pyramid encoder needs n >= 2, got {n}")
    return count_gates(Circuit(n, _qate_template(n)))


def baseline_gate_count(n: int) -> int:
    """Reference total gate count 3n + C(n,2) of the prior step-by-step construction."""
    if n < 1:
        raise InvalidWidth(f"n must be positive, got {n}")
    return 3 * n + math.comb(n, 2)


def circuit_to_dict(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        entry: dict = {"kind": g.kind.value, "qubits": list(g.qubits)}
        if g.angle is not None:
            entry["angle"] = g.angle
        gates.append(entry)
    return {"n_qubits": circuit.n_qubits, "global_phase": circuit.global_phase, "gates": gates}


def circuit_to_json(circuit: Circuit) -> str:
    """Serialize with full round-trip float precision and preserved gate order."""
    return json.dumps(circuit_to_dict(circuit), indent=2)


def circuit_from_json(text: str) -> Circuit:
    data = json.loads(text)
    kinds = {k.value: k for k in GateKind}
    gates = [Gate(kinds[g["kind"]], tuple(g["qubits"]), g.get("angle")) for g in data["gates"]]
    circuit = Circuit(int(data["n_qubits"]), gates, float(data.get("global_phase", 0.0)))
    validate(circuit)
    return circuit


def wrap_angle(angle: float) -> float:
    """Reduce an angle modulo 2*pi into (-pi, pi]."""
    return angle - 2.0 * math.pi * math.ceil((angle - math.pi) / (2.0 * math.pi))

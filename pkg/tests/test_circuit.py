import json
import math

import numpy as np
import pytest

from qpyramid.circuit import (
    ArityMismatch,
    Circuit,
    DuplicateQubit,
    Gate,
    GateKind,
    IndexOutOfRange,
    InvalidWidth,
    baseline_gate_count,
    circuit_from_json,
    circuit_to_json,
    count_gates,
    qate_gate_count,
    validate,
    validation_error,
    wrap_angle,
)
from qpyramid.encoders import build_qate_circuit, solve_qate
from qpyramid.grids import PhaseProfile

from oracles import random_circuit


def test_validate_well_formed():
    circuit = Circuit(2).cx(0, 1)
    assert validation_error(circuit) is None
    validate(circuit)  # should not raise


def test_validate_index_out_of_range():
    circuit = Circuit(2).p(5, 0.3)
    assert isinstance(validation_error(circuit), IndexOutOfRange)
    with pytest.raises(IndexOutOfRange):
        validate(circuit)


def test_validate_duplicate_qubit():
    circuit = Circuit(2)
    circuit.gates.append(Gate(GateKind.CONTROLLED_NOT, (1, 1)))
    assert isinstance(validation_error(circuit), DuplicateQubit)


@pytest.mark.parametrize(
    "gate",
    [
        Gate(GateKind.CONTROLLED_NOT, (0,)),       # wrong qubit count
        Gate(GateKind.PHASE, (0,)),                # missing angle
        Gate(GateKind.PAULI_X, (0,), 0.5),         # stray angle
        Gate(GateKind.PHASE, (0,), float("nan")),  # non-finite angle
    ],
)
def test_validate_arity_mismatch(gate):
    circuit = Circuit(2)
    circuit.gates.append(gate)
    assert isinstance(validation_error(circuit), ArityMismatch)


def test_validate_is_total_on_junk():
    # never aborts: returns a typed error even for badly mixed problems
    circuit = Circuit(0)
    assert isinstance(validation_error(circuit), InvalidWidth)


def test_count_single_gate():
    metrics = count_gates(Circuit(1).p(0, 0.1))
    assert (metrics.one_qubit_count, metrics.two_qubit_count, metrics.three_qubit_count) == (1, 0, 0)
    assert metrics.depth == 1


def test_count_disjoint_gates_share_a_layer():
    assert count_gates(Circuit(2).p(0, 0.1).p(1, 0.2)).depth == 1


def test_count_serial_dependency():
    assert count_gates(Circuit(2).cx(0, 1).p(1, 0.2)).depth == 2


def test_depth_deterministic():
    rng = np.random.default_rng(11)
    for _ in range(20):
        circuit = random_circuit(4, 15, rng)
        assert count_gates(circuit).depth == count_gates(circuit).depth


def test_metrics_internal_invariants():
    rng = np.random.default_rng(7)
    for _ in range(25):
        metrics = count_gates(random_circuit(5, 20, rng))
        assert metrics.total == (
            metrics.one_qubit_count + metrics.two_qubit_count + metrics.three_qubit_count
        )
        assert metrics.depth <= metrics.total


def test_qate_count_n4_total_is_12():
    metrics = qate_gate_count(4)
    assert metrics.one_qubit_count == 3
    assert metrics.two_qubit_count == 9  # C(3,2)=3 pairs + 6 ladder CX
    assert metrics.total == 12


@pytest.mark.parametrize("n,expected_1q,expected_2q", [(2, 1, 2), (5, 4, 14)])
def test_qate_count_formula_values(n, expected_1q, expected_2q):
    metrics = qate_gate_count(n)
    assert metrics.one_qubit_count == expected_1q
    assert metrics.two_qubit_count == expected_2q
    assert metrics.total == expected_1q + expected_2q


def test_qate_count_matches_built_circuit():
    # formula cross-checked against counting an actually built encoder
    for n in range(2, 11):
        profile = PhaseProfile(np.linspace(0.0, 1.0, 1 << (n - 1)), "half")
        built = count_gates(build_qate_circuit(n, solve_qate(profile)))
        predicted = qate_gate_count(n)
        assert built == predicted
        assert built.one_qubit_count == n - 1
        assert built.two_qubit_count == math.comb(n - 1, 2) + 2 * (n - 1)


def test_qate_count_invalid_width():
    with pytest.raises(InvalidWidth):
        qate_gate_count(1)


def test_baseline_counts():
    assert baseline_gate_count(4) == 18
    assert baseline_gate_count(1) == 3
    assert baseline_gate_count(9) == 63


def test_json_round_trip_preserves_order_and_values():
    circuit = Circuit(3, global_phase=-0.25).h(0).cp(0, 2, 0.1234567890123456).cx(1, 2)
    text = circuit_to_json(circuit)
    loaded = circuit_from_json(text)
    assert loaded.n_qubits == 3
    assert loaded.global_phase == circuit.global_phase
    assert [g.kind for g in loaded.gates] == [g.kind for g in circuit.gates]
    assert [g.qubits for g in loaded.gates] == [g.qubits for g in circuit.gates]
    assert loaded.gates[1].angle == circuit.gates[1].angle  # bit-exact round trip


def test_json_angle_only_for_parametric_kinds():
    data = json.loads(circuit_to_json(Circuit(2).cx(0, 1).p(0, 0.5)))
    assert "angle" not in data["gates"][0]
    assert data["gates"][1]["angle"] == 0.5
    assert data["gates"][0]["kind"] == "ControlledNot"
    assert data["gates"][1]["kind"] == "Phase"


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    for value in np.linspace(-20, 20, 101):
        wrapped = wrap_angle(float(value))
        assert -math.pi < wrapped <= math.pi
        assert math.isclose(math.cos(wrapped), math.cos(value), abs_tol=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circuit_gen import random_circuit
from nvqc.circuit_ir import (
    Circuit,
    Condition,
    GateKind,
    Instruction,
    ParseError,
    normalize_angle,
    parse_angle,
    parse_circuit,
    serialize_circuit,
    validate,
)
from nvqc.gates import equal_up_to_phase, source_matrix
from nvqc.oracle import unitary_of
from nvqc.topology import TopologyConfig


def test_minimal_program():
    c = parse_circuit("qubits 2\nh q0\ncx q0 q1")
    assert c.num_qubits == 2
    assert [i.kind for i in c.instructions] == [GateKind.H, GateKind.CX]
    assert c.instructions[1].qubits == (0, 1)


def test_unknown_gate_is_positioned():
    with pytest.raises(ParseError) as err:
        parse_circuit("qubits 1\nbadgate q0")
    assert err.value.line == 2
    assert "unknown gate" in err.value.message


def test_conditioned_gate():
    c = parse_circuit("qubits 2\ncreg m\nmeasure q0 -> m\nx q1 if m < 0")
    x = c.instructions[1]
    assert x.kind is GateKind.X and x.condition == Condition("m", "<", 0)
    assert c.instructions[0].register == "m"


@pytest.mark.parametrize("text, line", [
    ("qubits 2\nx q2", 2),
    ("qubits 2\ncreg m\nx q1 if z < 0", 3),
    ("qubits 1\nrx q0", 2),
    ("qubits 1\nrx q0 pi/0", 2),
    ("qubits 2\nmeasure q0 ->", 2),
    ("h q0", 1),
])
def test_errors_carry_line(text, line):
    with pytest.raises(ParseError) as err:
        parse_circuit(text)
    assert err.value.line == line


def test_comments_case_and_angle_expressions():
    c = parse_circuit("# header\nQUBITS 1\nRX q0 pi/2  # trailing\nrz Q0 -3*pi/4\n")
    assert c.instructions[0].angle == pytest.approx(math.pi / 2)
    assert c.instructions[1].angle == pytest.approx(-3 * math.pi / 4)


def test_angle_parser_rejects_code():
    for bad in ("__import__('os')", "pi**2", "a+1", ""):
        with pytest.raises(ValueError):
            parse_angle(bad)


def test_serialize_empty():
    assert serialize_circuit(Circuit(1)) == "qubits 1"


def test_round_trip_example():
    c = parse_circuit("qubits 2\ncreg m\nmeasure q0 -> m\nx q1 if m < 0")
    assert parse_circuit(serialize_circuit(c)) == c


def test_round_trip_random_circuits():
    rng = np.random.default_rng(3)
    for _ in range(100):
        c = random_circuit(rng, int(rng.integers(1, 5)), int(rng.integers(0, 12)))
        assert parse_circuit(serialize_circuit(c)) == c


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.sampled_from(list("qubitscregxhrzmeasu0123456789 ->#\n<=!if.pi/*")), max_size=80))
def test_parser_is_total(text):
    try:
        parse_circuit(text)
    except ParseError as err:
        assert err.line >= 1 and err.column >= 1


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50, allow_nan=False))
def test_angle_normalization(theta):
    t = normalize_angle(theta)
    assert -2 * math.pi < t <= 2 * math.pi + 1e-12
    assert normalize_angle(t) == pytest.approx(t, abs=1e-12)
    assert equal_up_to_phase(source_matrix("rx", theta), source_matrix("rx", t), 1e-9)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["rx", "ry", "rz"]), st.floats(-20, 20, allow_nan=False))
def test_normalized_gate_matches_oracle(name, theta):
    inst = Instruction(GateKind(name), (0,), theta)
    raw = source_matrix(name, theta)
    assert equal_up_to_phase(unitary_of([inst]), raw, 1e-8)


def test_validate():
    cfg = TopologyConfig(1, 5)
    assert validate(parse_circuit("qubits 2\nh q0\ncx q0 q1"), cfg) == []
    far = Circuit(8, [Instruction(GateKind.X, (7,))])
    assert any(d.kind == "out-of-range" for d in validate(far, cfg))
    same = Circuit(2, [Instruction(GateKind.CX, (1, 1))])
    assert [d.kind for d in validate(same, cfg)] == ["duplicate-operand"]

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nvqc import native as nv
from nvqc.circuit_ir import COMPARISONS, Condition, parse_circuit
from nvqc.codegen import (
    Angle,
    AsmInstruction,
    Program,
    TomographySpec,
    assemble,
    disassemble,
    emit,
    emit_conditional,
    emit_tomography,
    native_to_asm,
)
from nvqc.errors import AssemblyError
from nvqc.native import NativeCircuit
from nvqc.passes import PipelineOptions, compile_circuit, compile_tomography
from nvqc.simulator import run, run_exact
from nvqc.topology import TopologyConfig

CFG = TopologyConfig(1, 3)


def text_of(op):
    return native_to_asm(op).text()


def test_direct_mappings():
    assert text_of(nv.rot_e(0, "x", math.pi / 2)) == "qgatee q0 x 1570796"
    assert text_of(nv.crot(0, 1, "x", math.pi / 2)) == "crot q0 q1 x 1570796"
    assert text_of(nv.rz_c(2, -0.5)) == "qgatec q2 z -500000"
    assert text_of(nv.direct_rot(0, 1, "y", 1.0)) == "qgatedir q0 q1 y 1000000"
    assert text_of(nv.meas_e(0, "m")) == "meas q0 m"
    assert text_of(nv.entangle(0, 5)) == "entangle q0 q5"


def test_placeholder_cannot_be_emitted():
    with pytest.raises(AssemblyError):
        native_to_asm(nv.swap_placeholder(0, 1, "measure"))


def test_conditioned_gate_gets_label_guard():
    program = emit(compile_circuit(parse_circuit("qubits 2\ncreg m\nmeasure q0 -> m\nx q0 if m < 0"), CFG))
    lines = disassemble(program, header=False).splitlines()
    assert lines[1] == "BR m >= 0 skip0"
    assert lines[-1] == "label skip0"
    assert all(line.startswith("qgatee") for line in lines[2:-1])


def test_apply_when_nonnegative_block():
    body = [AsmInstruction("qgatee", (0,), "x", Angle.of(math.pi))]
    block = emit_conditional(body, Condition("m", ">=", 0), iter(["skip0"]))
    program = Program([AsmInstruction("meas", (0,), register="m")] + block)
    assert disassemble(program, header=False).splitlines()[1:] == [
        "BR m < 0 skip0", "qgatee q0 x 3141593", "label skip0"]


@pytest.mark.parametrize("cmp", COMPARISONS)
@pytest.mark.parametrize("threshold", [-2, -1, 0, 1])
def test_guard_truth_table(cmp, threshold):
    """For each outcome v in {-1, +1} the guarded gate runs iff the source condition holds at v."""
    for prep, value in (("", 1), ("x q0\n", -1)):
        text = f"qubits 1\ncreg m\ncreg k\n{prep}measure q0 -> m\ninit q0\nx q0 if m {cmp} {threshold}\nmeasure q0 -> k"
        program = emit(compile_circuit(parse_circuit(text), TopologyConfig(1, 1)))
        result = run_exact(program)
        ran = Condition("m", cmp, threshold).holds(value)
        assert result.register_expectations["k"] == pytest.approx(-1.0 if ran else 1.0)


def test_impossible_condition_never_runs():
    text = "qubits 1\ncreg m\nmeasure q0 -> m\nx q0 if m < -2"
    program = emit(compile_circuit(parse_circuit(text), TopologyConfig(1, 1)))
    result = run_exact(program)
    guarded = [i for i, ins in enumerate(program.instructions) if ins.mnemonic == "qgatee"]
    assert guarded and all(result.pc_counts[i] == 0 for i in guarded)


def test_unresolved_label():
    with pytest.raises(AssemblyError):
        assemble("BR x < 0 nowhere\n")


@pytest.mark.parametrize("text", [
    "label a\nlabel a\n", "ST r\n", "bogus q0\n", "qgatee q0 w 10\n", "crot q0 q1 z 10\n", "qgatee q0 x 1.5\n",
    "meas 0 m\n", "BR r ~ 0 a\nlabel a\n",
])
def test_malformed_assembly(text):
    with pytest.raises(AssemblyError):
        assemble(text)


def test_header_round_trip():
    program = emit(compile_circuit(parse_circuit("qubits 3\ncreg m\nh q1\nmeasure q1 -> m"), CFG))
    text = disassemble(program)
    assert text.startswith("#@ nvqc-asm 1\n")
    again = assemble(text)
    assert again == program and again.metadata["topology"] == "1 3"
    assert len(program.metadata["durations"]) == 16


REGS = ["r0", "r1"]


@st.composite
def programs(draw):
    n = draw(st.integers(0, 25))
    ins = [AsmInstruction("meas", (0,), register=r) for r in REGS]
    labels = []
    for _ in range(n):
        pick = draw(st.integers(0, 9))
        q = draw(st.integers(0, 4))
        angle = Angle(draw(st.integers(-7_000_000, 7_000_000)))
        axis = draw(st.sampled_from(["x", "y"]))
        if pick == 0:
            ins.append(AsmInstruction("qgatee", (q,), draw(st.sampled_from(["x", "y", "z"])), angle))
        elif pick == 1:
            ins.append(AsmInstruction(draw(st.sampled_from(["crot", "qgatec", "qgatedir"])), (0, q + 1), axis, angle))
        elif pick == 2:
            ins.append(AsmInstruction("qgatec", (q + 1,), "z", angle))
        elif pick == 3:
            if draw(st.booleans()):
                ins.append(AsmInstruction("inite", (q,)))
            else:
                ins.append(AsmInstruction(draw(st.sampled_from(["larmor_e", "rabi_c", "crc"]))))
        elif pick == 4:
            ins.append(AsmInstruction("meas", (q,), register=draw(st.sampled_from(REGS))))
        elif pick == 5:
            ins.append(AsmInstruction("ST", register=draw(st.sampled_from(REGS))))
        elif pick == 6:
            ins.append(AsmInstruction("LDi", register="c", value=draw(st.integers(-10, 10))))
        elif pick == 7:
            ins.append(AsmInstruction("ADDi", register="c", value=draw(st.integers(-10, 10))))
        elif pick == 8:
            name = f"L{len(labels)}"
            labels.append(name)
            ins.append(AsmInstruction("label", label=name))
        elif labels:
            rhs = draw(st.one_of(st.integers(-3, 3), st.sampled_from(REGS)))
            ins.append(AsmInstruction("BR", register="c", cmp=draw(st.sampled_from(COMPARISONS)), value=rhs,
                                      label=draw(st.sampled_from(labels))))
    return Program(ins, metadata={"compiler": "test"})


@settings(max_examples=100, deadline=None)
@given(programs())
def test_assembly_round_trip(program):
    assert assemble(disassemble(program)) == program


def test_emit_round_trips_compiled_programs():
    rng = np.random.default_rng(5)
    from circuit_gen import random_circuit

    for _ in range(20):
        native = compile_circuit(random_circuit(rng, 3, 10), CFG)
        program = emit(native)
        assert assemble(disassemble(program)) == program


# -- tomography -------------------------------------------------------------


def test_tomography_loop_shape():
    circuit = parse_circuit("qubits 3\nh q1\ncx q1 q2")
    spec = TomographySpec(1000, (1, 2))
    program = emit_tomography(compile_tomography(circuit, CFG, spec), spec)
    lines = disassemble(program, header=False).splitlines()
    assert lines[:3] == ["LDi 0 RepetitionCounter", "LDi 1000 RepetitionAmount", "label Repeat"]
    assert lines[-4:] == ["ST MeasureResultRegister0", "ST MeasureResultRegister1", "ADDi RepetitionCounter 1",
                          "BR RepetitionCounter < RepetitionAmount Repeat"]


def test_single_repetition_runs_once():
    circuit = parse_circuit("qubits 2\nx q1")
    spec = TomographySpec(1, (1,))
    program = emit_tomography(compile_tomography(circuit, CFG, spec), spec)
    result = run(program, shots=1, seed=0)
    assert result.memory == [[-1]]
    label = program.labels()["Repeat"]
    assert result.pc_counts[label] == 1


def test_tomography_errors():
    with pytest.raises(ValueError):
        TomographySpec(0, (1,)).check()
    with pytest.raises(ValueError):
        TomographySpec(5, (9,)).check(CFG)
    bare = compile_circuit(parse_circuit("qubits 2\nx q1"), CFG)
    with pytest.raises(AssemblyError):
        emit_tomography(bare, TomographySpec(5, (1,)))


def test_empty_tomography_skeleton():
    spec = TomographySpec(10)
    program = emit_tomography(compile_tomography(parse_circuit("qubits 1"), TopologyConfig(1, 1), spec), spec)
    assert [i.mnemonic for i in program.instructions] == ["LDi", "LDi", "label", "ADDi", "BR"]
    assert run_exact(program).pc_counts[-1] == 10


def test_label_freshness_with_many_conditions():
    text = "qubits 2\ncreg m\nmeasure q0 -> m\n" + "\n".join(f"rx q1 0.{k + 1} if m < 0" for k in range(6))
    program = emit(compile_circuit(parse_circuit(text), CFG))
    labels = [i.label for i in program.instructions if i.mnemonic == "label"]
    assert len(labels) == len(set(labels)) == 6


def test_empty_native_circuit():
    program = emit(NativeCircuit(CFG, []))
    assert program.instructions == []

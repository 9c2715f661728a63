"""Random source circuits shared by the property and acceptance tests."""

from __future__ import annotations

import math

import numpy as np

from nvqc.circuit_ir import COMPARISONS, Circuit, Condition, GateKind, Instruction

ONE_QUBIT = [GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG,
             GateKind.RX, GateKind.RY, GateKind.RZ]
TWO_QUBIT = [GateKind.CX, GateKind.CZ, GateKind.CROT, GateKind.SWAP]
REGISTERS = ["m0", "m1"]


def random_circuit(rng: np.random.Generator, num_qubits: int = 3, length: int = 8,
                   conditions: bool = True, inits: bool = True) -> Circuit:
    """Mixed unitary/measure/init circuit; every qubit is measured at the end."""
    circuit = Circuit(num_qubits, [], list(REGISTERS) + [f"r{q}" for q in range(num_qubits)])
    for _ in range(length):
        roll = rng.random()
        if roll < 0.12:
            q = int(rng.integers(num_qubits))
            circuit.instructions.append(Instruction(GateKind.MEASURE, (q,), register=str(rng.choice(REGISTERS))))
            continue
        if roll < 0.2 and inits:
            circuit.instructions.append(Instruction(GateKind.INIT, (int(rng.integers(num_qubits)),)))
            continue
        if roll < 0.55 and num_qubits > 1:
            kind = TWO_QUBIT[rng.integers(len(TWO_QUBIT))]
            qubits = tuple(int(q) for q in rng.choice(num_qubits, 2, replace=False))
        else:
            kind = ONE_QUBIT[rng.integers(len(ONE_QUBIT))]
            qubits = (int(rng.integers(num_qubits)),)
        angle = float(rng.uniform(-math.pi, math.pi)) if kind.parameterized else None
        cond = None
        if conditions and rng.random() < 0.25:
            cond = Condition(str(rng.choice(REGISTERS)), COMPARISONS[rng.integers(len(COMPARISONS))],
                             int(rng.integers(-1, 2)))
        circuit.instructions.append(Instruction(kind, qubits, angle, cond))
    for q in range(num_qubits):
        circuit.instructions.append(Instruction(GateKind.MEASURE, (q,), register=f"r{q}"))
    return circuit

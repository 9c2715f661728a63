"""Compiler and noisy simulator for NV-center quantum processors."""

__version__ = "0.1.0"

from .circuit_ir import Circuit, Condition, GateKind, Instruction, parse_circuit, serialize_circuit, validate  # noqa: E402
from .topology import QubitRole, TopologyConfig, electron_of, node_of, qubit_role  # noqa: E402

__all__ = [
    "Circuit", "Condition", "GateKind", "Instruction", "QubitRole", "TopologyConfig",
    "electron_of", "node_of", "parse_circuit", "qubit_role", "serialize_circuit", "validate",
]

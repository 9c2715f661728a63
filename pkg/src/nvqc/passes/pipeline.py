"""Fixed-order compilation pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..circuit_ir import Circuit, GateKind, Instruction
from ..errors import PipelineError
from ..codegen import TomographySpec
from ..native import PLACEHOLDERS, NativeCircuit
from ..topology import TopologyConfig
from .control import select_carbon_control
from .diagnostics import DiagnosticsConfig, insert_diagnostics
from .liveness import analyze_electron_liveness
from .lower import lower_to_native
from .routing import route_init_measure
from .swaps import select_swaps


@dataclass(frozen=True)
class PipelineOptions:
    direct_control: bool = True
    partial_swaps: bool = True
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)

    @classmethod
    def baseline(cls, diagnostics: DiagnosticsConfig | None = None) -> "PipelineOptions":
        """DDrf and full swaps everywhere: the hardware-generic reference output."""
        return cls(False, False, diagnostics or DiagnosticsConfig())


def compile_circuit(circuit: Circuit, config: TopologyConfig,
                    options: PipelineOptions = PipelineOptions()) -> NativeCircuit:
    native = lower_to_native(circuit, config)
    native = route_init_measure(native)
    liveness = analyze_electron_liveness(native)
    native = select_carbon_control(native, liveness, options.direct_control)
    native = select_swaps(native, liveness, options.partial_swaps)
    if any(op.kind in PLACEHOLDERS for op in native.ops):
        raise PipelineError("placeholders left after swap selection")
    return insert_diagnostics(native, options.diagnostics)


def tomography_circuit(circuit: Circuit, spec: TomographySpec) -> Circuit:
    """Source body for one tomography round: reset every touched qubit, run, measure."""
    touched = sorted({q for inst in circuit.instructions for q in inst.qubits} | set(spec.measured_qubits))
    num_qubits = max([circuit.num_qubits, *(q + 1 for q in spec.measured_qubits)])
    registers = list(circuit.classical_registers) + [r for r in spec.registers if r not in circuit.classical_registers]
    body = Circuit(num_qubits, [], registers)
    for q in touched:
        body.append(GateKind.INIT, [q])
    body.instructions += circuit.instructions
    for q, reg in zip(spec.measured_qubits, spec.registers):
        body.instructions.append(Instruction(GateKind.MEASURE, (q,), register=reg))
    return body


def compile_tomography(circuit: Circuit, config: TopologyConfig, spec: TomographySpec,
                       options: PipelineOptions = PipelineOptions()) -> NativeCircuit:
    spec.check(config)
    return compile_circuit(tomography_circuit(circuit, spec), config, options)

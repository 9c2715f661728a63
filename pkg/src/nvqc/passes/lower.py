"""Lowering of abstract instructions to NV native operations.

Measure and Init come out as electron-style ops on whatever qubit they name;
``route_init_measure`` rewrites the carbon ones.
"""

from __future__ import annotations

import itertools
import math

from .. import native as nv
from ..circuit_ir import Circuit, Condition, GateKind, Instruction, validate
from ..errors import CompileError, UnroutableError
from ..gates import axis_rotation, source_matrix
from ..native import NativeCircuit, NativeOp
from ..topology import TopologyConfig, is_electron, node_electron, node_of

PI = math.pi


def _single_qubit(q: int, u, origin: str, config: TopologyConfig) -> list[NativeOp]:
    rot = axis_rotation(u)
    if is_electron(q, config):
        if rot is None:
            return nv.electron_gate(q, u)
        axis, theta = rot
        op = nv.rz_e(q, theta) if axis == "z" else nv.rot_e(q, axis, theta)
        return nv.elide([op])
    if rot is not None and rot[0] == "z":
        return nv.elide([nv.rz_c(q, rot[1])])
    return [nv.carbon_rot(q, u, origin)]


def _local_pair(kind: GateKind, a: int, b: int, angle, config, index) -> list[NativeOp]:
    """Two-qubit gate inside one node where one operand is the electron."""
    if is_electron(a, config):
        e, c, electron_first = a, b, True
    else:
        e, c, electron_first = b, a, False
    if kind is GateKind.CX:
        return nv.cx_electron_to_carbon(e, c) if electron_first else nv.cx_carbon_to_electron(c, e)
    if kind is GateKind.CZ:
        return nv.cz_electron_carbon(e, c)
    if kind is GateKind.CROT:
        if electron_first:
            return nv.elide([nv.crot(e, c, "x", angle)])
        return nv.conditional_x_carbon_to_electron(c, e, angle)
    if kind is GateKind.SWAP:
        return nv.full_swap(e, c)
    raise UnroutableError(f"no local lowering for {kind.value}", index)


def _carbon_pair(kind, a, b, angle, config, index) -> list[NativeOp]:
    """Both operands are carbons of one node: park ``a`` on the electron, act, restore."""
    e = node_electron(a, config)
    park = nv.full_swap(e, a)
    if kind is GateKind.SWAP:
        middle = nv.full_swap(e, b)
    else:
        middle = _local_pair(kind, e, b, angle, config, index)
    ops = park + middle + nv.full_swap(e, a)
    return [op.tagged(transparent=True) for op in ops]


class _Lowerer:
    def __init__(self, circuit: Circuit, config: TopologyConfig):
        self.circuit = circuit
        self.config = config
        self.teleports = itertools.count()
        self.registers = list(circuit.classical_registers)
        self.known = {e: "zero" for e in config.electrons()}

    def run(self) -> NativeCircuit:
        ops: list[NativeOp] = []
        for index, inst in enumerate(self.circuit.instructions):
            produced = self.instruction(index, inst)
            self.track(inst)
            ops.extend(op.tagged(group=index, origin=inst.kind.value,
                                 condition=op.condition or inst.condition)
                       for op in produced)
        return NativeCircuit(self.config, ops, self.registers)

    def instruction(self, index: int, inst: Instruction) -> list[NativeOp]:
        kind, qs = inst.kind, inst.qubits
        if kind is GateKind.MEASURE:
            return [nv.meas_e(qs[0], inst.register)]
        if kind is GateKind.INIT:
            if inst.condition is not None:
                raise CompileError("conditional initialization is not supported", index)
            return [nv.init_e(qs[0])]
        if kind.arity == 1:
            if kind is GateKind.I:
                return []
            return _single_qubit(qs[0], source_matrix(kind.value, inst.angle), kind.value, self.config)
        a, b = qs
        if node_of(a, self.config) != node_of(b, self.config):
            if inst.condition is not None:
                raise CompileError("conditional inter-node gates are not supported", index)
            return self.remote(kind, a, b, inst.angle, index) + self.electron_restores(index, a, b)
        if is_electron(a, self.config) or is_electron(b, self.config):
            return _local_pair(kind, a, b, inst.angle, self.config, index)
        return _carbon_pair(kind, a, b, inst.angle, self.config, index)

    # -- inter-node -----------------------------------------------------------

    def is_remote(self, inst: Instruction) -> bool:
        return inst.kind.arity == 2 and node_of(inst.qubits[0], self.config) != node_of(inst.qubits[1], self.config)

    def track(self, inst: Instruction) -> None:
        """Follow what is known about each electron's source-level state."""
        if inst.kind is GateKind.MEASURE:
            for e, known in self.known.items():
                if known == ("reg", inst.register):
                    self.known[e] = None
        if self.is_remote(inst):
            return
        for q in inst.qubits:
            if q in self.known:
                if inst.kind is GateKind.MEASURE:
                    self.known[q] = ("reg", inst.register)
                elif inst.kind is GateKind.INIT:
                    self.known[q] = "zero"
                else:
                    self.known[q] = None

    def needed_later(self, index: int, e: int) -> bool:
        for inst in self.circuit.instructions[index + 1:]:
            if e in inst.qubits and not self.is_remote(inst):
                return inst.kind is not GateKind.INIT
        return False

    def electron_restores(self, index: int, a: int, b: int) -> list[NativeOp]:
        """The Bell pair overwrites both electrons; put back any state a later gate still reads."""
        ops = []
        for e in (node_electron(a, self.config), node_electron(b, self.config)):
            if not self.needed_later(index, e):
                continue
            known = self.known[e]
            if known is None:
                raise UnroutableError(f"electron q{e} holds live state across an inter-node gate", index)
            ops += nv.restore_electron(e, None if known == "zero" else known[1])
        return ops

    def remote(self, kind: GateKind, a: int, b: int, angle, index) -> list[NativeOp]:
        if kind is GateKind.CX:
            return self.teleported_cx(a, b, index)
        if kind is GateKind.CZ:
            return self.local("h", [b]) + self.teleported_cx(a, b, index) + self.local("h", [b])
        if kind is GateKind.CROT:
            return (self.local("h", [b]) + self.teleported_cx(a, b, index) + self.local("rz", [b], angle)
                    + self.teleported_cx(a, b, index) + self.local("h", [b]))
        if kind is GateKind.SWAP:
            return self.teleported_cx(a, b, index) + self.teleported_cx(b, a, index) + self.teleported_cx(a, b, index)
        raise UnroutableError(f"no inter-node lowering for {kind.value}", index)

    def local(self, name: str, qubits, angle=None) -> list[NativeOp]:
        return _single_qubit(qubits[0], source_matrix(name, angle), name, self.config)

    def teleported_cx(self, a: int, b: int, index) -> list[NativeOp]:
        """CX between nodes through one shared Bell pair, two measurements and two corrections."""
        ea, eb = node_electron(a, self.config), node_electron(b, self.config)
        if a == ea or b == eb:
            raise UnroutableError("inter-node CX needs both operands on carbons; the electrons carry the Bell pair", index)
        k = next(self.teleports)
        reg_a, reg_b = f"_tc{k}a", f"_tc{k}b"
        self.registers += [reg_a, reg_b]
        flip = nv.rot_e(eb, "x", PI).tagged(condition=_negative(reg_a))
        phase = nv.rz_c(a, PI).tagged(condition=_negative(reg_b))
        return ([nv.entangle(ea, eb)]
                + nv.cx_carbon_to_electron(a, ea)
                + [nv.meas_e(ea, reg_a), flip]
                + nv.cx_electron_to_carbon(eb, b)
                + nv.hadamard_e(eb)
                + [nv.meas_e(eb, reg_b), phase])


def _negative(register: str) -> Condition:
    return Condition(register, "<", 0)


def lower_to_native(circuit: Circuit, config: TopologyConfig) -> NativeCircuit:
    problems = validate(circuit, config)
    if problems:
        first = problems[0]
        raise CompileError(f"{first.kind}: {first.message}", first.index)
    return _Lowerer(circuit, config).run()

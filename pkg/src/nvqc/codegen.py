"""Assembly emission, text format, and the repetition loop used for tomography.

Text format, one instruction per line, ``#`` comments, ``#@`` header pragmas::

    qgatee q0 x 1570796          electron pulse (or z frame update)
    qgatec q0 q1 x 3141593       carbon turn when the electron is |1>
    qgatec q1 z 1570796          carbon frame update (electron implicit)
    qgatedir q0 q1 y 785398      direct RF drive
    crot q0 q1 x 1570796         conditional +/- carbon rotation
    inite q0 | meas q0 REG | entangle q0 q5 | larmor_e ... crc
    LDi IMM REG | ST REG | ADDi REG IMM | BR REG CMP (IMM|REG) LABEL | label NAME

Angles are written as integer microradians.  In memory an :class:`Angle`
keeps the exact float next to its microradian value; equality looks only at
the microradians, so text round trips are exact while freshly compiled
programs simulate at full precision.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from . import __version__
from .circuit_ir import COMPARISONS, Condition
from .durations import DEFAULT_DURATIONS, DIAGNOSTIC_MNEMONICS, DurationTable
from .errors import AssemblyError
from .native import PLACEHOLDERS, NativeCircuit, NativeOp, OpKind
from .topology import TopologyConfig

MICRO = 1_000_000
FORMAT_VERSION = "1"

QUANTUM_MNEMONICS = ("qgatee", "qgatec", "qgatedir", "crot", "inite", "meas", "entangle") + DIAGNOSTIC_MNEMONICS
CLASSICAL_MNEMONICS = ("LDi", "ST", "ADDi", "BR", "label")
MNEMONICS = QUANTUM_MNEMONICS + CLASSICAL_MNEMONICS

INVERTED = {"<": ">=", ">=": "<", "<=": ">", ">": "<=", "==": "!=", "!=": "=="}

RESULT_REGISTER = "MeasureResultRegister{}"
COUNTER, AMOUNT, LOOP_LABEL = "RepetitionCounter", "RepetitionAmount", "Repeat"


@dataclass(frozen=True)
class Angle:
    micro: int
    exact: float = field(default=None, compare=False)

    def __post_init__(self):
        if self.exact is None:
            object.__setattr__(self, "exact", self.micro / MICRO)

    @classmethod
    def of(cls, radians: float) -> "Angle":
        return cls(round(radians * MICRO), float(radians))

    @property
    def radians(self) -> float:
        return self.exact


@dataclass(frozen=True)
class AsmInstruction:
    mnemonic: str
    qubits: tuple[int, ...] = ()
    axis: str | None = None
    angle: Angle | None = None
    register: str | None = None
    value: int | str | None = None
    cmp: str | None = None
    label: str | None = None

    @property
    def is_quantum(self) -> bool:
        return self.mnemonic in QUANTUM_MNEMONICS

    @property
    def is_frame(self) -> bool:
        return self.axis == "z" and self.mnemonic in ("qgatee", "qgatec")

    def text(self) -> str:
        m = self.mnemonic
        qs = [f"q{q}" for q in self.qubits]
        if m in ("qgatee", "qgatec", "qgatedir", "crot"):
            return " ".join([m, *qs, self.axis, str(self.angle.micro)])
        if m == "meas":
            return f"meas {qs[0]} {self.register}"
        if m in ("inite", "entangle") or m in DIAGNOSTIC_MNEMONICS:
            return " ".join([m, *qs])
        if m == "LDi":
            return f"LDi {self.value} {self.register}"
        if m == "ST":
            return f"ST {self.register}"
        if m == "ADDi":
            return f"ADDi {self.register} {self.value}"
        if m == "BR":
            return f"BR {self.register} {self.cmp} {self.value} {self.label}"
        if m == "label":
            return f"label {self.label}"
        raise AssemblyError(f"unknown mnemonic {m!r}")


@dataclass
class Program:
    instructions: list[AsmInstruction] = field(default_factory=list)
    registers: list[str] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name in _referenced_registers(self.instructions):
            if name not in self.registers:
                self.registers.append(name)

    def labels(self) -> dict[str, int]:
        return {ins.label: i for i, ins in enumerate(self.instructions) if ins.mnemonic == "label"}

    def qubits(self) -> list[int]:
        return sorted({q for ins in self.instructions for q in ins.qubits})

    def validate(self) -> None:
        seen = set()
        for ins in self.instructions:
            if ins.mnemonic == "label":
                if ins.label in seen:
                    raise AssemblyError(f"duplicate label {ins.label!r}")
                seen.add(ins.label)
        results = {ins.register for ins in self.instructions if ins.mnemonic == "meas"}
        for ins in self.instructions:
            if ins.mnemonic == "BR" and ins.label not in seen:
                raise AssemblyError(f"unresolved label {ins.label!r}")
            if ins.mnemonic == "ST" and ins.register not in results:
                raise AssemblyError(f"ST of {ins.register!r}, which no measurement writes")


def _referenced_registers(instructions):
    for ins in instructions:
        if ins.register is not None:
            yield ins.register
        if ins.mnemonic == "BR" and isinstance(ins.value, str):
            yield ins.value


# ---------------------------------------------------------------------------
# text


def disassemble(program: Program, header: bool = True) -> str:
    lines = []
    if header:
        lines.append(f"#@ nvqc-asm {FORMAT_VERSION}")
        for key in sorted(program.metadata):
            lines.append(f"#@ {key} {program.metadata[key]}")
        lines.extend(f"#@ creg {name}" for name in program.registers)
    lines.extend(ins.text() for ins in program.instructions)
    return "\n".join(lines) + "\n"


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_QUBIT = re.compile(r"q(\d{1,9})\Z", re.ASCII)
_INT = re.compile(r"[+-]?\d{1,18}\Z", re.ASCII)


def _qubit(tok, line):
    m = _QUBIT.match(tok)
    if not m:
        raise AssemblyError(f"malformed qubit operand {tok!r}", line)
    return int(m.group(1))


def _int(tok, line):
    if not _INT.match(tok):
        raise AssemblyError(f"malformed integer {tok!r}", line)
    return int(tok)


def _name(tok, line):
    if not _IDENT.match(tok):
        raise AssemblyError(f"malformed name {tok!r}", line)
    return tok


def _axis(tok, line, allowed=("x", "y", "z")):
    if tok not in allowed:
        raise AssemblyError(f"axis must be one of {allowed}, got {tok!r}", line)
    return tok


def _arity(toks, n, line):
    if len(toks) != n + 1:
        raise AssemblyError(f"{toks[0]} takes {n} operand(s)", line)


def _parse_line(toks: list[str], line: int) -> AsmInstruction:
    m = toks[0]
    if m == "qgatee":
        _arity(toks, 3, line)
        return AsmInstruction(m, (_qubit(toks[1], line),), _axis(toks[2], line), Angle(_int(toks[3], line)))
    if m == "qgatec" and len(toks) == 4:
        return AsmInstruction(m, (_qubit(toks[1], line),), _axis(toks[2], line, ("z",)), Angle(_int(toks[3], line)))
    if m in ("qgatec", "qgatedir", "crot"):
        _arity(toks, 4, line)
        qs = (_qubit(toks[1], line), _qubit(toks[2], line))
        return AsmInstruction(m, qs, _axis(toks[3], line, ("x", "y")), Angle(_int(toks[4], line)))
    if m == "inite":
        _arity(toks, 1, line)
        return AsmInstruction(m, (_qubit(toks[1], line),))
    if m == "meas":
        _arity(toks, 2, line)
        return AsmInstruction(m, (_qubit(toks[1], line),), register=_name(toks[2], line))
    if m == "entangle":
        _arity(toks, 2, line)
        return AsmInstruction(m, (_qubit(toks[1], line), _qubit(toks[2], line)))
    if m in DIAGNOSTIC_MNEMONICS:
        _arity(toks, 0, line)
        return AsmInstruction(m)
    if m == "LDi":
        _arity(toks, 2, line)
        return AsmInstruction(m, value=_int(toks[1], line), register=_name(toks[2], line))
    if m == "ST":
        _arity(toks, 1, line)
        return AsmInstruction(m, register=_name(toks[1], line))
    if m == "ADDi":
        _arity(toks, 2, line)
        return AsmInstruction(m, register=_name(toks[1], line), value=_int(toks[2], line))
    if m == "BR":
        _arity(toks, 4, line)
        if toks[2] not in COMPARISONS:
            raise AssemblyError(f"unknown comparison {toks[2]!r}", line)
        rhs = _int(toks[3], line) if _INT.match(toks[3]) else _name(toks[3], line)
        return AsmInstruction(m, register=_name(toks[1], line), cmp=toks[2], value=rhs, label=_name(toks[4], line))
    if m == "label":
        _arity(toks, 1, line)
        return AsmInstruction(m, label=_name(toks[1], line))
    raise AssemblyError(f"unknown mnemonic {m!r}", line)


def assemble(text: str) -> Program:
    instructions, registers, metadata = [], [], {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#@"):
            parts = stripped[2:].split(None, 1)
            if not parts:
                continue
            key, rest = parts[0], (parts[1] if len(parts) > 1 else "")
            if key == "creg":
                registers.append(_name(rest.strip(), lineno))
            elif key != "nvqc-asm":
                metadata[key] = rest.strip()
            continue
        toks = raw.split("#", 1)[0].split()
        if toks:
            instructions.append(_parse_line(toks, lineno))
    program = Program(instructions, registers, metadata)
    program.validate()
    return program


# ---------------------------------------------------------------------------
# emission


def native_to_asm(op: NativeOp) -> AsmInstruction:
    if op.kind in PLACEHOLDERS:
        raise AssemblyError(f"unresolved placeholder {op.kind.value}; the pass pipeline did not finish")
    k = op.kind
    if k is OpKind.DIAG:
        return AsmInstruction(op.purpose)
    if k is OpKind.INIT_E:
        return AsmInstruction("inite", op.qubits)
    if k is OpKind.MEAS_E:
        return AsmInstruction("meas", op.qubits, register=op.register)
    if k is OpKind.ENTANGLE:
        return AsmInstruction("entangle", op.qubits)
    return AsmInstruction(op.mnemonic, op.qubits, op.effective_axis, Angle.of(op.angle))


def emit_conditional(body: list[AsmInstruction], condition: Condition, labels) -> list[AsmInstruction]:
    """Guard ``body`` so it runs exactly when ``condition`` holds.

    ``labels`` is an iterator of fresh label names.
    """
    skip = next(labels)
    branch = AsmInstruction("BR", register=condition.register, cmp=INVERTED[condition.cmp],
                            value=condition.threshold, label=skip)
    return [branch, *body, AsmInstruction("label", label=skip)]


def _fresh_labels(taken=()):
    return (f"skip{i}" for i in itertools.count() if f"skip{i}" not in taken)


def _metadata(config: TopologyConfig | None, durations: DurationTable) -> dict[str, str]:
    meta = {"durations": durations.digest(), "compiler": f"nvqc-{__version__}"}
    if config is not None:
        meta["topology"] = f"{config.num_nodes} {config.qubits_per_node}"
    return meta


def _emit_body(ops: list[NativeOp], labels) -> list[AsmInstruction]:
    out: list[AsmInstruction] = []
    i = 0
    while i < len(ops):
        op = ops[i]
        if op.condition is None:
            out.append(native_to_asm(op))
            i += 1
            continue
        j = i
        while j < len(ops) and ops[j].condition == op.condition and ops[j].group == op.group:
            j += 1
        out += emit_conditional([native_to_asm(o) for o in ops[i:j]], op.condition, labels)
        i = j
    return out


def emit(native: NativeCircuit, durations: DurationTable = DEFAULT_DURATIONS) -> Program:
    body = _emit_body(native.ops, _fresh_labels())
    program = Program(body, list(native.classical_registers), _metadata(native.config, durations))
    program.validate()
    return program


@dataclass(frozen=True)
class TomographySpec:
    repetitions: int
    measured_qubits: tuple[int, ...] = ()

    def check(self, config: TopologyConfig | None = None) -> None:
        if self.repetitions < 1:
            raise ValueError("tomography needs at least one repetition")
        if config is not None:
            for q in self.measured_qubits:
                if not 0 <= q < config.total_qubits:
                    raise ValueError(f"measured qubit q{q} outside topology")

    @property
    def registers(self) -> list[str]:
        return [RESULT_REGISTER.format(k) for k in range(len(self.measured_qubits))]


def emit_tomography(native: NativeCircuit, spec: TomographySpec,
                    durations: DurationTable = DEFAULT_DURATIONS) -> Program:
    """Wrap a compiled body in a counted loop that stores every result register each round.

    The body must already measure each qubit of ``spec`` into its
    ``MeasureResultRegisterK``; :func:`nvqc.passes.compile_tomography` builds
    such a body.
    """
    spec.check(native.config)
    written = {op.register for op in native.ops if op.kind is OpKind.MEAS_E}
    missing = [r for r in spec.registers if r not in written]
    if missing:
        raise AssemblyError(f"body does not measure into {', '.join(missing)}")
    head = [
        AsmInstruction("LDi", value=0, register=COUNTER),
        AsmInstruction("LDi", value=spec.repetitions, register=AMOUNT),
        AsmInstruction("label", label=LOOP_LABEL),
    ]
    body = _emit_body(native.ops, _fresh_labels({LOOP_LABEL}))
    tail = [AsmInstruction("ST", register=r) for r in spec.registers]
    tail += [
        AsmInstruction("ADDi", register=COUNTER, value=1),
        AsmInstruction("BR", register=COUNTER, cmp="<", value=AMOUNT, label=LOOP_LABEL),
    ]
    program = Program(head + body + tail, [COUNTER, AMOUNT] + list(native.classical_registers),
                      _metadata(native.config, durations))
    program.validate()
    return program

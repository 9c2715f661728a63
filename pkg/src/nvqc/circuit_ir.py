"""Hardware-agnostic circuit representation and its line-oriented text format.

Grammar (one statement per line, ``#`` starts a comment, mnemonics are
case-insensitive)::

    qubits N
    creg NAME
    <gate> q<i> [q<j>] [<angle>] [if NAME CMP INT]
    measure q<i> -> NAME

Angles may be plain numbers or small arithmetic expressions over ``pi``.
"""

from __future__ import annotations

import ast
import enum
import math
import operator
import re
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class GateKind(str, enum.Enum):
    I = "i"
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    CROT = "crot"
    SWAP = "swap"
    MEASURE = "measure"
    INIT = "init"

    @property
    def arity(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def parameterized(self) -> bool:
        return self in _PARAMETERIZED


_TWO_QUBIT = frozenset({GateKind.CX, GateKind.CZ, GateKind.CROT, GateKind.SWAP})
_PARAMETERIZED = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CROT})

COMPARISONS = ("<", "<=", "==", "!=", ">=", ">")
_CMP_ALIASES = {"=": "==", "≤": "<=", "≥": ">=", "≠": "!="}

_CMP_FUNCS = {
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
    "!=": operator.ne,
    ">=": operator.ge,
    ">": operator.gt,
}


def compare(value: int, cmp: str, threshold: int) -> bool:
    return _CMP_FUNCS[cmp](value, threshold)


def normalize_angle(theta: float) -> float:
    """Map ``theta`` into (-2pi, 2pi]; rotations have period 4pi so this is exact."""
    t = math.fmod(theta, FOUR_PI)
    if t <= -TWO_PI:
        t += FOUR_PI
    elif t > TWO_PI:
        t -= FOUR_PI
    return t


@dataclass(frozen=True)
class Condition:
    register: str
    cmp: str
    threshold: int

    def __post_init__(self):
        if self.cmp not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.cmp!r}")

    def holds(self, value: int) -> bool:
        return compare(value, self.cmp, self.threshold)

    def __str__(self) -> str:
        return f"{self.register} {self.cmp} {self.threshold}"


@dataclass(frozen=True)
class Instruction:
    """One abstract instruction. ``register`` is the destination of a Measure."""

    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None
    condition: Condition | None = None
    register: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.angle is not None:
            object.__setattr__(self, "angle", normalize_angle(float(self.angle)))


@dataclass
class Circuit:
    num_qubits: int
    instructions: list[Instruction] = field(default_factory=list)
    classical_registers: list[str] = field(default_factory=list)

    def append(self, kind, qubits, angle=None, condition=None, register=None) -> Instruction:
        inst = Instruction(GateKind(kind), tuple(qubits), angle, condition, register)
        self.instructions.append(inst)
        return inst

    def __len__(self) -> int:
        return len(self.instructions)


class ParseError(ValueError):
    """Syntax or semantic error at a 1-based (line, column) position."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# angle expressions

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_angle(node):
    if isinstance(node, ast.Expression):
        return _eval_angle(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id.lower() == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_angle(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_angle(node.left), _eval_angle(node.right))
    raise ValueError("unsupported angle expression")


def parse_angle(text: str) -> float:
    try:
        value = _eval_angle(ast.parse(text, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, RecursionError, MemoryError, OverflowError) as exc:
        raise ValueError(f"bad angle {text!r}") from exc
    if not math.isfinite(value):
        raise ValueError(f"bad angle {text!r}")
    return value


# ---------------------------------------------------------------------------
# parser

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_QUBIT = re.compile(r"[qQ](\d{1,9})\Z", re.ASCII)
_INT = re.compile(r"[+-]?\d{1,18}\Z", re.ASCII)
_COUNT = re.compile(r"\d{1,6}\Z", re.ASCII)
_TOKEN = re.compile(r"\S+")
_RESERVED = frozenset({"if", "qubits", "creg"} | {k.value for k in GateKind})


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]


def _qubit(tok: str, col: int, lineno: int, nq: int) -> int:
    m = _QUBIT.match(tok)
    if not m:
        raise ParseError(f"expected qubit operand, got {tok!r}", lineno, col)
    q = int(m.group(1))
    if q >= nq:
        raise ParseError(f"qubit q{q} out of range (declared {nq})", lineno, col)
    return q


def _register(tok: str, col: int, lineno: int, declared: list[str]) -> str:
    if not _IDENT.match(tok):
        raise ParseError(f"bad register name {tok!r}", lineno, col)
    if tok not in declared:
        raise ParseError(f"undeclared register {tok!r}", lineno, col)
    return tok


def parse_circuit(text: str) -> Circuit:
    circuit: Circuit | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        head, col0 = toks[0]
        word = head.lower()
        if circuit is None:
            if word != "qubits":
                raise ParseError("expected 'qubits N' declaration first", lineno, col0)
            if len(toks) != 2 or not _COUNT.match(toks[1][0]):
                raise ParseError("'qubits' takes one integer below 10^6", lineno, col0)
            n = int(toks[1][0])
            if n < 1:
                raise ParseError("circuit needs at least one qubit", lineno, toks[1][1])
            circuit = Circuit(n)
            continue
        if word == "qubits":
            raise ParseError("duplicate 'qubits' declaration", lineno, col0)
        if word == "creg":
            if len(toks) != 2 or not _IDENT.match(toks[1][0]):
                raise ParseError("'creg' takes one register name", lineno, col0)
            name = toks[1][0]
            if name.lower() in _RESERVED:
                raise ParseError(f"{name!r} is a reserved word", lineno, toks[1][1])
            if name in circuit.classical_registers:
                raise ParseError(f"register {name!r} already declared", lineno, toks[1][1])
            circuit.classical_registers.append(name)
            continue
        try:
            kind = GateKind(word)
        except ValueError:
            raise ParseError(f"unknown gate {head!r}", lineno, col0) from None
        circuit.instructions.append(_parse_instruction(kind, toks, lineno, circuit))
    if circuit is None:
        raise ParseError("empty program: missing 'qubits N'", max(1, text.count("\n") + 1), 1)
    return circuit


def _parse_instruction(kind: GateKind, toks, lineno: int, circuit: Circuit) -> Instruction:
    rest = toks[1:]
    condition = None
    for i, (tok, col) in enumerate(rest):
        if tok.lower() == "if":
            cond_toks = rest[i + 1:]
            rest = rest[:i]
            if len(cond_toks) != 3:
                raise ParseError("condition must be 'if NAME CMP INT'", lineno, col)
            (reg, rcol), (cmp, ccol), (thr, tcol) = cond_toks
            reg = _register(reg, rcol, lineno, circuit.classical_registers)
            cmp = _CMP_ALIASES.get(cmp, cmp)
            if cmp not in COMPARISONS:
                raise ParseError(f"unknown comparison {cmp!r}", lineno, ccol)
            if not _INT.match(thr):
                raise ParseError(f"threshold must be an integer, got {thr!r}", lineno, tcol)
            condition = Condition(reg, cmp, int(thr))
            break
    last_col = toks[-1][1]
    if kind is GateKind.MEASURE:
        if condition is not None:
            raise ParseError("measurements cannot be conditioned", lineno, toks[0][1])
        if len(rest) != 3 or rest[1][0] != "->":
            raise ParseError("expected 'measure q<i> -> NAME'", lineno, toks[0][1])
        q = _qubit(rest[0][0], rest[0][1], lineno, circuit.num_qubits)
        reg = _register(rest[2][0], rest[2][1], lineno, circuit.classical_registers)
        return Instruction(kind, (q,), register=reg)

    nq = kind.arity
    if len(rest) < nq:
        raise ParseError(f"{kind.value} needs {nq} qubit operand(s)", lineno, last_col)
    qubits = tuple(_qubit(t, c, lineno, circuit.num_qubits) for t, c in rest[:nq])
    if nq == 2 and qubits[0] == qubits[1]:
        raise ParseError("two-qubit gate operands must differ", lineno, rest[1][1])
    extra = rest[nq:]
    angle = None
    if kind.parameterized:
        if len(extra) != 1:
            raise ParseError(f"{kind.value} takes exactly one angle", lineno, extra[1][1] if len(extra) > 1 else last_col)
        try:
            angle = parse_angle(extra[0][0])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, extra[0][1]) from None
    elif extra:
        raise ParseError(f"unexpected operand {extra[0][0]!r}", lineno, extra[0][1])
    return Instruction(kind, qubits, angle, condition)


# ---------------------------------------------------------------------------
# serializer


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.num_qubits}"]
    lines.extend(f"creg {name}" for name in circuit.classical_registers)
    for inst in circuit.instructions:
        qs = " ".join(f"q{q}" for q in inst.qubits)
        if inst.kind is GateKind.MEASURE:
            lines.append(f"measure {qs} -> {inst.register}")
            continue
        parts = [inst.kind.value, qs]
        if inst.angle is not None:
            parts.append(repr(inst.angle))
        if inst.condition is not None:
            parts.append(f"if {inst.condition}")
        lines.append(" ".join(parts))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    index: int | None
    message: str


def validate(circuit: Circuit, config=None) -> list[Diagnostic]:
    """Return every invariant violation; an empty list means the circuit is valid.

    ``config`` is an optional :class:`~nvqc.topology.TopologyConfig`.
    """
    out: list[Diagnostic] = []
    limit = circuit.num_qubits
    if config is not None:
        limit = min(limit, config.total_qubits)
        if circuit.num_qubits > config.total_qubits:
            out.append(Diagnostic("topology", None,
                                  f"circuit declares {circuit.num_qubits} qubits, topology holds {config.total_qubits}"))
    for i, inst in enumerate(circuit.instructions):
        if len(inst.qubits) != inst.kind.arity:
            out.append(Diagnostic("arity", i, f"{inst.kind.value} expects {inst.kind.arity} qubit(s)"))
        if len(set(inst.qubits)) != len(inst.qubits):
            out.append(Diagnostic("duplicate-operand", i, f"{inst.kind.value} repeats a qubit operand"))
        for q in inst.qubits:
            if q < 0 or q >= limit:
                out.append(Diagnostic("out-of-range", i, f"qubit q{q} outside 0..{limit - 1}"))
        if (inst.angle is not None) != inst.kind.parameterized:
            out.append(Diagnostic("angle", i, f"{inst.kind.value} angle presence mismatch"))
        if inst.kind is GateKind.MEASURE:
            if inst.register not in circuit.classical_registers:
                out.append(Diagnostic("register", i, f"measure targets undeclared register {inst.register!r}"))
            if inst.condition is not None:
                out.append(Diagnostic("condition", i, "measurements cannot be conditioned"))
        if inst.condition is not None and inst.condition.register not in circuit.classical_registers:
            out.append(Diagnostic("register", i, f"condition on undeclared register {inst.condition.register!r}"))
    return out

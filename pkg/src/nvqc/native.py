"""NV native operations and the pulse templates built from them.

Every template returns ops in time order.  The unitary each one realizes is
pinned down by tests against independently built reference matrices.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .circuit_ir import Condition
from .durations import DEFAULT_DURATIONS, DurationTable
from .gates import euler_zyz
from .topology import TopologyConfig

PI = math.pi
ELIDE_BELOW = 1e-12

_uids = itertools.count(1)


def fresh_uid() -> int:
    return next(_uids)


class OpKind(str, enum.Enum):
    ROT_E = "rot_e"            # electron x/y pulse
    RZ_E = "rz_e"              # electron frame update
    CROT = "crot"              # conditional +/- carbon rotation
    COND_ROT = "cond_rot"      # carbon rotation only when electron is |1>
    DIRECT_ROT = "direct_rot"  # RF drive with the electron parked in |1>
    RZ_C = "rz_c"              # carbon frame update
    INIT_E = "init_e"
    MEAS_E = "meas_e"
    ENTANGLE = "entangle"
    DIAG = "diag"
    CARBON_ROT = "carbon_rot"  # placeholder, resolved by carbon-control selection
    SWAP = "swap"              # placeholder, resolved by swap selection


PLACEHOLDERS = frozenset({OpKind.CARBON_ROT, OpKind.SWAP})
CARBON_BLOCKS = frozenset({OpKind.CROT, OpKind.COND_ROT})

MNEMONIC = {
    OpKind.ROT_E: "qgatee",
    OpKind.RZ_E: "qgatee",
    OpKind.CROT: "crot",
    OpKind.COND_ROT: "qgatec",
    OpKind.DIRECT_ROT: "qgatedir",
    OpKind.RZ_C: "qgatec",
    OpKind.INIT_E: "inite",
    OpKind.MEAS_E: "meas",
    OpKind.ENTANGLE: "entangle",
}


@dataclass(frozen=True)
class NativeOp:
    """One native (or placeholder) operation.

    ``group`` is the index of the source instruction the op came from and
    ``origin`` its gate kind; basis detection reads both.  ``transparent`` ops
    leave the electron's logical state intact, so liveness ignores them.
    """

    kind: OpKind
    qubits: tuple[int, ...]
    axis: str | None = None
    angle: float | None = None
    register: str | None = None
    condition: Condition | None = None
    group: int = -1
    origin: str = ""
    transparent: bool = False
    purpose: str | None = None
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)
    uid: int = field(default_factory=fresh_uid, compare=False)

    @property
    def electron(self) -> int | None:
        if self.kind in (OpKind.RZ_C, OpKind.CARBON_ROT, OpKind.DIAG):
            return None
        return self.qubits[0] if self.qubits else None

    @property
    def carbon(self) -> int | None:
        if self.kind in (OpKind.RZ_C, OpKind.CARBON_ROT):
            return self.qubits[0]
        if self.kind in (OpKind.CROT, OpKind.COND_ROT, OpKind.DIRECT_ROT, OpKind.SWAP):
            return self.qubits[1]
        return None

    @property
    def mnemonic(self) -> str:
        if self.kind is OpKind.DIAG:
            return self.purpose
        return MNEMONIC[self.kind]

    @property
    def effective_axis(self) -> str | None:
        return "z" if self.kind in (OpKind.RZ_E, OpKind.RZ_C) else self.axis

    def tagged(self, **changes) -> "NativeOp":
        return replace(self, uid=fresh_uid(), **changes)


@dataclass
class NativeCircuit:
    config: TopologyConfig
    ops: list[NativeOp] = field(default_factory=list)
    classical_registers: list[str] = field(default_factory=list)

    def with_ops(self, ops: Iterable[NativeOp]) -> "NativeCircuit":
        ops = list(ops)
        regs = list(self.classical_registers)
        for op in ops:
            for name in (op.register, op.condition.register if op.condition else None):
                if name is not None and name not in regs:
                    regs.append(name)
        return NativeCircuit(self.config, list(ops), regs)

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)


# ---------------------------------------------------------------------------
# single-op constructors


def rot_e(e, axis, theta):
    return NativeOp(OpKind.ROT_E, (e,), axis, theta)


def rz_e(e, theta):
    return NativeOp(OpKind.RZ_E, (e,), "z", theta)


def crot(e, c, axis, theta):
    return NativeOp(OpKind.CROT, (e, c), axis, theta)


def cond_rot(e, c, axis, theta):
    return NativeOp(OpKind.COND_ROT, (e, c), axis, theta)


def direct_rot(e, c, axis, theta):
    return NativeOp(OpKind.DIRECT_ROT, (e, c), axis, theta)


def rz_c(c, theta):
    return NativeOp(OpKind.RZ_C, (c,), "z", theta)


def init_e(e):
    return NativeOp(OpKind.INIT_E, (e,))


def meas_e(e, register):
    return NativeOp(OpKind.MEAS_E, (e,), register=register)


def entangle(e1, e2):
    return NativeOp(OpKind.ENTANGLE, (e1, e2))


def diagnostic(name):
    return NativeOp(OpKind.DIAG, (), purpose=name)


def carbon_rot(c, matrix, origin=""):
    return NativeOp(OpKind.CARBON_ROT, (c,), matrix=np.asarray(matrix, dtype=complex), origin=origin)


def swap_placeholder(e, c, purpose):
    return NativeOp(OpKind.SWAP, (e, c), purpose=purpose)


def elide(ops: Iterable[NativeOp]) -> list[NativeOp]:
    """Drop rotations whose angle is numerically zero."""
    return [op for op in ops if op.angle is None or abs(op.angle) >= ELIDE_BELOW]


# ---------------------------------------------------------------------------
# templates


def electron_gate(e: int, u: np.ndarray) -> list[NativeOp]:
    """Z-Y-Z lowering with the Z parts as frame updates."""
    a, b, c = euler_zyz(u)
    return elide([rz_e(e, c), rot_e(e, "y", b), rz_e(e, a)])


def hadamard_e(e):
    return [rz_e(e, PI), rot_e(e, "y", PI / 2)]


def cx_electron_to_carbon(e, c):
    return [cond_rot(e, c, "x", PI), rz_e(e, PI / 2)]


def cz_electron_carbon(e, c):
    return [cond_rot(e, c, "x", PI), rz_c(c, PI / 2), cond_rot(e, c, "x", PI),
            rz_c(c, -PI / 2), rz_e(e, PI / 2)]


def cx_carbon_to_electron(c, e):
    """Control direction reversed by conjugating the target with Hadamards."""
    return hadamard_e(e) + cz_electron_carbon(e, c) + hadamard_e(e)


def zz_interaction(e, c, theta):
    """exp(-i theta/2 Z(x)Z)."""
    return elide([cond_rot(e, c, "x", PI), rz_c(c, theta), cond_rot(e, c, "x", PI), rz_e(e, PI)])


def conditional_x_carbon_to_electron(c, e, theta):
    """exp(-i theta/2 Z_carbon X_electron)."""
    return hadamard_e(e) + zz_interaction(e, c, theta) + hadamard_e(e)


def full_swap(e, c):
    return [
        crot(e, c, "x", PI / 2), rot_e(e, "x", PI / 2), rz_c(c, PI / 2),
        cond_rot(e, c, "x", PI), rot_e(e, "y", PI / 2), rz_e(e, PI / 2),
        rz_c(c, PI / 2), crot(e, c, "x", PI / 2), rz_c(c, PI),
    ]


def ddrf(e, c, axis, theta):
    """Carbon rotation that returns the electron to its input state."""
    if abs(theta) < ELIDE_BELOW:
        return []
    return [cond_rot(e, c, axis, theta), rot_e(e, "x", PI),
            cond_rot(e, c, axis, theta), rot_e(e, "x", PI)]


def direct_control(e, c, axis, theta):
    """Carbon rotation with the electron reset and parked in |1>."""
    if abs(theta) < ELIDE_BELOW:
        return []
    return [init_e(e), rot_e(e, "x", PI), direct_rot(e, c, axis, theta)]


PARTIAL_BASES = ("x", "+y", "-y", "z")


def partial_swap(e, c, basis):
    """Map the carbon's ``basis`` observable onto the electron's Z; the electron is reset first."""
    if basis == "x":
        return [init_e(e), rot_e(e, "x", PI / 2), crot(e, c, "x", PI / 2),
                rz_e(e, PI / 2), rot_e(e, "x", PI / 2)]
    if basis == "+y":
        return [init_e(e), rot_e(e, "x", PI / 2), crot(e, c, "y", PI / 2),
                rz_e(e, PI / 2), rot_e(e, "x", PI / 2)]
    if basis == "-y":
        return [init_e(e), rot_e(e, "x", PI / 2), crot(e, c, "y", PI / 2), rot_e(e, "y", PI / 2)]
    if basis == "z":
        return [init_e(e), crot(e, c, "x", PI / 2), rot_e(e, "x", PI / 2),
                crot(e, c, "y", PI / 2), rot_e(e, "y", PI / 2)]
    raise ValueError(f"unknown partial-swap basis {basis!r}")


def init_swap(e, c):
    """Leaves the carbon in |0> given a freshly initialized electron."""
    return [rot_e(e, "x", PI / 2), crot(e, c, "x", PI / 2), rot_e(e, "y", PI / 2), crot(e, c, "y", PI / 2)]


def restore_electron(e, register=None):
    """Bring the electron back to |0>, or to the outcome stored in ``register``."""
    ops = [init_e(e)]
    if register is not None:
        ops.append(replace(rot_e(e, "x", PI), condition=Condition(register, "<", 0)))
    return ops


def carbon_block_count(ops: Iterable[NativeOp]) -> int:
    return sum(op.kind in CARBON_BLOCKS for op in ops)


def op_duration(op: NativeOp, durations: DurationTable = DEFAULT_DURATIONS) -> float:
    if op.kind in PLACEHOLDERS:
        raise ValueError("placeholder has no duration")
    return durations.of(op.mnemonic, op.effective_axis)


def scheduled_duration(ops: Iterable[NativeOp], durations: DurationTable = DEFAULT_DURATIONS) -> float:
    """Serial execution time of ``ops``."""
    return sum(op_duration(op, durations) for op in ops)

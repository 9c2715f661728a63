"""When does an electron's state not need to survive a placeholder?

Four situations make it irrelevant at a position:

1. nothing has touched the electron yet,
2. the last thing that touched it was its own measurement,
3. nothing touches it afterwards,
4. the next thing to touch it is an initialization (or a Bell-pair preparation,
   which also overwrites it).

Only non-transparent ops count as touches.  In cases 1 and 2 the state is a
known basis state, so a pass may destroy it and put it back afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..native import NativeCircuit, NativeOp, OpKind, PLACEHOLDERS
from ..topology import node_electron

NO_PRIOR_USE = 1
AFTER_MEASUREMENT = 2
NO_LATER_USE = 3
NEXT_IS_INIT = 4


def electrons_used(op: NativeOp) -> tuple[int, ...]:
    """Electrons whose state a native op reads or writes."""
    if op.kind is OpKind.ENTANGLE:
        return op.qubits
    if op.kind in (OpKind.ROT_E, OpKind.RZ_E, OpKind.INIT_E, OpKind.MEAS_E,
                   OpKind.CROT, OpKind.COND_ROT, OpKind.DIRECT_ROT):
        return op.qubits[:1]
    return ()


def is_real_use(op: NativeOp, e: int) -> bool:
    return not op.transparent and op.kind not in PLACEHOLDERS and e in electrons_used(op)


@dataclass(frozen=True)
class LivenessEntry:
    electron: int
    position: int
    conditions: tuple[int, ...]
    restore_register: str | None = None
    restorable: bool = False
    carbon_needed: bool = True

    @property
    def electron_state_irrelevant(self) -> bool:
        return bool(self.conditions)

    @property
    def used_later(self) -> bool:
        return not (NO_LATER_USE in self.conditions or NEXT_IS_INIT in self.conditions)

    @property
    def destructive_ok(self) -> bool:
        """The electron may be overwritten here, restoring it afterwards if it is still needed."""
        return self.electron_state_irrelevant and (not self.used_later or self.restorable)


@dataclass
class LivenessInfo:
    entries: dict[int, LivenessEntry]

    def __getitem__(self, op: NativeOp) -> LivenessEntry:
        return self.entries[op.uid]

    def __contains__(self, op: NativeOp) -> bool:
        return op.uid in self.entries


def _carbon_needed(ops, start: int, c: int) -> bool:
    for op in ops[start:]:
        if c in op.qubits:
            return not (op.kind is OpKind.SWAP and op.purpose == "init" and op.qubits[1] == c)
    return False


def electron_liveness_at(circuit: NativeCircuit, position: int, e: int) -> LivenessEntry:
    ops = circuit.ops
    prev = next((i for i in range(position - 1, -1, -1) if is_real_use(ops[i], e)), None)
    nxt = next((i for i in range(position + 1, len(ops)) if is_real_use(ops[i], e)), None)
    conds = []
    restore_register, restorable = None, False
    if prev is None:
        conds.append(NO_PRIOR_USE)
        restorable = True
    elif ops[prev].kind is OpKind.MEAS_E:
        conds.append(AFTER_MEASUREMENT)
        restore_register = ops[prev].register
        # the outcome must still be readable when the restore runs
        restorable = not any(op.kind is OpKind.MEAS_E and op.register == restore_register
                             for op in ops[prev + 1:position + 1])
    if nxt is None:
        conds.append(NO_LATER_USE)
    elif ops[nxt].kind in (OpKind.INIT_E, OpKind.ENTANGLE) and ops[nxt].condition is None:
        conds.append(NEXT_IS_INIT)
    return LivenessEntry(e, position, tuple(conds), restore_register, restorable)


def analyze_electron_liveness(circuit: NativeCircuit) -> LivenessInfo:
    """Liveness at every placeholder, keyed by op uid so later expansions keep it."""
    entries = {}
    for pos, op in enumerate(circuit.ops):
        if op.kind not in PLACEHOLDERS:
            continue
        c = op.carbon
        e = node_electron(c, circuit.config)
        entry = electron_liveness_at(circuit, pos, e)
        after = pos + 2 if op.kind is OpKind.SWAP and op.purpose == "measure" else pos + 1
        entries[op.uid] = LivenessEntry(entry.electron, pos, entry.conditions, entry.restore_register,
                                        entry.restorable, _carbon_needed(circuit.ops, after, c))
    return LivenessInfo(entries)

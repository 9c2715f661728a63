"""Swap placeholder resolution: full swaps, basis-aware partial swaps, init swaps."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import native as nv
from ..errors import PipelineError
from ..native import NativeCircuit, NativeOp, OpKind
from .liveness import NO_PRIOR_USE, LivenessEntry, LivenessInfo


@dataclass(frozen=True)
class BasisMatch:
    basis: str                       # "x", "y" or "z"
    sign: int = 1                    # -1 when the observable is -Y
    consumed: frozenset = field(default_factory=frozenset)

    @property
    def partial_kind(self) -> str:
        if self.basis == "y":
            return "+y" if self.sign > 0 else "-y"
        return self.basis


def _carbon_groups(ops: list[NativeOp], position: int, c: int):
    """Source groups touching carbon ``c`` before ``position``, most recent first, with their ops."""
    groups: list[tuple[int, list[NativeOp]]] = []
    for op in reversed(ops[:position]):
        if c not in op.qubits:
            continue
        if groups and groups[-1][0] == op.group:
            groups[-1][1].append(op)
        else:
            groups.append((op.group, [op]))
    return groups


def _consumable(group: int, members: list[NativeOp], ops: list[NativeOp], origins) -> bool:
    """A source gate of the right kind whose ops all run unconditionally."""
    if group < 0 or members[0].origin not in origins:
        return False
    return all(op.condition is None for op in ops if op.group == group)


def detect_measurement_basis(ops: list[NativeOp], position: int) -> BasisMatch:
    """Basis implied by the gates right before the carbon measurement at ``position``.

    A Hadamard immediately before means X; a phase gate then a Hadamard means
    Y (S gives -Y, S-dagger gives +Y).  Matched groups are reported so the
    caller can drop them.
    """
    c = ops[position].carbon
    groups = _carbon_groups(ops, position, c)
    if not groups or not _consumable(*groups[0], ops, ("h",)):
        return BasisMatch("z")
    h_group = groups[0][0]
    consumed = {op.uid for op in ops if op.group == h_group}
    if len(groups) > 1 and _consumable(*groups[1], ops, ("s", "sdg")):
        phase_group = groups[1][0]
        consumed |= {op.uid for op in ops if op.group == phase_group}
        sign = -1 if groups[1][1][0].origin == "s" else 1
        return BasisMatch("y", sign, frozenset(consumed))
    return BasisMatch("x", 1, frozenset(consumed))


def _restore(entry: LivenessEntry, e: int) -> list[NativeOp]:
    if not entry.used_later:
        return []
    if NO_PRIOR_USE in entry.conditions:
        return nv.restore_electron(e)
    return nv.restore_electron(e, entry.restore_register)


def _tag(ops, src: NativeOp):
    return [o.tagged(group=src.group, origin=src.origin) for o in ops]


def select_swaps(circuit: NativeCircuit, liveness: LivenessInfo, allow_partial: bool = True) -> NativeCircuit:
    ops = circuit.ops
    out: list[NativeOp] = []
    i = 0
    while i < len(ops):
        op = ops[i]
        if op.kind is not OpKind.SWAP:
            out.append(op)
            i += 1
            continue
        if op not in liveness:
            raise PipelineError("swap placeholder without liveness data; run the liveness pass first")
        entry = liveness[op]
        e, c = op.qubits
        if op.purpose == "measure":
            meas = ops[i + 1]
            if meas.kind is not OpKind.MEAS_E or meas.qubits != (e,):
                raise PipelineError("measure placeholder must be followed by its electron readout")
            partial = (allow_partial and entry.destructive_ok and not entry.carbon_needed
                       and not (entry.used_later and entry.restore_register == meas.register))
            if partial:
                if not entry.electron_state_irrelevant:
                    raise PipelineError("partial swap selected where the electron state is live")
                match = detect_measurement_basis(out + [op], len(out))
                out = [o for o in out if o.uid not in match.consumed]
                out += _tag(nv.partial_swap(e, c, match.partial_kind), op)
                out.append(meas)
                out += _tag(_restore(entry, e), op)
            else:
                out += _tag(nv.full_swap(e, c), op)
                out.append(meas)
                if entry.used_later or entry.carbon_needed:
                    out += _tag(nv.full_swap(e, c), op)
            i += 2
            continue
        # init: the route InitE sits right before the placeholder
        if not out or out[-1].kind is not OpKind.INIT_E or out[-1].qubits != (e,):
            raise PipelineError("init placeholder must follow its electron initialization")
        if allow_partial and entry.destructive_ok:
            out += _tag(nv.init_swap(e, c), op)
            out += _tag(_restore(entry, e), op)
        elif entry.used_later:
            route = out.pop()
            out += _tag(nv.full_swap(e, c), op) + [route] + _tag(nv.full_swap(e, c), op)
        else:
            out += _tag(nv.full_swap(e, c), op)
        i += 1
    return circuit.with_ops(out)

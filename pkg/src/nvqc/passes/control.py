"""Resolve carbon single-qubit placeholders into DDrf or direct-control pulses."""

from __future__ import annotations

from .. import native as nv
from ..errors import PipelineError
from ..gates import axis_rotation, euler_zyz
from ..native import NativeCircuit, NativeOp, OpKind
from ..topology import node_electron
from .liveness import NO_PRIOR_USE, LivenessInfo


def carbon_pulses(u) -> list[tuple[str, float]]:
    """Axis/angle list for a carbon unitary, frames as ('z', angle)."""
    rot = axis_rotation(u)
    if rot is not None:
        return [rot]
    a, b, c = euler_zyz(u)
    return [("z", c), ("y", b), ("z", a)]


def expand_carbon_rotation(op: NativeOp, e: int, direct: bool, restore=None) -> list[NativeOp]:
    """Pulse sequence for one placeholder; ``restore`` is None or a register spec for the electron."""
    c = op.carbon
    body = []
    for axis, theta in carbon_pulses(op.matrix):
        if axis == "z":
            body += nv.elide([nv.rz_c(c, theta)])
        elif direct:
            body += nv.direct_control(e, c, axis, theta)
        else:
            body += nv.ddrf(e, c, axis, theta)
    if direct and restore is not None and any(o.kind is OpKind.DIRECT_ROT for o in body):
        body += nv.restore_electron(e, restore[1])
    return [o.tagged(group=op.group, origin=op.origin, condition=o.condition or op.condition, transparent=not direct)
            for o in body]


def select_carbon_control(circuit: NativeCircuit, liveness: LivenessInfo, allow_direct: bool = True) -> NativeCircuit:
    out = []
    for op in circuit.ops:
        if op.kind is not OpKind.CARBON_ROT:
            out.append(op)
            continue
        if op not in liveness:
            raise PipelineError("carbon rotation without liveness data; run the liveness pass first")
        entry = liveness[op]
        e = node_electron(op.carbon, circuit.config)
        direct = allow_direct and entry.destructive_ok
        restore = None
        if direct and entry.used_later:
            restore = ("zero", None) if NO_PRIOR_USE in entry.conditions else ("reg", entry.restore_register)
            if restore[1] is not None and op.condition is not None:
                # a conditioned restore under a conditioned gate would need two guards
                direct, restore = False, None
        out += expand_carbon_rotation(op, e, direct, restore)
    return circuit.with_ops(out)

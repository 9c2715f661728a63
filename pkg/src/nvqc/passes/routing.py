"""Electron-mediated initialization and measurement of carbons."""

from __future__ import annotations

from .. import native as nv
from ..native import NativeCircuit, OpKind
from ..topology import is_electron, node_electron

ROUTE = "route"


def route_init_measure(circuit: NativeCircuit) -> NativeCircuit:
    """Replace carbon Init/Measure with electron ops plus a swap placeholder.

    The route ops and the placeholder are transparent: they move state through
    the electron without being uses of the electron's own state.
    """
    config = circuit.config
    out = []
    for op in circuit.ops:
        if op.kind not in (OpKind.INIT_E, OpKind.MEAS_E) or is_electron(op.qubits[0], config):
            out.append(op)
            continue
        c = op.qubits[0]
        e = node_electron(c, config)
        meta = dict(group=op.group, origin=op.origin, transparent=True)
        if op.kind is OpKind.MEAS_E:
            out.append(nv.swap_placeholder(e, c, "measure").tagged(**meta))
            out.append(nv.meas_e(e, op.register).tagged(purpose=ROUTE, **meta))
        else:
            out.append(nv.init_e(e).tagged(purpose=ROUTE, **meta))
            out.append(nv.swap_placeholder(e, c, "init").tagged(**meta))
    return circuit.with_ops(out)

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from circuit_gen import random_circuit
from nvqc import native as nv
from nvqc import oracle
from nvqc.circuit_ir import GateKind, Instruction, parse_circuit
from nvqc.codegen import emit
from nvqc.errors import CompileError, DiagnosticsError, UnroutableError
from nvqc.gates import rotation
from nvqc.native import NativeCircuit, OpKind
from nvqc.passes import (
    DiagnosticsConfig,
    PipelineOptions,
    analyze_electron_liveness,
    compile_circuit,
    detect_measurement_basis,
    insert_diagnostics,
    lower_to_native,
    route_init_measure,
    select_carbon_control,
    select_swaps,
)
from nvqc.passes.diagnostics import ORDER
from nvqc.passes.liveness import AFTER_MEASUREMENT, NEXT_IS_INIT, NO_LATER_USE, NO_PRIOR_USE
from nvqc.simulator import run_exact
from nvqc.topology import TopologyConfig, is_electron, node_of

ONE_NODE = TopologyConfig(1, 3)
TWO_NODES = TopologyConfig(2, 5)


def sig(ops):
    return [(o.kind, o.qubits, o.axis, None if o.angle is None else round(o.angle, 9)) for o in ops]


def routed(text, config=ONE_NODE):
    return route_init_measure(lower_to_native(parse_circuit(text), config))


def compiled(text, config=ONE_NODE, options=PipelineOptions()):
    return compile_circuit(parse_circuit(text), config, options)


# -- lowering ---------------------------------------------------------------


def test_carbon_controlled_cx_uses_reversal_template():
    ops = lower_to_native(parse_circuit("qubits 2\ncx q1 q0"), ONE_NODE).ops
    assert sig(ops) == sig(nv.cx_carbon_to_electron(1, 0))


def test_electron_hadamard_lowering():
    ops = lower_to_native(parse_circuit("qubits 1\nh q0"), ONE_NODE).ops
    assert {o.kind for o in ops} <= {OpKind.ROT_E, OpKind.RZ_E}
    assert oracle.equal_up_to_global_phase(oracle.unitary_of(ops, [0]), oracle.unitary_of(
        [Instruction(GateKind.H, (0,))], [0]))


def test_carbon_gate_becomes_placeholder():
    ops = lower_to_native(parse_circuit("qubits 2\nrx q1 0.3\nrz q1 0.2"), ONE_NODE).ops
    assert [o.kind for o in ops] == [OpKind.CARBON_ROT, OpKind.RZ_C]


def test_teleported_cx_shape():
    native = lower_to_native(parse_circuit("qubits 7\ncx q1 q6"), TWO_NODES)
    kinds = [o.kind for o in native.ops]
    assert kinds.count(OpKind.ENTANGLE) == 1
    assert kinds.count(OpKind.MEAS_E) == 2
    assert sum(o.condition is not None for o in native.ops) == 2
    assert native.ops[0].qubits == (0, 5)


def test_teleport_needs_carbons():
    with pytest.raises(UnroutableError):
        lower_to_native(parse_circuit("qubits 7\ncx q0 q6"), TWO_NODES)


def test_invalid_circuit_rejected_with_index():
    with pytest.raises(CompileError) as err:
        lower_to_native(parse_circuit("qubits 8\nh q0\nx q7"), TopologyConfig(1, 5))
    assert err.value.index is None or err.value.index == 1


# -- routing ----------------------------------------------------------------


def test_routing_examples():
    meas = routed("qubits 2\ncreg m\nmeasure q1 -> m").ops
    assert [(o.kind, o.qubits) for o in meas] == [(OpKind.SWAP, (0, 1)), (OpKind.MEAS_E, (0,))]
    assert meas[0].purpose == "measure"
    init_e = routed("qubits 1\ninit q0").ops
    assert [(o.kind, o.qubits) for o in init_e] == [(OpKind.INIT_E, (0,))]
    init_c = routed("qubits 3\ninit q2").ops
    assert [(o.kind, o.qubits) for o in init_c] == [(OpKind.INIT_E, (0,)), (OpKind.SWAP, (0, 2))]
    assert init_c[1].purpose == "init"


# -- liveness ---------------------------------------------------------------


def _entry(ops):
    info = analyze_electron_liveness(NativeCircuit(ONE_NODE, ops))
    return next(info[o] for o in ops if o.kind is OpKind.CARBON_ROT)


def test_liveness_untouched_electron():
    entry = _entry([nv.carbon_rot(1, rotation("x", 0.4))])
    assert entry.electron_state_irrelevant and NO_PRIOR_USE in entry.conditions


def test_liveness_live_electron():
    entry = _entry([nv.rot_e(0, "x", 0.3), nv.carbon_rot(1, rotation("x", 0.4)), nv.meas_e(0, "m")])
    assert not entry.electron_state_irrelevant and entry.conditions == ()


def test_liveness_after_measurement_and_no_later_use():
    entry = _entry([nv.meas_e(0, "m"), nv.carbon_rot(1, rotation("x", 0.4))])
    assert set(entry.conditions) == {AFTER_MEASUREMENT, NO_LATER_USE}
    assert entry.restore_register == "m"


def test_liveness_next_is_init():
    entry = _entry([nv.rot_e(0, "x", 0.3), nv.carbon_rot(1, rotation("x", 0.4)), nv.init_e(0)])
    assert entry.conditions == (NEXT_IS_INIT,)


def test_liveness_ignores_transparent_routing():
    native = routed("qubits 2\ncreg m\nx q0\nmeasure q1 -> m\nrx q1 0.5\nmeasure q0 -> m")
    info = analyze_electron_liveness(native)
    rot = next(o for o in native.ops if o.kind is OpKind.CARBON_ROT)
    assert not info[rot].electron_state_irrelevant


# -- control selection ------------------------------------------------------


def test_control_selection_follows_liveness():
    free = compiled("qubits 2\nrx q1 0.6")
    assert any(o.kind is OpKind.DIRECT_ROT for o in free.ops)
    busy = compiled("qubits 2\ncreg m\nx q0\nrx q1 0.6\nmeasure q0 -> m")
    assert not any(o.kind is OpKind.DIRECT_ROT for o in busy.ops)
    baseline = compiled("qubits 2\nrx q1 0.6", options=PipelineOptions.baseline())
    assert not any(o.kind is OpKind.DIRECT_ROT for o in baseline.ops)


def test_direct_control_contract_in_context():
    native = compiled("qubits 2\nrx q1 0.6")
    assert oracle.channel_equivalence(native.ops, [Instruction(GateKind.RX, (1,), 0.6)], [0, 1], discard=[0],
                                      fixed_inputs={0: 0})


def test_zero_rotation_elided():
    assert compiled("qubits 2\nrx q1 0").ops == []


# -- basis detection --------------------------------------------------------


@pytest.mark.parametrize("prefix, basis, removed", [
    ("h q1", "x", 1), ("s q1\nh q1", "-y", 2), ("sdg q1\nh q1", "+y", 2), ("rx q1 0.3", "z", 0),
    ("h q1\nx q0", "x", 1), ("h q1\nrz q1 0.2", "z", 0),
])
def test_detect_measurement_basis(prefix, basis, removed):
    native = routed(f"qubits 2\ncreg m\n{prefix}\nmeasure q1 -> m")
    pos = next(i for i, o in enumerate(native.ops) if o.kind is OpKind.SWAP)
    match = detect_measurement_basis(native.ops, pos)
    assert match.partial_kind == basis
    groups = {o.group for o in native.ops if o.uid in match.consumed}
    assert len(groups) == removed


def test_conditioned_basis_change_not_consumed():
    native = routed("qubits 2\ncreg m\ncreg k\nmeasure q0 -> k\nh q1 if k < 0\nmeasure q1 -> m")
    pos = next(i for i, o in enumerate(native.ops) if o.kind is OpKind.SWAP)
    assert detect_measurement_basis(native.ops, pos).basis == "z"


# -- swaps ------------------------------------------------------------------


def _contains(ops, template):
    s, t = sig(ops), sig(template)
    return any(s[i:i + len(t)] == t for i in range(len(s) - len(t) + 1))


def test_partial_z_after_electron_measurement():
    native = compiled("qubits 2\ncreg a\ncreg b\nmeasure q0 -> a\nmeasure q1 -> b")
    assert _contains(native.ops, nv.partial_swap(0, 1, "z"))


def test_full_swap_when_electron_live():
    text = "qubits 3\ncreg a\ncreg b\nh q0\ncx q0 q2\nmeasure q1 -> b\nmeasure q0 -> a"
    native = compiled(text)
    assert _contains(native.ops, nv.full_swap(0, 1))
    assert not any(_contains(native.ops, nv.partial_swap(0, 1, b)) for b in nv.PARTIAL_BASES)


def test_init_swap_on_fresh_electron():
    native = compiled("qubits 3\ninit q2")
    assert _contains(native.ops, nv.init_swap(0, 2))
    channel = oracle.channel_equivalence(native.ops, [Instruction(GateKind.INIT, (2,))], [0, 1, 2], discard=[0])
    assert channel


def test_partial_x_consumes_hadamard():
    native = compiled("qubits 2\ncreg m\nh q1\nmeasure q1 -> m")
    assert _contains(native.ops, nv.partial_swap(0, 1, "x"))
    assert not any(o.kind is OpKind.DIRECT_ROT for o in native.ops)


# -- diagnostics ------------------------------------------------------------


def test_diagnostics_wrap_body():
    body = compiled("qubits 2\nh q0")
    wrapped = insert_diagnostics(body, DiagnosticsConfig(enabled=True))
    names = [o.purpose for o in wrapped.ops if o.kind is OpKind.DIAG]
    assert names == list(ORDER) + ["crc"]
    assert sig(wrapped.ops[5:-1]) == sig(body.ops)
    assert insert_diagnostics(body, DiagnosticsConfig()).ops == body.ops


def test_diagnostic_dependencies():
    with pytest.raises(DiagnosticsError):
        insert_diagnostics(compiled("qubits 1\nh q0"), DiagnosticsConfig(True, frozenset({"rabi_c"})))
    with pytest.raises(DiagnosticsError):
        DiagnosticsConfig(True, frozenset({"rabi_e"})).check()
    DiagnosticsConfig(True, frozenset({"larmor_e", "rabi_e", "crc"})).check()


# -- properties over random circuits ----------------------------------------

SEEDS = st.integers(0, 2 ** 32 - 1)
PROPERTY = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _role_safe(native):
    cfg = native.config
    for o in native.ops:
        if o.kind in (OpKind.INIT_E, OpKind.MEAS_E):
            assert is_electron(o.qubits[0], cfg)
        if len(o.qubits) == 2 and o.kind is not OpKind.ENTANGLE:
            e, c = o.qubits
            assert is_electron(e, cfg) and not is_electron(c, cfg) and node_of(e, cfg) == node_of(c, cfg)
        if o.kind is OpKind.ENTANGLE:
            assert all(is_electron(q, cfg) for q in o.qubits)
            assert node_of(o.qubits[0], cfg) != node_of(o.qubits[1], cfg)


@PROPERTY
@given(SEEDS)
def test_role_safety(seed):
    c = random_circuit(np.random.default_rng(seed), 3, 10)
    for options in (PipelineOptions(), PipelineOptions.baseline()):
        _role_safe(compile_circuit(c, ONE_NODE, options))


@PROPERTY
@given(SEEDS)
def test_semantics_preserved_in_both_modes(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, int(rng.integers(1, 4)), int(rng.integers(1, 12)))
    reference = oracle.brute_force_distribution(c)
    for options in (PipelineOptions(), PipelineOptions.baseline()):
        program = emit(compile_circuit(c, ONE_NODE, options))
        assert oracle.total_variation(reference, run_exact(program).distribution) < 1e-9


@PROPERTY
@given(SEEDS)
def test_optimizations_dominate(seed):
    c = random_circuit(np.random.default_rng(seed), 3, 12)
    partial = compile_circuit(c, ONE_NODE, PipelineOptions(direct_control=False, partial_swaps=True))
    full = compile_circuit(c, ONE_NODE, PipelineOptions(direct_control=False, partial_swaps=False))
    assert nv.carbon_block_count(partial.ops) <= nv.carbon_block_count(full.ops)
    direct = compile_circuit(c, ONE_NODE, PipelineOptions(direct_control=True, partial_swaps=False))
    assert nv.scheduled_duration(direct.ops) <= nv.scheduled_duration(full.ops) + 1e-15


def _scrambled_baseline(c, seed):
    """Baseline compile with each destroyable electron overwritten after the flagged source instruction."""
    rng = np.random.default_rng(seed)
    native = route_init_measure(lower_to_native(c, ONE_NODE))
    info = analyze_electron_liveness(native)
    flagged = []
    for pos, op in enumerate(native.ops):
        if op.uid not in info.entries or not info[op].destructive_ok:
            continue
        entry = info[op]
        if op.kind is OpKind.SWAP and op.purpose == "measure":
            clash = entry.used_later and entry.restore_register == native.ops[pos + 1].register
            if clash:
                continue
        flagged.append((op.group, entry))
    ops = select_swaps(select_carbon_control(native, info, False), info, False).ops
    for group, entry in flagged:
        last = max(i for i, o in enumerate(ops) if o.group == group)
        e = entry.electron
        junk = [nv.init_e(e), nv.rot_e(e, "x", float(rng.uniform(0.3, 2.8))), nv.rot_e(e, "y", 1.0)]
        if entry.used_later:
            reg = None if NO_PRIOR_USE in entry.conditions else entry.restore_register
            junk += nv.restore_electron(e, reg)
        ops = ops[:last + 1] + junk + ops[last + 1:]
    return native.with_ops(ops), bool(flagged)


@PROPERTY
@given(SEEDS)
def test_liveness_soundness(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, 3, int(rng.integers(3, 12)))
    scrambled, any_flag = _scrambled_baseline(c, seed)
    reference = oracle.brute_force_distribution(c)
    assert oracle.total_variation(reference, run_exact(emit(scrambled)).distribution) < 1e-9

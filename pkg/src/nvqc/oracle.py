"""Slow, dense reference semantics used to check the compiler and simulator.

Nothing here touches the simulator kernels or the gate tables in
:mod:`nvqc.gates`; every matrix is rebuilt from Pauli algebra so that a bug in
the fast path cannot hide behind the same bug in the check.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

from .circuit_ir import Circuit, GateKind, Instruction
from .native import NativeOp, OpKind

_I = np.eye(2, dtype=complex)
_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
_KET1 = np.array([[0, 0], [0, 1]], dtype=complex)
MAX_UNITARY_QUBITS = 6
MAX_CHANNEL_QUBITS = 8
MAX_BRUTE_FORCE_QUBITS = 5


class OracleError(ValueError):
    pass


def _rot(axis: str, theta: float) -> np.ndarray:
    # exp(-i theta/2 P) through the matrix exponential series closed form P^2 = I
    return np.cos(theta / 2) * _I - 1j * np.sin(theta / 2) * _PAULI[axis]


def _source_1q(kind: GateKind, angle) -> np.ndarray:
    x, y, z = _PAULI["x"], _PAULI["y"], _PAULI["z"]
    table = {
        GateKind.I: _I, GateKind.X: x, GateKind.Y: y, GateKind.Z: z,
        GateKind.H: (x + z) / np.sqrt(2),
        GateKind.S: _KET0 + 1j * _KET1,
        GateKind.SDG: _KET0 - 1j * _KET1,
    }
    if kind in table:
        return table[kind]
    return _rot(kind.value[1], angle)


def _source_2q(kind: GateKind, angle) -> np.ndarray:
    x, z = _PAULI["x"], _PAULI["z"]
    if kind is GateKind.CX:
        return np.kron(_KET0, _I) + np.kron(_KET1, x)
    if kind is GateKind.CZ:
        return np.kron(_KET0, _I) + np.kron(_KET1, z)
    if kind is GateKind.SWAP:
        return sum(np.kron(p, p) for p in (_I, x, _PAULI["y"], z)) / 2
    if kind is GateKind.CROT:
        return np.cos(angle / 2) * np.eye(4) - 1j * np.sin(angle / 2) * np.kron(z, x)
    raise OracleError(f"{kind.value} is not a two-qubit gate")


def _native_matrix(op: NativeOp) -> np.ndarray:
    k = op.kind
    if k in (OpKind.ROT_E, OpKind.RZ_E, OpKind.RZ_C):
        return _rot(op.effective_axis, op.angle)
    if k is OpKind.CROT:
        # +theta on the carbon for electron |0>, -theta for |1>
        return np.cos(op.angle / 2) * np.eye(4) - 1j * np.sin(op.angle / 2) * np.kron(_PAULI["z"], _PAULI[op.axis])
    if k in (OpKind.COND_ROT, OpKind.DIRECT_ROT):
        return np.kron(_KET0, _I) + np.kron(_KET1, _rot(op.axis, op.angle))
    if k is OpKind.DIAG:
        return np.eye(1, dtype=complex)
    raise OracleError(f"{k.value} is not unitary")


def embed(u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Full 2^n operator for ``u`` on ``targets`` (qubit 0 most significant)."""
    k = len(targets)
    rest = [q for q in range(n) if q not in targets]
    full = np.kron(u, np.eye(2 ** (n - k), dtype=complex))
    order = list(targets) + rest
    # axes of full are (order..., order...); permute back to (0..n-1, 0..n-1)
    t = full.reshape([2] * (2 * n))
    perm = [order.index(q) for q in range(n)]
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(2 ** n, 2 ** n)


# ---------------------------------------------------------------------------
# unitaries


def _steps(seq) -> list[tuple[str, object, tuple[int, ...], object]]:
    """Normalize native ops or source instructions into (kind, payload, qubits, condition)."""
    out = []
    for item in seq:
        if isinstance(item, Instruction):
            if item.kind is GateKind.MEASURE:
                out.append(("measure", item.register, item.qubits, item.condition))
            elif item.kind is GateKind.INIT:
                out.append(("reset", None, item.qubits, item.condition))
            elif item.kind.arity == 1:
                out.append(("unitary", _source_1q(item.kind, item.angle), item.qubits, item.condition))
            else:
                out.append(("unitary", _source_2q(item.kind, item.angle), item.qubits, item.condition))
            continue
        op: NativeOp = item
        if op.kind is OpKind.INIT_E:
            out.append(("reset", None, op.qubits, op.condition))
        elif op.kind is OpKind.MEAS_E:
            out.append(("measure", op.register, op.qubits, op.condition))
        elif op.kind is OpKind.ENTANGLE:
            out.append(("bell", None, op.qubits, op.condition))
        elif op.kind is OpKind.DIAG:
            continue
        elif op.kind in (OpKind.CARBON_ROT, OpKind.SWAP):
            raise OracleError("placeholders have no semantics")
        else:
            out.append(("unitary", _native_matrix(op), op.qubits, op.condition))
    return out


def _qubits_of(steps) -> list[int]:
    return sorted({q for s in steps for q in s[2]})


def unitary_of(seq: Iterable, qubits: Sequence[int] | None = None) -> np.ndarray:
    steps = _steps(seq)
    qubits = list(qubits) if qubits is not None else _qubits_of(steps)
    if len(qubits) > MAX_UNITARY_QUBITS:
        raise OracleError(f"unitary_of handles at most {MAX_UNITARY_QUBITS} qubits")
    n = len(qubits)
    u = np.eye(2 ** n, dtype=complex)
    for kind, payload, qs, cond in steps:
        if kind != "unitary" or cond is not None:
            raise OracleError(f"non-unitary element {kind!r} in sequence")
        u = embed(payload, [qubits.index(q) for q in qs], n) @ u
    return u


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    dim = a.shape[0]
    return a.shape == b.shape and abs(abs(np.trace(a.conj().T @ b)) - dim) <= tol * dim


# ---------------------------------------------------------------------------
# channels


class _Register:
    """Classical register modeled as a dephased ancilla qubit; |1> means the value -1."""

    def __init__(self, names: Sequence[str], offset: int):
        self.index = {name: offset + i for i, name in enumerate(names)}


def _condition_projector(cond, anc: int | None, n: int) -> tuple[np.ndarray, np.ndarray] | bool:
    if anc is None:
        return cond.holds(0)
    hold_plus, hold_minus = cond.holds(1), cond.holds(-1)
    if hold_plus and hold_minus:
        return True
    if not (hold_plus or hold_minus):
        return False
    p = _KET0 if hold_plus else _KET1
    on = embed(p, [anc], n)
    return on, np.eye(2 ** n) - on


def _apply_channel(steps, rho: np.ndarray, qubit_pos: dict, regs: _Register, n: int) -> np.ndarray:
    written: set[str] = set()
    for kind, payload, qs, cond in steps:
        pos = [qubit_pos[q] for q in qs]
        if kind == "unitary":
            u = embed(payload, pos, n)
            gate = True if cond is None else _condition_projector(
                cond, regs.index[cond.register] if cond.register in written else None, n)
            if gate is True:
                rho = u @ rho @ u.conj().T
            elif gate is not False:
                on, off = gate
                cu = u @ on + off
                rho = cu @ rho @ cu.conj().T
            continue
        if cond is not None:
            raise OracleError("only unitaries may be conditioned")
        if kind == "reset":
            rho = _reset(rho, pos[0], n)
        elif kind == "bell":
            rho = _reset(_reset(rho, pos[0], n), pos[1], n)
            h = (_PAULI["x"] + _PAULI["z"]) / np.sqrt(2)
            cx = np.kron(_KET0, _I) + np.kron(_KET1, _PAULI["x"])
            u = embed(cx, pos, n) @ embed(h, pos[:1], n)
            rho = u @ rho @ u.conj().T
        elif kind == "measure":
            anc = regs.index[payload]
            rho = _reset(rho, anc, n)
            cx = embed(np.kron(_KET0, _I) + np.kron(_KET1, _PAULI["x"]), [pos[0], anc], n)
            rho = cx @ rho @ cx.conj().T
            rho = _dephase(rho, anc, n)
            written.add(payload)
    return rho


def _reset(rho, q, n):
    lower = embed(np.array([[1, 0], [0, 0]], dtype=complex), [q], n)
    raise_ = embed(np.array([[0, 1], [0, 0]], dtype=complex), [q], n)
    return lower @ rho @ lower.conj().T + raise_ @ rho @ raise_.conj().T


def _dephase(rho, q, n):
    p0 = embed(_KET0, [q], n)
    p1 = embed(_KET1, [q], n)
    return p0 @ rho @ p0 + p1 @ rho @ p1


def partial_trace(rho: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    t = rho.reshape([2] * (2 * n))
    drop = [q for q in range(n) if q not in keep]
    for count, q in enumerate(sorted(drop, reverse=True)):
        m = n - count
        t = np.trace(t, axis1=q, axis2=q + m)
    k = len(keep)
    return t.reshape(2 ** k, 2 ** k)


def choi_matrix(seq, qubits: Sequence[int], discard: Iterable[int] = (),
                fixed_inputs: dict[int, int] | None = None, registers: Sequence[str] | None = None) -> np.ndarray:
    """Normalized Choi matrix of ``seq`` from the free inputs to the kept outputs.

    ``fixed_inputs`` pins some input qubits to computational basis states.
    Registers written by measurements become output qubits after the listed
    ``qubits``.
    """
    steps = _steps(seq)
    fixed_inputs = dict(fixed_inputs or {})
    qubits = list(qubits)
    if registers is None:
        registers = sorted({s[1] for s in steps if s[0] == "measure"})
    regs = _Register(registers, len(qubits))
    n = len(qubits) + len(registers)
    if n > MAX_CHANNEL_QUBITS:
        raise OracleError(f"channel check handles at most {MAX_CHANNEL_QUBITS} qubits including registers")
    qubit_pos = {q: i for i, q in enumerate(qubits)}
    free = [q for q in qubits if q not in fixed_inputs]
    discard = set(discard)
    keep = [qubit_pos[q] for q in qubits if q not in discard] + list(regs.index.values())
    d_in = 2 ** len(free)
    d_out = 2 ** len(keep)
    choi = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for i, j in itertools.product(range(d_in), repeat=2):
        bits_i = _bits(i, len(free))
        bits_j = _bits(j, len(free))
        ket = np.zeros(2 ** n, dtype=complex)
        bra = np.zeros(2 ** n, dtype=complex)
        ket[_index(qubits, qubit_pos, fixed_inputs, dict(zip(free, bits_i)), n)] = 1
        bra[_index(qubits, qubit_pos, fixed_inputs, dict(zip(free, bits_j)), n)] = 1
        rho = np.outer(ket, bra.conj())
        out = partial_trace(_apply_channel(steps, rho, qubit_pos, regs, n), keep, n)
        e_ij = np.zeros((d_in, d_in))
        e_ij[i, j] = 1
        choi += np.kron(e_ij, out)
    return choi / d_in


def _bits(value: int, width: int) -> list[int]:
    return [(value >> (width - 1 - k)) & 1 for k in range(width)]


def _index(qubits, qubit_pos, fixed, free_bits, n) -> int:
    idx = 0
    for q in qubits:
        bit = fixed.get(q, free_bits.get(q, 0))
        idx |= bit << (n - 1 - qubit_pos[q])
    return idx


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def channel_distance(seq_a, seq_b, qubits, discard=(), fixed_inputs=None, registers=None) -> float:
    if registers is None:
        names = {s[1] for s in _steps(seq_a) + _steps(seq_b) if s[0] == "measure"}
        registers = sorted(names)
    a = choi_matrix(seq_a, qubits, discard, fixed_inputs, registers)
    b = choi_matrix(seq_b, qubits, discard, fixed_inputs, registers)
    if a.shape != b.shape:
        raise OracleError("Choi dimensions differ")
    return trace_norm(a - b)


def channel_equivalence(seq_a, seq_b, qubits, discard=(), tol: float = 1e-9,
                        fixed_inputs=None, registers=None) -> bool:
    return channel_distance(seq_a, seq_b, qubits, discard, fixed_inputs, registers) < tol


# ---------------------------------------------------------------------------
# outcome distributions


Outcome = tuple[tuple[str, int], ...]


def brute_force_distribution(circuit: Circuit, hidden_prefix: str = "_") -> dict[Outcome, float]:
    """Exact distribution over measurement records by enumerating every branch.

    Keys list (register, value) pairs in measurement order; registers starting
    with ``hidden_prefix`` are left out.
    """
    n = circuit.num_qubits
    if n > MAX_BRUTE_FORCE_QUBITS:
        raise OracleError(f"brute force handles at most {MAX_BRUTE_FORCE_QUBITS} qubits")
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1
    dist: dict[Outcome, float] = {}
    stack = [(0, psi, 1.0, {}, ())]
    insts = circuit.instructions
    while stack:
        pc, psi, prob, regs, key = stack.pop()
        while pc < len(insts):
            inst = insts[pc]
            pc += 1
            if inst.condition is not None and not inst.condition.holds(regs.get(inst.condition.register, 0)):
                continue
            q = inst.qubits[0]
            if inst.kind is GateKind.MEASURE:
                branches = []
                for bit, value in ((0, 1), (1, -1)):
                    proj = embed(_KET0 if bit == 0 else _KET1, [q], n) @ psi
                    p = float(np.vdot(proj, proj).real)
                    if p > 1e-14:
                        branches.append((proj / np.sqrt(p), p, value))
                for proj, p, value in branches[1:]:
                    new_key = key if inst.register.startswith(hidden_prefix) else key + ((inst.register, value),)
                    stack.append((pc, proj, prob * p, {**regs, inst.register: value}, new_key))
                psi, p, value = branches[0]
                prob *= p
                regs = {**regs, inst.register: value}
                if not inst.register.startswith(hidden_prefix):
                    key = key + ((inst.register, value),)
            elif inst.kind is GateKind.INIT:
                proj0 = embed(_KET0, [q], n) @ psi
                flip = embed(np.array([[0, 1], [0, 0]], dtype=complex), [q], n) @ psi
                # reset of a pure state is pure only in a branch; split on the discarded bit
                parts = [(v, float(np.vdot(v, v).real)) for v in (proj0, flip)]
                parts = [(v / np.sqrt(p), p) for v, p in parts if p > 1e-14]
                for v, p in parts[1:]:
                    stack.append((pc, v, prob * p, regs, key))
                psi, p = parts[0]
                prob *= p
            else:
                mat = _source_1q(inst.kind, inst.angle) if inst.kind.arity == 1 else _source_2q(inst.kind, inst.angle)
                psi = embed(mat, list(inst.qubits), n) @ psi
        dist[key] = dist.get(key, 0.0) + prob
    return dist


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)

"""Sequential execution of assembly programs on a noisy density matrix.

Each quantum instruction applies its ideal channel, then depolarizes the
qubits it acts on, then lets every other simulated qubit idle for the
instruction's duration.  Frame updates and diagnostics carry no noise.
Measurements get their noise before the readout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import __version__
from ..codegen import Program, assemble
from ..circuit_ir import compare
from ..durations import DEFAULT_DURATIONS, DIAGNOSTIC_MNEMONICS, DurationTable
from ..errors import SimulationError
from ..gates import CX, H, conditional_rotation, half_conditioned_rotation, rotation
from . import state as st
from .kernels import backend as default_backend

RESULT_FORMAT = "nvqc-run/1"
MAX_QUBITS = 14
MAX_BRANCH_PATHS = 2 ** 12
INT_LIMIT = 2 ** 63 - 1
DROP_BRANCH_BELOW = 1e-15


@dataclass(frozen=True)
class NoiseParams:
    p_depol: float = 0.0
    t_coh: float = math.inf

    def __post_init__(self):
        if not 0.0 <= self.p_depol <= 1.0:
            raise ValueError("p_depol must lie in [0, 1]")
        if not self.t_coh > 0:
            raise ValueError("coherence time must be positive")

    def as_dict(self) -> dict:
        return {"p_depol": self.p_depol, "T_coh": "inf" if math.isinf(self.t_coh) else self.t_coh}


NOISELESS = NoiseParams()


@dataclass
class _Path:
    pc: int
    rho: np.ndarray
    prob: float
    regs: dict[str, int]
    memory: list[int] = field(default_factory=list)
    records: list[tuple[int, str, int]] = field(default_factory=list)
    pc_counts: np.ndarray | None = None

    def fork(self, rho, prob) -> "_Path":
        return _Path(self.pc, rho, prob, dict(self.regs), list(self.memory), list(self.records),
                     self.pc_counts.copy())


@dataclass
class RunResult:
    mode: str
    qubits: list[int]
    seed: int | None
    shots: int
    noise: NoiseParams
    durations: DurationTable
    register_expectations: dict[str, float]
    qubit_expectations: dict[int, float]
    distribution: dict[tuple, float]
    instruction_counts: dict[str, float]
    pc_counts: list[float]
    stored_results: float
    logical_registers: tuple[str, ...] = ()
    logical_expectation: float | None = None
    logical_stderr: float | None = None
    records: list[list[tuple[int, str, int]]] = field(default_factory=list)
    memory: list[list[int]] = field(default_factory=list)
    final_state: np.ndarray | None = None
    max_physicality_violation: float | None = None
    extras: dict = field(default_factory=dict)

    def reduced_state(self, qubits: Sequence[int]) -> np.ndarray:
        if self.final_state is None:
            raise SimulationError("run did not keep the final state")
        return st.partial_trace(self.final_state, [self.qubits.index(q) for q in qubits])

    def fidelity_with(self, target: np.ndarray, qubits: Sequence[int]) -> float:
        return st.fidelity(self.reduced_state(qubits), target)

    def to_dict(self) -> dict:
        doc = {
            "format": RESULT_FORMAT,
            "simulator": f"nvqc-{__version__}",
            "mode": self.mode,
            "seed": self.seed,
            "shots": self.shots,
            "noise": self.noise.as_dict(),
            "durations": self.durations.as_dict(),
            "durations_digest": self.durations.digest(),
            "noise_exempt": ["diagnostics", "frame updates"],
            "qubits": self.qubits,
            "register_expectations": self.register_expectations,
            "qubit_expectations": {f"q{q}": v for q, v in self.qubit_expectations.items()},
            "distribution": [
                {"outcome": [[r, v] for r, v in key], "p": p}
                for key, p in sorted(self.distribution.items())
            ],
            "instruction_counts": self.instruction_counts,
            "stored_results": self.stored_results,
            "logical_registers": list(self.logical_registers),
            "logical_expectation": self.logical_expectation,
            "logical_stderr": self.logical_stderr,
        }
        if self.mode == "sampled":
            doc["records"] = [[[f"q{q}", r, v] for q, r, v in shot] for shot in self.records]
            doc["memory"] = self.memory
        if self.max_physicality_violation is not None:
            doc["max_physicality_violation"] = self.max_physicality_violation
        doc.update(self.extras)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


class Machine:
    """Executes one program; holds the compiled instruction semantics."""

    def __init__(self, program: Program | str, noise: NoiseParams = NOISELESS,
                 durations: DurationTable = DEFAULT_DURATIONS, kernels=None,
                 check_physical: bool = False, max_steps: int = 50_000_000):
        if isinstance(program, str):
            program = assemble(program)
        program.validate()
        self.program = program
        self.noise = noise
        self.durations = durations
        self.kernels = kernels or default_backend
        self.check_physical = check_physical
        self.max_steps = max_steps
        self.qubits = program.qubits()
        if len(self.qubits) > MAX_QUBITS:
            raise SimulationError(f"program touches {len(self.qubits)} qubits; the cap is {MAX_QUBITS}")
        self.n = len(self.qubits)
        self.local = {q: i for i, q in enumerate(self.qubits)}
        self.labels = program.labels()
        self.worst = 0.0
        self._ops = [self._compile(ins) for ins in program.instructions]

    # -- instruction semantics -------------------------------------------------

    def _compile(self, ins):
        """Precompute (unitary, local qubits, duration, noisy) for quantum instructions."""
        m = ins.mnemonic
        if not ins.is_quantum:
            return None
        qs = [self.local[q] for q in ins.qubits]
        if m in DIAGNOSTIC_MNEMONICS:
            return (None, qs, 0.0, False)
        dur = self.durations.of(m, ins.axis)
        noisy = not ins.is_frame
        theta = ins.angle.radians if ins.angle is not None else None
        if m == "qgatee" or (m == "qgatec" and len(qs) == 1):
            u = rotation(ins.axis, theta)
        elif m in ("qgatec", "qgatedir"):
            u = half_conditioned_rotation(ins.axis, theta)
        elif m == "crot":
            u = conditional_rotation(ins.axis, theta)
        else:
            u = None
        return (None if u is None else np.ascontiguousarray(u), qs, dur, noisy)

    def _noise(self, rho, qs, dur):
        k = self.kernels
        p = self.noise.p_depol
        if p > 0:
            for q in qs:
                rho = st.apply_depolarizing(rho, q, p, k)
        if dur > 0 and not math.isinf(self.noise.t_coh):
            for q in range(self.n):
                if q not in qs:
                    rho = st.apply_idle_decoherence(rho, q, dur, self.noise.t_coh, k)
        return rho

    def _check(self, rho):
        if self.check_physical:
            self.worst = max(self.worst, st.physicality_violation(rho))

    def _advance(self, path: _Path):
        """Run until a measurement (returned as its local qubit and instruction) or the end."""
        prog = self.program.instructions
        k = self.kernels
        steps = 0
        while path.pc < len(prog):
            steps += 1
            if steps > self.max_steps:
                raise SimulationError("step budget exhausted; does the program loop forever?")
            pc = path.pc
            ins = prog[pc]
            path.pc_counts[pc] += 1
            path.pc += 1
            m = ins.mnemonic
            if m == "label":
                continue
            if m == "LDi":
                path.regs[ins.register] = ins.value
            elif m == "ST":
                path.memory.append(path.regs[ins.register])
            elif m == "ADDi":
                value = path.regs[ins.register] + ins.value
                if abs(value) > INT_LIMIT:
                    raise SimulationError(f"register {ins.register} overflowed")
                path.regs[ins.register] = value
            elif m == "BR":
                rhs = path.regs[ins.value] if isinstance(ins.value, str) else ins.value
                if compare(path.regs[ins.register], ins.cmp, rhs):
                    if ins.label not in self.labels:
                        raise SimulationError(f"unresolved label {ins.label!r}")
                    path.pc = self.labels[ins.label]
            else:
                u, qs, dur, noisy = self._ops[pc]
                if m in DIAGNOSTIC_MNEMONICS:
                    continue
                if m == "meas":
                    path.rho = self._noise(path.rho, qs, dur)
                    return qs[0], ins
                if m == "inite":
                    path.rho = k.reset(path.rho, qs[0], self.n)
                elif m == "entangle":
                    path.rho = k.reset(k.reset(path.rho, qs[0], self.n), qs[1], self.n)
                    path.rho = k.apply_1q(path.rho, H, qs[0], self.n)
                    path.rho = k.apply_2q(path.rho, CX, qs[0], qs[1], self.n)
                else:
                    path.rho = st.apply_unitary(path.rho, u, qs, k)
                if noisy:
                    path.rho = self._noise(path.rho, qs, dur)
                self._check(path.rho)
        return None

    def _settle(self, path: _Path, q: int, ins, bit: int, prob: float):
        path.rho = st.project_qubit(path.rho, q, bit, prob, self.kernels)
        value = 1 if bit == 0 else -1
        path.regs[ins.register] = value
        path.records.append((ins.qubits[0], ins.register, value))
        self._check(path.rho)

    def _fresh_path(self) -> _Path:
        regs = {r: 0 for r in self.program.registers}
        return _Path(0, st.zero_state(self.n), 1.0, regs, pc_counts=np.zeros(len(self.program.instructions)))

    # -- drivers -----------------------------------------------------------------

    def sample(self, rng: np.random.Generator) -> _Path:
        path = self._fresh_path()
        while True:
            hit = self._advance(path)
            if hit is None:
                return path
            q, ins = hit
            p0, p1 = st.outcome_probabilities(path.rho, q, self.kernels)
            bit = 0 if rng.random() < p0 else 1
            self._settle(path, q, ins, bit, p0 if bit == 0 else p1)

    def enumerate(self, max_paths: int = MAX_BRANCH_PATHS) -> list[_Path]:
        done, stack = [], [self._fresh_path()]
        while stack:
            path = stack.pop()
            hit = self._advance(path)
            if hit is None:
                done.append(path)
                continue
            q, ins = hit
            p0, p1 = st.outcome_probabilities(path.rho, q, self.kernels)
            for bit, p in ((1, p1), (0, p0)):
                if p * path.prob <= DROP_BRANCH_BELOW or p < st.MIN_BRANCH_PROB:
                    continue
                child = path.fork(path.rho.copy(), path.prob * p)
                self._settle(child, q, ins, bit, p)
                stack.append(child)
            if len(done) + len(stack) > max_paths:
                raise SimulationError(f"more than {max_paths} measurement branches; use sampling instead")
        return done


def _visible(records, hidden_prefix="_"):
    return tuple((r, v) for _, r, v in records if not r.startswith(hidden_prefix))


def _summarize(machine: Machine, paths: list[tuple[_Path, float]], logical_registers, mode, seed, shots,
               keep_state, norm: float = 1.0) -> RunResult:
    """Aggregate weighted paths; every weighted sum is divided by ``norm`` once at the end."""
    measured = []
    for ins in machine.program.instructions:
        if ins.mnemonic == "meas" and ins.register not in measured:
            measured.append(ins.register)
    reg_exp = {r: 0.0 for r in measured}
    qubit_sum: dict[int, float] = {}
    qubit_weight: dict[int, float] = {}
    dist: dict[tuple, float] = {}
    pc_counts = np.zeros(len(machine.program.instructions))
    stored = 0.0
    logical_values = []
    final = np.zeros_like(paths[0][0].rho) if keep_state and paths else None
    for path, w in paths:
        w = float(w)
        for r in measured:
            reg_exp[r] += w * path.regs[r]
        for q, _, v in path.records:
            qubit_sum[q] = qubit_sum.get(q, 0.0) + w * v
            qubit_weight[q] = qubit_weight.get(q, 0.0) + w
        key = _visible(path.records)
        dist[key] = dist.get(key, 0.0) + w
        pc_counts += w * path.pc_counts
        stored += w * len(path.memory)
        if logical_registers:
            logical_values.append((w, math.prod(path.regs[r] for r in logical_registers)))
        if final is not None:
            final += w * path.rho
    reg_exp = {r: v / norm for r, v in reg_exp.items()}
    dist = {k: v / norm for k, v in dist.items()}
    pc_counts /= norm
    stored /= norm
    if final is not None:
        final /= norm
    counts: dict[str, float] = {}
    for ins, c in zip(machine.program.instructions, pc_counts):
        counts[ins.mnemonic] = counts.get(ins.mnemonic, 0.0) + float(c)
    logical = stderr = None
    if logical_registers:
        logical = float(sum(w * v for w, v in logical_values)) / norm
        if mode == "sampled" and shots > 1:
            var = sum(w * (v - logical) ** 2 for w, v in logical_values) / (shots - 1)
            stderr = math.sqrt(var / shots)
        else:
            stderr = 0.0
    if mode == "exact":
        counts = {k: round(v, 12) for k, v in counts.items()}
    return RunResult(
        mode=mode, qubits=machine.qubits, seed=seed, shots=shots, noise=machine.noise,
        durations=machine.durations,
        register_expectations={r: float(v) for r, v in reg_exp.items()},
        qubit_expectations={q: qubit_sum[q] / qubit_weight[q] for q in sorted(qubit_sum)},
        distribution=dist, instruction_counts=counts, pc_counts=[float(c) for c in pc_counts],
        stored_results=float(stored), logical_registers=tuple(logical_registers),
        logical_expectation=logical, logical_stderr=stderr,
        records=[p.records for p, _ in paths] if mode == "sampled" else [],
        memory=[p.memory for p, _ in paths] if mode == "sampled" else [],
        final_state=final,
        max_physicality_violation=machine.worst if machine.check_physical else None,
    )


def run(program: Program | str, noise: NoiseParams = NOISELESS, durations: DurationTable = DEFAULT_DURATIONS,
        seed: int = 0, shots: int = 1000, logical_registers: Sequence[str] = (), keep_state: bool = True,
        check_physical: bool = False, kernels=None) -> RunResult:
    """Monte-Carlo execution: ``shots`` independent runs seeded from ``seed``."""
    if shots < 1:
        raise ValueError("shots must be positive")
    machine = Machine(program, noise, durations, kernels, check_physical)
    rng = np.random.default_rng(seed)
    paths = [(machine.sample(rng), 1) for _ in range(shots)]
    return _summarize(machine, paths, logical_registers, "sampled", seed, shots, keep_state, norm=shots)


def run_exact(program: Program | str, noise: NoiseParams = NOISELESS, durations: DurationTable = DEFAULT_DURATIONS,
              logical_registers: Sequence[str] = (), keep_state: bool = True, check_physical: bool = False,
              max_paths: int = MAX_BRANCH_PATHS, kernels=None) -> RunResult:
    """Weighted enumeration of every measurement branch; the shots-to-infinity limit of :func:`run`."""
    machine = Machine(program, noise, durations, kernels, check_physical)
    paths = [(p, p.prob) for p in machine.enumerate(max_paths)]
    return _summarize(machine, paths, logical_registers, "exact", None, 0, keep_state)

"""Canned experiments: built-in source circuits, compiler variants and noise-grid sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit_ir import Circuit, parse_circuit
from .codegen import Program, emit
from .durations import DEFAULT_DURATIONS, DurationTable
from .passes import PipelineOptions, compile_circuit
from .simulator import NoiseParams, bell_state, run, run_exact
from .topology import TopologyConfig

EXPERIMENTS = ("telecnot", "meas-x", "ghz-swap", "ghz-direct")
P_GRID = (0.0, 2.5e-4, 5e-4, 7.5e-4, 1e-3)
T_GRID = (0.1, 1.0, 10.0, 100.0)
X_PAIRS_PER_CARBON = 2

GHZ_CARBONS = (1, 2, 3, 4)
GHZ_LOGICAL = tuple(f"m{q}" for q in GHZ_CARBONS)
TELECNOT_CARBONS = (1, 3)


def ghz_source(x_gates_per_carbon: int = 0) -> str:
    """Four-carbon GHZ state grown from the electron, then read out carbon by carbon.

    The electron is measured in the X basis after fanning out; a -1 outcome
    leaves a relative phase that the conditional Z on the first carbon undoes.
    """
    lines = ["qubits 5", *(f"creg m{q}" for q in range(5)), "h q0"]
    lines += [f"cx q0 q{c}" for c in GHZ_CARBONS]
    lines += ["h q0", "measure q0 -> m0", "z q1 if m0 < 0"]
    for c in GHZ_CARBONS:
        lines += [f"x q{c}"] * x_gates_per_carbon
    lines += [f"measure q{c} -> m{c}" for c in GHZ_CARBONS]
    return "\n".join(lines) + "\n"


def meas_x_source(electron_bit: int) -> str:
    """Carbon flipped by a classically controlled X whenever the electron reads -1."""
    prep = ["x q0"] if electron_bit else []
    return "\n".join([
        "qubits 2", "creg e", "creg c", "init q0", "init q1", *prep,
        "measure q0 -> e", "x q1 if e < 0", "measure q1 -> c",
    ]) + "\n"


TELECNOT_SOURCE = """\
qubits 4
init q1
init q3
h q1
cx q1 q3
"""

TELECNOT_TOPOLOGY = TopologyConfig(num_nodes=2, qubits_per_node=2)
GHZ_TOPOLOGY = TopologyConfig(num_nodes=1, qubits_per_node=5)


@dataclass(frozen=True)
class Variant:
    name: str
    options: PipelineOptions


VARIANTS = {
    "ghz-swap": (Variant("full-swap", PipelineOptions(partial_swaps=False)),
                 Variant("partial-swap", PipelineOptions(partial_swaps=True))),
    "ghz-direct": (Variant("ddrf", PipelineOptions(direct_control=False)),
                   Variant("direct", PipelineOptions(direct_control=True))),
}


def _optimized(optimize: bool) -> Variant:
    return Variant("optimized", PipelineOptions()) if optimize else Variant("baseline", PipelineOptions.baseline())


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    grid: tuple[tuple[float, float], ...] = ()
    shots: int = 1000
    exact: bool = False
    seed: int = 0
    optimize: bool = True
    workers: int = 1
    check_physical: bool = False

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENTS)}")
        if not self.grid:
            object.__setattr__(self, "grid", default_grid(self.name))
        for p, t in self.grid:
            NoiseParams(p, t)
        if self.shots < 1:
            raise ValueError("shots must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def variants(self) -> tuple[Variant, ...]:
        if self.name in VARIANTS:
            return VARIANTS[self.name]
        return (_optimized(self.optimize),)


def default_grid(name: str) -> tuple[tuple[float, float], ...]:
    if name.startswith("ghz"):
        return tuple((p, t) for p in P_GRID for t in T_GRID)
    return ((0.0, math.inf),)


def make_grid(ps: Sequence[float], ts: Sequence[float]) -> tuple[tuple[float, float], ...]:
    return tuple((float(p), float(t)) for p in ps for t in ts)


def point_seed(seed: int, index: int) -> int:
    """Independent, reproducible seed for the ``index``-th run of a sweep."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def sources(name: str) -> list[tuple[str, Circuit, TopologyConfig]]:
    """Named source circuits of an experiment, with their topologies."""
    if name == "ghz-swap":
        return [("ghz", parse_circuit(ghz_source()), GHZ_TOPOLOGY)]
    if name == "ghz-direct":
        return [("ghz-x", parse_circuit(ghz_source(2 * X_PAIRS_PER_CARBON)), GHZ_TOPOLOGY)]
    if name == "meas-x":
        return [(f"prep{b}", parse_circuit(meas_x_source(b)), TopologyConfig(1, 2)) for b in (0, 1)]
    if name == "telecnot":
        return [("telecnot", parse_circuit(TELECNOT_SOURCE), TELECNOT_TOPOLOGY)]
    raise ValueError(f"unknown experiment {name!r}")


def compile_program(circuit: Circuit, config: TopologyConfig, options: PipelineOptions,
                    durations: DurationTable = DEFAULT_DURATIONS) -> Program:
    return emit(compile_circuit(circuit, config, options), durations)


@dataclass(frozen=True)
class _Job:
    index: int
    experiment: str
    source: str
    variant: str
    program: Program
    noise: NoiseParams
    exact: bool
    shots: int
    seed: int
    durations: DurationTable
    check_physical: bool = False


def _execute(job: _Job) -> dict:
    name = job.experiment
    logical = GHZ_LOGICAL if name.startswith("ghz") else ("c",) if name == "meas-x" else ()
    common = dict(logical_registers=logical, keep_state=name == "telecnot", check_physical=job.check_physical)
    if job.exact:
        res = run_exact(job.program, job.noise, job.durations, **common)
    else:
        res = run(job.program, job.noise, job.durations, seed=job.seed, shots=job.shots, **common)
    row = {
        "p_depol": job.noise.p_depol, "T_coh": job.noise.t_coh, "variant": job.variant,
        "source": job.source, "seed": None if job.exact else job.seed, "shots": 0 if job.exact else job.shots,
        "durations_digest": job.durations.digest(),
    }
    if job.check_physical:
        row["max_physicality_violation"] = res.max_physicality_violation
    if name == "telecnot":
        row["expectation"] = res.fidelity_with(bell_state(2), TELECNOT_CARBONS)
        row["stderr"] = 0.0
    else:
        row["expectation"] = res.logical_expectation
        row["stderr"] = res.logical_stderr
    if name == "meas-x":
        row["confusion"] = {
            f"{v:+d}": sum(p for key, p in res.distribution.items() if ("c", v) in key) for v in (1, -1)
        }
    return row


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list[dict] = field(default_factory=list)
    programs: dict[str, Program] = field(default_factory=dict)
    durations: DurationTable = DEFAULT_DURATIONS

    def confusion_matrix(self) -> list[list[float]]:
        """meas-x only: rows are electron preparations |0>, |1>; columns carbon outcomes +1, -1.

        Entries are counts in sampling mode and probabilities in exact mode.
        """
        out = []
        for prep in ("prep0", "prep1"):
            row = next(r for r in self.rows if r["source"] == prep)
            cells = [row["confusion"]["+1"], row["confusion"]["-1"]]
            out.append(cells if self.spec.exact else [round(c * self.spec.shots) for c in cells])
        return out

    def value(self, p: float, t: float, variant: str, source: str | None = None) -> float:
        for r in self.rows:
            if r["p_depol"] == p and r["T_coh"] == t and r["variant"] == variant and source in (None, r["source"]):
                return r["expectation"]
        raise KeyError((p, t, variant))

    def summary(self) -> dict:
        doc = {
            "format": "nvqc-experiment/1",
            "experiment": self.spec.name,
            "seed": self.spec.seed,
            "exact": self.spec.exact,
            "shots": 0 if self.spec.exact else self.spec.shots,
            "durations": self.durations.as_dict(),
            "durations_digest": self.durations.digest(),
            "variants": [v.name for v in self.spec.variants()],
            "rows": [_jsonable(r) for r in self.rows],
        }
        if self.spec.name == "meas-x":
            doc["confusion_matrix"] = self.confusion_matrix()
        return doc


def _jsonable(row: dict) -> dict:
    return {k: ("inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in row.items()}


def run_experiment(spec: ExperimentSpec, durations: DurationTable = DEFAULT_DURATIONS) -> ExperimentResult:
    """Compile every (source, variant) once, then run each over the noise grid.

    Rows come back sorted by (p, T, variant, source) whatever order the
    workers finish in.
    """
    result = ExperimentResult(spec, durations=durations)
    jobs = []
    for source, circuit, config in sources(spec.name):
        for variant in spec.variants():
            program = compile_program(circuit, config, variant.options, durations)
            result.programs[f"{source}/{variant.name}"] = program
            for p, t in spec.grid:
                jobs.append(_Job(len(jobs), spec.name, source, variant.name, program, NoiseParams(p, t),
                                 spec.exact, spec.shots, point_seed(spec.seed, len(jobs)), durations,
                                 spec.check_physical))
    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_execute, jobs))
    else:
        rows = [_execute(j) for j in jobs]
    result.rows = sorted(rows, key=lambda r: (r["p_depol"], r["T_coh"], r["variant"], r["source"]))
    return result


CSV_COLUMNS = ("p_depol", "T_coh", "variant", "expectation", "stderr", "shots")


def to_csv(result: ExperimentResult) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    multi = len({r["source"] for r in result.rows}) > 1
    for r in result.rows:
        variant = f"{r['source']}/{r['variant']}" if multi else r["variant"]
        writer.writerow([repr(r["p_depol"]), repr(r["T_coh"]), variant, repr(r["expectation"]),
                         repr(r["stderr"]), r["shots"]])
    return buf.getvalue()

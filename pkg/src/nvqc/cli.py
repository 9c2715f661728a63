"""``nvqc`` command line: compile, simulate and run the canned experiments.

Exit codes: 0 success, 1 usage error, 2 compile error, 3 simulation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .circuit_ir import ParseError, parse_circuit
from .codegen import TomographySpec, assemble, disassemble, emit, emit_tomography
from .errors import AssemblyError, CompileError, PipelineError, SimulationError
from .experiments import EXPERIMENTS, ExperimentSpec, make_grid, run_experiment, to_csv
from .passes import DiagnosticsConfig, PipelineOptions, compile_circuit, compile_tomography
from .simulator import NoiseParams, bell_state, load_backend, run, run_exact
from .topology import TopologyConfig, load_topology, parse_topology

EXIT_OK, EXIT_USAGE, EXIT_COMPILE, EXIT_SIMULATION = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _qubit(text: str) -> int:
    body = text[1:] if text[:1] in "qQ" else text
    if not body.isdigit():
        raise argparse.ArgumentTypeError(f"not a qubit: {text!r}")
    return int(body)


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nvqc", description=__doc__.splitlines()[0].replace("``", ""))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compile", help="compile a source circuit to assembly")
    c.add_argument("input", type=Path)
    c.add_argument("--topology", help="nodes=N,per_node=M (default: one node sized to the circuit)")
    c.add_argument("--topology-file", type=Path, help="key-value file with num_nodes and qubits_per_node")
    c.add_argument("--no-diamond-opts", action="store_true", help="DDrf control and full swaps everywhere")
    c.add_argument("--diagnostics", action="store_true", help="insert calibration checks and the charge check")
    c.add_argument("--tomography", type=int, metavar="R", help="wrap the body in an R-round measurement loop")
    c.add_argument("--measure", type=_qubit, nargs="+", default=[], metavar="Q", help="qubits read out each round")
    c.add_argument("--out", type=Path)

    s = sub.add_parser("simulate", help="run an assembly program on the density-matrix simulator")
    s.add_argument("input", type=Path)
    s.add_argument("--p-depol", type=float, default=0.0)
    s.add_argument("--t-coh", type=float, default=math.inf, help="coherence time in seconds (default: inf)")
    s.add_argument("--shots", type=int, default=1000)
    s.add_argument("--exact", action="store_true", help="enumerate measurement branches instead of sampling")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--logical", nargs="+", default=[], metavar="REG", help="registers multiplied into a logical value")
    s.add_argument("--bell-fidelity", type=_qubit, nargs="+", metavar="Q",
                   help="report fidelity of these qubits with (|0..0> + |1..1>)/sqrt(2)")
    s.add_argument("--kernels", choices=("numba", "numpy"), help="override NVQC_KERNELS")
    s.add_argument("--out", type=Path)

    e = sub.add_parser("experiment", help="run a canned experiment over a noise grid")
    e.add_argument("name", choices=EXPERIMENTS)
    e.add_argument("--p-depol", type=_float_list, help="comma-separated depolarizing probabilities")
    e.add_argument("--t-coh", type=_float_list, help="comma-separated coherence times in seconds")
    e.add_argument("--shots", type=int, default=1000)
    e.add_argument("--exact", action="store_true")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--no-diamond-opts", action="store_true", help="baseline compile for telecnot and meas-x")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    e.add_argument("--summary", type=Path, help="JSON summary destination")
    return parser


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _topology(args, num_qubits: int) -> TopologyConfig:
    if args.topology and args.topology_file:
        raise _UsageError("give --topology or --topology-file, not both")
    try:
        if args.topology:
            return parse_topology(args.topology)
        if args.topology_file:
            return load_topology(args.topology_file)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    return TopologyConfig(1, max(num_qubits, 1))


def cmd_compile(args) -> int:
    text = args.input.read_text()
    try:
        circuit = parse_circuit(text)
    except ParseError as exc:
        print(f"{args.input}:{exc.line}:{exc.column}: error: {exc.message}", file=sys.stderr)
        return EXIT_COMPILE
    config = _topology(args, circuit.num_qubits)
    diagnostics = DiagnosticsConfig(enabled=args.diagnostics)
    options = PipelineOptions.baseline(diagnostics) if args.no_diamond_opts else PipelineOptions(diagnostics=diagnostics)
    if args.measure and args.tomography is None:
        raise _UsageError("--measure needs --tomography")
    if args.tomography is not None:
        spec = TomographySpec(args.tomography, tuple(args.measure))
        try:
            spec.check(config)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
        program = emit_tomography(compile_tomography(circuit, config, spec, options), spec)
    else:
        program = emit(compile_circuit(circuit, config, options))
    _write(disassemble(program), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.shots < 1:
        raise _UsageError("--shots must be positive")
    try:
        noise = NoiseParams(args.p_depol, args.t_coh)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    program = assemble(args.input.read_text())
    kernels = load_backend(args.kernels) if args.kernels else None
    common = dict(logical_registers=tuple(args.logical), keep_state=bool(args.bell_fidelity),
                  check_physical=True, kernels=kernels)
    if args.exact:
        result = run_exact(program, noise, **common)
    else:
        result = run(program, noise, seed=args.seed, shots=args.shots, **common)
    if args.bell_fidelity:
        missing = [q for q in args.bell_fidelity if q not in result.qubits]
        if missing:
            raise SimulationError(f"program never touches {', '.join(f'q{q}' for q in missing)}")
        result.extras["fidelity"] = result.fidelity_with(bell_state(len(args.bell_fidelity)), args.bell_fidelity)
        result.extras["fidelity_qubits"] = [f"q{q}" for q in args.bell_fidelity]
    _write(result.to_json(), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    grid = ()
    if args.p_depol is not None or args.t_coh is not None:
        base = ExperimentSpec(args.name)
        ps = args.p_depol if args.p_depol is not None else sorted({p for p, _ in base.grid})
        ts = args.t_coh if args.t_coh is not None else sorted({t for _, t in base.grid})
        grid = make_grid(ps, ts)
    try:
        spec = ExperimentSpec(args.name, grid, args.shots, args.exact, args.seed, not args.no_diamond_opts,
                              args.workers)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    result = run_experiment(spec)
    _write(to_csv(result), args.out)
    if args.summary:
        args.summary.write_text(json.dumps(result.summary(), sort_keys=True, indent=1) + "\n")
    return EXIT_OK


COMMANDS = {"compile": cmd_compile, "simulate": cmd_simulate, "experiment": cmd_experiment}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nvqc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CompileError, PipelineError) as exc:
        print(f"nvqc: compile error: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    except (AssemblyError, SimulationError) as exc:
        print(f"nvqc: simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())

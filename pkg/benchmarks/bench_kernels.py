"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--qubits 4 8 10] [--repeat 5]

Times each density-matrix kernel at several register sizes, then a full
exact GHZ sweep point, and prints a table with the speedup of numba over numpy.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from nvqc.circuit_ir import parse_circuit
from nvqc.experiments import GHZ_LOGICAL, GHZ_TOPOLOGY, compile_program, ghz_source
from nvqc.passes import PipelineOptions
from nvqc.simulator import NoiseParams, load_backend, run_exact

BACKENDS = ("numpy", "numba")


def random_density(rng, n):
    a = rng.normal(size=(2 ** n, 2 ** n)) + 1j * rng.normal(size=(2 ** n, 2 ** n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def kernel_cases(n, rng):
    rho = random_density(rng, n)
    u1 = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    u2 = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    k = n // 2
    return rho, {
        "apply_1q": lambda b, r: b.apply_1q(r, u1, k, n),
        "apply_2q": lambda b, r: b.apply_2q(r, u2, 0, n - 1, n),
        "depolarize": lambda b, r: b.depolarize(r, k, n, 1e-3),
        "reset": lambda b, r: b.reset(r, k, n),
        "prob_zero": lambda b, r: b.prob_zero(r, k, n),
    }


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_kernels(sizes, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        rho, cases = kernel_cases(n, rng)
        number = 2 ** max(0, 14 - n)
        for name, call in cases.items():
            times = {}
            for backend_name in BACKENDS:
                backend = load_backend(backend_name)
                call(backend, rho.copy())  # compile / warm caches
                work = rho.copy()
                times[backend_name] = best_of(lambda: call(backend, work), repeat, number)
            rows.append((f"{name} n={n}", times))
    return rows


def bench_program(repeat):
    program = compile_program(parse_circuit(ghz_source(4)), GHZ_TOPOLOGY, PipelineOptions.baseline())
    noise = NoiseParams(1e-3, 0.1)
    times = {}
    for backend_name in BACKENDS:
        backend = load_backend(backend_name)

        def go():
            run_exact(program, noise, logical_registers=GHZ_LOGICAL, keep_state=False, kernels=backend)

        go()
        times[backend_name] = best_of(go, repeat, 1)
    return ("ghz-direct exact run (5 qubits)", times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, nargs="+", default=[4, 8, 10])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    rows = bench_kernels(args.qubits, args.repeat) + [bench_program(args.repeat)]
    width = max(len(label) for label, _ in rows)
    print(f"{'case':<{width}}  {'numpy':>12}  {'numba':>12}  {'speedup':>8}")
    for label, t in rows:
        print(f"{label:<{width}}  {t['numpy'] * 1e6:>10.1f}us  {t['numba'] * 1e6:>10.1f}us  "
              f"{t['numpy'] / t['numba']:>7.1f}x")


if __name__ == "__main__":
    main()

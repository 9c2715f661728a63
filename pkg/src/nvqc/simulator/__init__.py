"""Noisy density-matrix simulator for emitted assembly."""

from .kernels import backend, load_backend
from .machine import NOISELESS, Machine, NoiseParams, RunResult, run, run_exact
from .state import (
    apply_depolarizing,
    apply_idle_decoherence,
    bell_state,
    fidelity,
    is_physical,
    measure,
    partial_trace,
    physicality_violation,
    zero_state,
)

__all__ = [
    "Machine", "NOISELESS", "NoiseParams", "RunResult", "apply_depolarizing", "apply_idle_decoherence",
    "backend", "bell_state", "fidelity", "is_physical", "load_backend", "measure", "partial_trace",
    "physicality_violation", "run", "run_exact", "zero_state",
]

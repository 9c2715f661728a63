"""Density-matrix operations on a register of ``n`` qubits (qubit 0 most significant)."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import SimulationError
from .kernels import backend

PHYSICAL_TOL = 1e-9
MIN_BRANCH_PROB = 1e-12


def num_qubits(rho: np.ndarray) -> int:
    n = int(round(math.log2(rho.shape[0])))
    if rho.shape != (2 ** n, 2 ** n):
        raise SimulationError(f"not a qubit density matrix: shape {rho.shape}")
    return n


def zero_state(n: int) -> np.ndarray:
    rho = np.zeros((2 ** n, 2 ** n), dtype=np.complex128)
    rho[0, 0] = 1.0
    return rho


def apply_unitary(rho, u, qubits: Sequence[int], kernels=None) -> np.ndarray:
    kernels = kernels or backend
    n = num_qubits(rho)
    u = np.ascontiguousarray(u, dtype=np.complex128)
    if len(qubits) == 1:
        return kernels.apply_1q(rho, u, qubits[0], n)
    return kernels.apply_2q(rho, u, qubits[0], qubits[1], n)


def apply_depolarizing(rho, q: int, p: float, kernels=None) -> np.ndarray:
    """(1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) on qubit ``q``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("depolarizing probability must lie in [0, 1]")
    if p == 0.0:
        return rho
    return (kernels or backend).depolarize(rho, q, num_qubits(rho), p)


def idle_mixing(dt: float, coherence_time: float) -> float:
    """Weight of the maximally mixed component after idling ``dt`` seconds."""
    if dt < 0 or coherence_time <= 0:
        raise ValueError("need dt >= 0 and a positive coherence time")
    if math.isinf(coherence_time) or dt == 0:
        return 0.0
    return -math.expm1(-dt / coherence_time)


def apply_idle_decoherence(rho, q: int, dt: float, coherence_time: float, kernels=None) -> np.ndarray:
    """(1 - lam) rho + lam (I/2 tensor Tr_q rho) with lam = 1 - exp(-dt/T).

    Mixing toward I/2 equals depolarizing with p = 3 lam / 4.
    """
    lam = idle_mixing(dt, coherence_time)
    if lam == 0.0:
        return rho
    return (kernels or backend).depolarize(rho, q, num_qubits(rho), 0.75 * lam)


def reset_qubit(rho, q: int, kernels=None) -> np.ndarray:
    return (kernels or backend).reset(rho, q, num_qubits(rho))


def probability_zero(rho, q: int, kernels=None) -> float:
    p = float((kernels or backend).prob_zero(rho, q, num_qubits(rho)))
    return min(1.0, max(0.0, p))


def outcome_probabilities(rho, q: int, kernels=None) -> tuple[float, float]:
    """(P(0), P(1)) from the diagonal, normalized by the actual trace.

    Taking P(1) as 1 - P(0) would hand rounding drift in the trace to a rare
    branch, where renormalization blows it up by 1/P(1).
    """
    total = float(np.trace(rho).real)
    zero = float((kernels or backend).prob_zero(rho, q, num_qubits(rho)))
    p0 = min(1.0, max(0.0, zero / total))
    p1 = min(1.0, max(0.0, (total - zero) / total))
    return p0, p1


def project_qubit(rho, q: int, bit: int, prob: float, kernels=None) -> np.ndarray:
    if prob < MIN_BRANCH_PROB:
        raise SimulationError("refusing to renormalize a branch of vanishing probability")
    rho = (kernels or backend).project(rho, q, num_qubits(rho), bit, prob)
    return rho / float(np.trace(rho).real)


def measure(rho, q: int, rng: np.random.Generator, kernels=None) -> tuple[int, np.ndarray]:
    """Born-rule Z measurement: +1 for |0>, -1 for |1>, with the collapsed state."""
    p0, p1 = outcome_probabilities(rho, q, kernels)
    bit = 0 if rng.random() < p0 else 1
    prob = p0 if bit == 0 else p1
    return (1 if bit == 0 else -1), project_qubit(rho, q, bit, prob, kernels)


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced state on ``keep`` (in the given order)."""
    n = num_qubits(rho)
    keep = list(keep)
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    t = t.transpose(keep + drop + [n + q for q in keep] + [n + q for q in drop])
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    return np.einsum("ajbj->ab", t.reshape(dk, dd, dk, dd))


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clipped to [0, 1]."""
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    s = _psd_sqrt(rho)
    m = s @ sigma @ s
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    f = float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2)
    return min(1.0, max(0.0, f))


def physicality_violation(rho: np.ndarray) -> float:
    """Largest deviation from unit trace, Hermiticity or positivity."""
    trace_err = abs(np.trace(rho) - 1.0)
    herm_err = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    neg = -float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)))
    return max(trace_err, herm_err, neg, 0.0)


def is_physical(rho: np.ndarray, tol: float = PHYSICAL_TOL) -> bool:
    return physicality_violation(rho) <= tol


def bell_state(n: int = 2) -> np.ndarray:
    """Projector onto (|0..0> + |1..1>)/sqrt(2)."""
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = v[-1] = 1 / math.sqrt(2)
    return np.outer(v, v.conj())

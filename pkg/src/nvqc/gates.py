"""Gate matrices for source gates and the NV native set, plus ZYZ Euler angles.

Two-qubit native matrices act on (electron, carbon) with the electron as the
most significant factor.
"""

from __future__ import annotations

import math

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
SDG = np.diag([1, -1j]).astype(complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)

PAULI = {"x": X, "y": Y, "z": Z}
AXES = ("x", "y", "z")


def rotation(axis: str, theta: float) -> np.ndarray:
    """exp(-i theta/2 sigma_axis)."""
    return math.cos(theta / 2) * I2 - 1j * math.sin(theta / 2) * PAULI[axis]


def conditional_rotation(axis: str, theta: float) -> np.ndarray:
    """Carbon turns by +theta when the electron is |0>, by -theta when |1>."""
    return np.kron(P0, rotation(axis, theta)) + np.kron(P1, rotation(axis, -theta))


def half_conditioned_rotation(axis: str, theta: float) -> np.ndarray:
    """Carbon turns by theta only when the electron is |1>."""
    return np.kron(P0, I2) + np.kron(P1, rotation(axis, theta))


def bell_pair() -> np.ndarray:
    """(|00> + |11>)/sqrt(2) as a state vector."""
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / math.sqrt(2)
    return v


def controlled(u: np.ndarray) -> np.ndarray:
    """Control on the first (most significant) qubit."""
    return np.kron(P0, I2) + np.kron(P1, u)


SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
CX = controlled(X)
CZ = controlled(Z)


def normalize_half_turn(theta: float) -> float:
    """Wrap into (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    return math.pi if t == -math.pi else t


def euler_zyz(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (a, b, c) with u = phase * RZ(a) @ RY(b) @ RZ(c), each in (-pi, pi]."""
    u = np.asarray(u, dtype=complex)
    v = u / np.sqrt(np.linalg.det(u))
    a00, a10 = v[0, 0], v[1, 0]
    b = 2 * math.atan2(abs(a10), abs(a00))
    plus = -2 * np.angle(a00) if abs(a00) > 1e-12 else 0.0
    minus = 2 * np.angle(a10) if abs(a10) > 1e-12 else 0.0
    a = (plus + minus) / 2
    c = (plus - minus) / 2
    return normalize_half_turn(a), normalize_half_turn(b), normalize_half_turn(c)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    if a.shape != b.shape:
        return False
    dim = a.shape[0]
    return abs(abs(np.trace(a.conj().T @ b)) - dim) < tol * dim


def axis_rotation(u: np.ndarray, tol: float = 1e-10) -> tuple[str, float] | None:
    """Return (axis, theta) if ``u`` is a rotation about a single Pauli axis up to phase."""
    u = np.asarray(u, dtype=complex)
    v = u / np.sqrt(np.linalg.det(u))
    # v = cos(t/2) I - i sin(t/2) n.sigma; read off n from the traceless part
    cos_half = (v[0, 0] + v[1, 1]).real / 2
    comps = {
        "x": -(v[0, 1] + v[1, 0]).imag / 2,
        "y": (v[1, 0] - v[0, 1]).real / 2,
        "z": -(v[0, 0] - v[1, 1]).imag / 2,
    }
    nonzero = [k for k, s in comps.items() if abs(s) > tol]
    if not nonzero:
        return "z", 0.0
    if len(nonzero) != 1:
        return None
    axis = nonzero[0]
    theta = normalize_half_turn(2 * math.atan2(comps[axis], cos_half))
    if not equal_up_to_phase(rotation(axis, theta), u, 1e-9):
        return None
    return axis, theta


def source_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """Matrix of a source gate (first qubit most significant for two-qubit kinds)."""
    fixed = {"i": I2, "x": X, "y": Y, "z": Z, "h": H, "s": S, "sdg": SDG,
             "cx": CX, "cz": CZ, "swap": SWAP}
    if kind in fixed:
        return fixed[kind]
    if kind in ("rx", "ry", "rz"):
        return rotation(kind[1], angle)
    if kind == "crot":
        return conditional_rotation("x", angle)
    raise ValueError(f"no matrix for {kind!r}")

"""Density-matrix kernels in plain numpy (tensor reshapes, no loops).

Qubit ``k`` of ``n`` is axis ``k`` of the row index, so qubit 0 is the most
significant bit.  All kernels return a new array.
"""

from __future__ import annotations

import numpy as np


def _as_tensor(rho, n):
    return rho.reshape((2,) * (2 * n))


def _act(t, u, axes):
    m = len(axes)
    t = np.moveaxis(t, axes, range(m))
    shape = t.shape
    t = (u @ t.reshape(2 ** m, -1)).reshape(shape)
    return np.moveaxis(t, range(m), axes)


def apply_1q(rho, u, k, n):
    t = _act(_as_tensor(rho, n), u, [k])
    t = _act(t, u.conj(), [n + k])
    return t.reshape(rho.shape)


def apply_2q(rho, u, k1, k2, n):
    t = _act(_as_tensor(rho, n), u, [k1, k2])
    t = _act(t, u.conj(), [n + k1, n + k2])
    return t.reshape(rho.shape)


def _blocks(rho, k, n):
    """View with qubit k's row and column bits moved to the front."""
    return np.moveaxis(_as_tensor(rho, n), [k, n + k], [0, 1])


def depolarize(rho, k, n, p):
    b = _blocks(rho, k, n)
    out = np.empty_like(b)
    keep, mix, off = 1 - 2 * p / 3, 2 * p / 3, 1 - 4 * p / 3
    out[0, 0] = keep * b[0, 0] + mix * b[1, 1]
    out[1, 1] = keep * b[1, 1] + mix * b[0, 0]
    out[0, 1] = off * b[0, 1]
    out[1, 0] = off * b[1, 0]
    return np.moveaxis(out, [0, 1], [k, n + k]).reshape(rho.shape)


def reset(rho, k, n):
    b = _blocks(rho, k, n)
    out = np.zeros_like(b)
    out[0, 0] = b[0, 0] + b[1, 1]
    return np.moveaxis(out, [0, 1], [k, n + k]).reshape(rho.shape)


def prob_zero(rho, k, n):
    diag = np.real(np.diagonal(rho)).reshape((2,) * n)
    return float(np.moveaxis(diag, k, 0)[0].sum())


def project(rho, k, n, bit, prob):
    b = _blocks(rho, k, n)
    out = np.zeros_like(b)
    out[bit, bit] = b[bit, bit] / prob
    return np.moveaxis(out, [0, 1], [k, n + k]).reshape(rho.shape)

"""Kernel backend selection.

``NVQC_KERNELS=numpy`` forces the pure-numpy path; the default uses numba
when it imports and falls back to numpy otherwise.  Numba kernels mutate their
input, so every wrapper here takes ownership of ``rho``.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

from . import _kernels_numpy

KERNEL_NAMES = ("apply_1q", "apply_2q", "depolarize", "reset", "prob_zero", "project")


def _namespace(module, name):
    return SimpleNamespace(name=name, **{k: getattr(module, k) for k in KERNEL_NAMES})


def load_backend(name: str) -> SimpleNamespace:
    if name == "numpy":
        return _namespace(_kernels_numpy, "numpy")
    if name == "numba":
        from . import _kernels_numba
        return _namespace(_kernels_numba, "numba")
    raise ValueError(f"unknown kernel backend {name!r}; use 'numba' or 'numpy'")


def _default_backend() -> SimpleNamespace:
    requested = os.environ.get("NVQC_KERNELS", "numba").strip().lower()
    if requested == "numba":
        try:
            return load_backend("numba")
        except ImportError:
            return load_backend("numpy")
    return load_backend(requested)


backend = _default_backend()

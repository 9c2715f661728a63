"""Calibration and charge-state checks wrapped around a compiled body."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import native as nv
from ..errors import DiagnosticsError
from ..native import NativeCircuit

LARMOR_ELECTRON = "larmor_e"
RABI_ELECTRON = "rabi_e"
LARMOR_CARBON = "larmor_c"
RABI_CARBON = "rabi_c"
CRC = "crc"

ORDER = (LARMOR_ELECTRON, RABI_ELECTRON, LARMOR_CARBON, RABI_CARBON, CRC)

# each diagnostic needs these to have run first
REQUIRES = {
    LARMOR_ELECTRON: (),
    RABI_ELECTRON: (LARMOR_ELECTRON,),
    LARMOR_CARBON: (LARMOR_ELECTRON, RABI_ELECTRON),
    RABI_CARBON: (LARMOR_ELECTRON, RABI_ELECTRON, LARMOR_CARBON),
    CRC: (),
}


@dataclass(frozen=True)
class DiagnosticsConfig:
    enabled: bool = False
    include: frozenset = field(default_factory=lambda: frozenset(ORDER))

    def check(self) -> None:
        unknown = set(self.include) - set(ORDER)
        if unknown:
            raise DiagnosticsError(f"unknown diagnostics {sorted(unknown)}")
        for name in self.include:
            missing = [r for r in REQUIRES[name] if r not in self.include]
            if missing:
                raise DiagnosticsError(f"{name} requires {', '.join(missing)}")


def insert_diagnostics(circuit: NativeCircuit, config: DiagnosticsConfig) -> NativeCircuit:
    if not config.enabled:
        return circuit
    config.check()
    head = [nv.diagnostic(name) for name in ORDER if name in config.include]
    tail = [nv.diagnostic(CRC)] if CRC in config.include else []
    return circuit.with_ops(head + circuit.ops + tail)

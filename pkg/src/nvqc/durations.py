"""Per-mnemonic instruction durations in seconds."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

DIAGNOSTIC_MNEMONICS = ("larmor_e", "rabi_e", "larmor_c", "rabi_c", "crc")


@dataclass(frozen=True)
class DurationTable:
    qgatee: float = 100e-9
    crot: float = 1e-3
    qgatec: float = 1e-3
    qgatedir: float = 1e-3
    frame: float = 0.0
    inite: float = 10e-6
    meas: float = 10e-6
    entangle: float = 1e-3
    diagnostic: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise ValueError(f"duration {name} must be non-negative")

    def of(self, mnemonic: str, axis: str | None = None) -> float:
        """Duration of one instruction; z-axis rotations are frame updates."""
        if mnemonic in DIAGNOSTIC_MNEMONICS:
            return self.diagnostic
        if axis == "z" and mnemonic in ("qgatee", "qgatec"):
            return self.frame
        return getattr(self, mnemonic)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


DEFAULT_DURATIONS = DurationTable()

"""NV-center layout: one electron plus carbons per node, star coupling within a node."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path


class QubitRole(str, enum.Enum):
    ELECTRON = "electron"
    CARBON = "carbon"


@dataclass(frozen=True)
class TopologyConfig:
    num_nodes: int = 1
    qubits_per_node: int = 5

    def __post_init__(self):
        if self.num_nodes < 1:
            raise ValueError("num_nodes must be positive")
        if self.qubits_per_node < 1:
            raise ValueError("qubits_per_node must be positive")

    @property
    def total_qubits(self) -> int:
        return self.num_nodes * self.qubits_per_node

    def electrons(self) -> list[int]:
        return [electron_of(n, self) for n in range(self.num_nodes)]

    def carbons(self, node: int | None = None) -> list[int]:
        nodes = range(self.num_nodes) if node is None else [node]
        per = self.qubits_per_node
        return [n * per + k for n in nodes for k in range(1, per)]


def _check_qubit(q: int, config: TopologyConfig) -> None:
    if not 0 <= q < config.total_qubits:
        raise ValueError(f"qubit q{q} outside topology of {config.total_qubits} qubits")


def qubit_role(q: int, config: TopologyConfig) -> QubitRole:
    _check_qubit(q, config)
    return QubitRole.ELECTRON if q % config.qubits_per_node == 0 else QubitRole.CARBON


def is_electron(q: int, config: TopologyConfig) -> bool:
    return qubit_role(q, config) is QubitRole.ELECTRON


def node_of(q: int, config: TopologyConfig) -> int:
    _check_qubit(q, config)
    return q // config.qubits_per_node


def electron_of(node: int, config: TopologyConfig) -> int:
    if not 0 <= node < config.num_nodes:
        raise ValueError(f"node {node} outside topology of {config.num_nodes} nodes")
    return node * config.qubits_per_node


def node_electron(q: int, config: TopologyConfig) -> int:
    """Electron that mediates every operation on ``q``."""
    return electron_of(node_of(q, config), config)


# ---------------------------------------------------------------------------
# config parsing

_KEYS = {
    "num_nodes": "num_nodes",
    "nodes": "num_nodes",
    "qubits_per_node": "qubits_per_node",
    "per_node": "qubits_per_node",
}


def _from_pairs(pairs) -> TopologyConfig:
    values = {}
    for key, raw in pairs:
        key = key.strip().lower()
        if key not in _KEYS:
            raise ValueError(f"unknown topology key {key!r}")
        try:
            values[_KEYS[key]] = int(raw.strip())
        except ValueError:
            raise ValueError(f"topology value for {key!r} must be an integer") from None
    return TopologyConfig(**values)


def parse_topology(spec: str) -> TopologyConfig:
    """Parse ``nodes=N,per_node=M`` (keys may also be spelled num_nodes / qubits_per_node)."""
    pairs = []
    for item in filter(None, (s.strip() for s in spec.split(","))):
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        pairs.append(item.split("=", 1))
    return _from_pairs(pairs)


def load_topology(path: str | Path) -> TopologyConfig:
    """Read a key-value file with ``num_nodes`` and ``qubits_per_node`` (``#`` comments allowed)."""
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        if sep not in line:
            raise ValueError(f"expected key = value, got {line!r}")
        pairs.append(line.split(sep, 1))
    return _from_pairs(pairs)

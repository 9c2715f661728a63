"""Hardware-aware compiler passes, applied in a fixed order by :func:`compile_circuit`."""

from .control import select_carbon_control
from .diagnostics import DiagnosticsConfig, insert_diagnostics
from .liveness import LivenessEntry, LivenessInfo, analyze_electron_liveness
from .lower import lower_to_native
from .pipeline import PipelineOptions, compile_circuit, compile_tomography, tomography_circuit
from .routing import route_init_measure
from .swaps import BasisMatch, detect_measurement_basis, select_swaps

__all__ = [
    "BasisMatch", "DiagnosticsConfig", "LivenessEntry", "LivenessInfo", "PipelineOptions",
    "analyze_electron_liveness", "compile_circuit", "compile_tomography", "detect_measurement_basis",
    "insert_diagnostics", "lower_to_native", "route_init_measure", "select_carbon_control", "select_swaps",
    "tomography_circuit",
]

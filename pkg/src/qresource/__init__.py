"""Entanglement analysis of small multi-qubit pure states: subsystem
entropies, Schmidt structure, and exact teleportation, superdense-coding
and two-basis QKD checks."""

from .catalog import catalog_names, catalog_state, ghz
from .densecoding import sdc_report
from .entropy import Bipartition, entropy_table, schmidt_decompose, von_neumann_entropy
from .ket import Ket, format_ket, parse_ket
from .qkd import correlation_check, qkd_suitability, simulate_qkd
from .teleport import TeleportTask, build_measurement_basis, check_feasibility, simulate_teleportation

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "Ket",
    "TeleportTask",
    "build_measurement_basis",
    "catalog_names",
    "catalog_state",
    "check_feasibility",
    "correlation_check",
    "entropy_table",
    "format_ket",
    "ghz",
    "parse_ket",
    "qkd_suitability",
    "schmidt_decompose",
    "sdc_report",
    "simulate_qkd",
    "simulate_teleportation",
    "von_neumann_entropy",
]

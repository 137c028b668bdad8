"""Named resource states: the four-qubit family, Bell states and n-qubit GHZ."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .ket import Ket
from .linalg import permute_qubits


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    state: Ket
    description: str


def _build(terms, scale):
    n = len(terms[0][0])
    amps = np.zeros(2**n, dtype=complex)
    for bits, c in terms:
        amps[int(bits, 2)] = c * scale
    return Ket(n, amps)


_HALF = 0.5
_RSQRT2 = 1 / np.sqrt(2)

_FOUR_QUBIT = {
    "GHZ4": (
        [("0000", 1), ("1111", 1)],
        _RSQRT2,
        "four-qubit GHZ state (|0000> + |1111>)/sqrt(2)",
    ),
    "W4": (
        [("0001", 1), ("0010", 1), ("0100", 1), ("1000", 1)],
        _HALF,
        "four-qubit W state, one excitation in equal superposition",
    ),
    "OMEGA": (
        [("0000", 1), ("0110", 1), ("1001", 1), ("1111", -1)],
        _HALF,
        "four-qubit cluster state (|0000> + |0110> + |1001> - |1111>)/2",
    ),
    "S1": (
        [("0000", 1), ("0101", 1), ("1000", 1), ("1110", 1)],
        _HALF,
        "(|0000> + |0101> + |1000> + |1110>)/2",
    ),
    "S2": (
        [("0000", 1), ("1011", 1), ("1101", 1), ("1110", 1)],
        _HALF,
        "(|0000> + |1011> + |1101> + |1110>)/2",
    ),
    "PHI+": ([("00", 1), ("11", 1)], _RSQRT2, "Bell state (|00> + |11>)/sqrt(2)"),
    "PHI-": ([("00", 1), ("11", -1)], _RSQRT2, "Bell state (|00> - |11>)/sqrt(2)"),
    "PSI+": ([("01", 1), ("10", 1)], _RSQRT2, "Bell state (|01> + |10>)/sqrt(2)"),
    "PSI-": ([("01", 1), ("10", -1)], _RSQRT2, "Bell state (|01> - |10>)/sqrt(2)"),
}

_ALIASES = {"GHZ": "GHZ4", "W": "W4", "Ω": "OMEGA", "CLUSTER": "OMEGA"}

GHZ_RANGE = range(2, 7)
_GHZ_RE = re.compile(r"^GHZ\((\d+)\)$")


class UnknownStateError(KeyError):
    def __str__(self):
        return self.args[0]


def ghz(n):
    if n not in GHZ_RANGE:
        raise UnknownStateError(f"GHZ(n) is available for 2 <= n <= 6, got n={n}")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = _RSQRT2
    return Ket(n, amps)


def catalog_names():
    return list(_FOUR_QUBIT) + [f"GHZ({n})" for n in GHZ_RANGE]


def catalog_entry(name):
    key = name.strip().upper().replace(" ", "")
    key = _ALIASES.get(key, key)
    if key in _FOUR_QUBIT:
        terms, scale, desc = _FOUR_QUBIT[key]
        return CatalogEntry(key, _build(terms, scale), desc)
    m = _GHZ_RE.match(key)
    if m:
        n = int(m.group(1))
        return CatalogEntry(f"GHZ({n})", ghz(n), f"{n}-qubit GHZ state")
    raise UnknownStateError(
        f"unknown state {name!r}; known: {', '.join(catalog_names())}"
    )


def catalog_state(name):
    """Exact state vector for a catalog name such as ``"OMEGA"`` or ``"GHZ(5)"``."""
    return catalog_entry(name).state


def permute(state, perm):
    """Relabel qubits of ``state``: new qubit i holds old qubit ``perm[i-1]``."""
    return Ket(state.n_qubits, permute_qubits(state.amplitudes, perm))


# Four-qubit states the analyses revolve around, in table order.
FOUR_QUBIT_STATES = ("GHZ4", "OMEGA", "W4", "S1", "S2")

"""Exact superdense-coding capacity under Pauli encodings.

The sender applies a Pauli string to her qubits; the number of messages Bob
can decode perfectly is the size of the largest mutually orthogonal subset
of the resulting states, i.e. a maximum clique of the orthogonality graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .entropy import subsystem_entropy
from .ket import Ket
from .linalg import EPS_ORTHO, apply_local, gram_matrix

PAULI_LETTERS = "IXYZ"
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_sender(resource, sender):
    sender = tuple(sender)
    n = resource.n_qubits
    if not sender or len(sender) >= n:
        raise ValueError("sender must be a non-empty strict subset of the qubits")
    if len(set(sender)) != len(sender) or not all(1 <= q <= n for q in sender):
        raise ValueError(f"invalid sender labels {list(sender)} for {n} qubits")
    return tuple(sorted(sender))


def apply_pauli_string(resource, sender, word):
    """``(P_word on sender) (x) I`` applied to ``resource``; letter i acts on sender[i]."""
    amps = resource.amplitudes
    for letter, q in zip(word, sender):
        if letter != "I":
            amps = apply_local(amps, PAULI[letter], [q], resource.n_qubits)
    return Ket(resource.n_qubits, amps)


def enumerate_encodings(resource, sender):
    """All ``4^k`` Pauli-encoded states, in lexicographic I < X < Y < Z order."""
    sender = _check_sender(resource, sender)
    return [
        ("".join(word), apply_pauli_string(resource, sender, word))
        for word in product(PAULI_LETTERS, repeat=len(sender))
    ]


# ---------------------------------------------------------------- cliques
# Graphs are adjacency bitmasks: adj[v] has bit u set iff u ~ v.


def orthogonality_graph(vectors, tol=EPS_ORTHO):
    ortho = np.abs(gram_matrix(vectors)) <= tol
    np.fill_diagonal(ortho, False)
    return [sum(1 << int(j) for j in np.flatnonzero(row)) for row in ortho]


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask):
    return mask.bit_count()


def _colour_bound(adj, p):
    """Number of colours in a greedy colouring of ``p``: an upper bound on its clique size."""
    colours = 0
    uncoloured = p
    while uncoloured:
        colours += 1
        avail = uncoloured
        while avail:
            v = (avail & -avail).bit_length() - 1
            uncoloured &= ~(1 << v)
            avail &= ~adj[v] & ~(1 << v)
    return colours


def bron_kerbosch_max_clique_size(adj, candidates=None):
    """Size of a maximum clique, by Bron-Kerbosch with Tomita pivoting.

    Branches whose greedy-colouring bound cannot beat the best clique found
    so far are cut.
    """
    if candidates is None:
        candidates = (1 << len(adj)) - 1
    best = 0

    def expand(size, p, x):
        nonlocal best
        if not p:
            best = max(best, size)
            return
        if size + _colour_bound(adj, p) <= best:
            return
        pivot = max(_bits(p | x), key=lambda u: _popcount(p & adj[u]))
        for v in _bits(p & ~adj[pivot]):
            expand(size + 1, p & adj[v], x & adj[v])
            p &= ~(1 << v)
            x |= 1 << v
            if size + _popcount(p) <= best:
                return

    expand(0, candidates, 0)
    return best


def lex_first_clique(adj, size, candidates=None):
    """Lexicographically smallest (by sorted index list) clique of ``size`` vertices."""
    if candidates is None:
        candidates = (1 << len(adj)) - 1
    if size == 0:
        return []

    def search(chosen, p):
        if len(chosen) == size:
            return chosen
        for v in _bits(p):
            rest = p & ~((1 << (v + 1)) - 1)
            if len(chosen) + 1 + _popcount(rest & adj[v]) < size:
                continue
            found = search(chosen + [v], rest & adj[v])
            if found is not None:
                return found
        return None

    return search([], candidates)


def _twin_representatives(adj):
    """Mask of vertices kept after merging non-adjacent twins (equal neighbourhoods).

    Such twins (e.g. encodings equal up to a phase) can never share a clique,
    and swapping one for another preserves cliques, so the lowest index of
    each class stands in for the class.
    """
    seen = {}
    keep = 0
    for v, nb in enumerate(adj):
        if nb not in seen:
            seen[nb] = v
            keep |= 1 << v
    return keep


def max_orthogonal_set(encodings, tol=EPS_ORTHO):
    """Largest mutually orthogonal subset of ``encodings``.

    Returns ``(size, witness)`` where ``witness`` is the lexicographically
    smallest maximum clique as a sorted index list.
    """
    vectors = [getattr(e, "amplitudes", e) for e in encodings]
    if not vectors:
        raise ValueError("need at least one encoding")
    adj = orthogonality_graph(vectors, tol)
    reps = _twin_representatives(adj)
    size = bron_kerbosch_max_clique_size(adj, reps)
    return size, lex_first_clique(adj, size, reps)


# ---------------------------------------------------------------- reports


@dataclass(frozen=True, eq=False)
class SdcReport:
    sender_qubits: tuple
    encodings: tuple  # (pauli word, Ket) pairs
    witness: tuple  # indices into encodings
    orthogonal_set: tuple  # pauli words of the witness
    k_orthogonal: int
    capacity_cbits: float
    sender_entropy_bits: float

    def to_dict(self):
        return {
            "sender": list(self.sender_qubits),
            "k_orthogonal": self.k_orthogonal,
            "capacity_cbits": self.capacity_cbits,
            "sender_entropy_bits": self.sender_entropy_bits,
            "witness": list(self.orthogonal_set),
        }


def sdc_report(resource, sender):
    """Dense-coding capacity of ``resource`` when ``sender`` holds the encoded qubits."""
    sender = _check_sender(resource, sender)
    encodings = enumerate_encodings(resource, sender)
    k, witness = max_orthogonal_set([s for _, s in encodings])
    return SdcReport(
        sender_qubits=sender,
        encodings=tuple(encodings),
        witness=tuple(witness),
        orthogonal_set=tuple(encodings[i][0] for i in witness),
        k_orthogonal=k,
        capacity_cbits=math.log2(k),
        sender_entropy_bits=subsystem_entropy(resource, sender),
    )


def simulate_sdc_roundtrip(resource, sender, message, report=None):
    """Encode ``message`` (an index into the orthogonal set) and decode it.

    The sender applies the witness Pauli string; Bob decodes by the largest
    overlap with the orthogonal set.
    """
    if report is None:
        report = sdc_report(resource, sender)
    if not 0 <= message < report.k_orthogonal:
        raise ValueError(f"message must lie in 0..{report.k_orthogonal - 1}, got {message}")
    sent = apply_pauli_string(resource, report.sender_qubits, report.orthogonal_set[message])
    codebook = [report.encodings[i][1].amplitudes for i in report.witness]
    overlaps = [abs(np.vdot(c, sent.amplitudes)) ** 2 for c in codebook]
    return int(np.argmax(overlaps))

"""Partial traces, von Neumann entropies and Schmidt decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .ket import Ket
from .linalg import EPS_ORTHO, hermitian_eigenvalues, jacobi_eigh

SCHMIDT_CUTOFF = 1e-9


@dataclass(frozen=True)
class Bipartition:
    n_qubits: int
    side_a: tuple
    side_b: tuple

    def __post_init__(self):
        a, b = tuple(sorted(self.side_a)), tuple(sorted(self.side_b))
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)
        if not a or not b:
            raise ValueError("both sides of a bipartition must be non-empty")
        if set(a) & set(b):
            raise ValueError(f"sides overlap: {sorted(set(a) & set(b))}")
        if set(a) | set(b) != set(range(1, self.n_qubits + 1)):
            raise ValueError(f"sides {list(a)} | {list(b)} do not cover qubits 1..{self.n_qubits}")

    @classmethod
    def from_side(cls, n_qubits, side_a):
        side_a = tuple(sorted(side_a))
        _check_labels(side_a, n_qubits)
        rest = tuple(q for q in range(1, n_qubits + 1) if q not in side_a)
        return cls(n_qubits, side_a, rest)

    @property
    def smaller(self):
        """Smaller side; on a tie, the side holding qubit 1."""
        if len(self.side_b) < len(self.side_a):
            return self.side_b
        return self.side_a

    def complement(self):
        return Bipartition(self.n_qubits, self.side_b, self.side_a)

    def __str__(self):
        return f"{''.join(map(str, self.side_a))}|{''.join(map(str, self.side_b))}"


def _check_labels(labels, n_qubits):
    for q in labels:
        if not 1 <= q <= n_qubits:
            raise ValueError(f"qubit label {q} out of range 1..{n_qubits}")
    if len(set(labels)) != len(labels):
        raise ValueError(f"repeated qubit labels in {list(labels)}")


def bipartite_matrix(state, side_a, side_b=None):
    """Amplitudes reshaped to a ``2^|a| x 2^|b|`` matrix, rows indexed by ``side_a``."""
    n = state.n_qubits
    side_a = list(side_a)
    if side_b is None:
        side_b = [q for q in range(1, n + 1) if q not in side_a]
    t = np.asarray(state.amplitudes).reshape([2] * n)
    t = t.transpose([q - 1 for q in list(side_a) + list(side_b)])
    return t.reshape(2 ** len(side_a), 2 ** len(side_b))


def partial_trace(state, keep):
    """Reduced density matrix on ``keep`` (ascending label order inside the result)."""
    n = state.n_qubits
    keep = sorted(keep)
    _check_labels(keep, n)
    if not keep or len(keep) == n:
        raise ValueError("keep must be a non-empty strict subset of the qubits")
    m = bipartite_matrix(state, keep)
    rho = m @ m.conj().T
    return (rho + rho.conj().T) / 2


def von_neumann_entropy(rho):
    """Entropy in bits, ``-sum(l * log2(l))`` over eigenvalues with ``0 log 0 = 0``."""
    rho = np.asarray(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    vals = hermitian_eigenvalues(rho, psd=True)
    if vals.min() < -1e-8:
        raise ValueError(f"density matrix has negative eigenvalue {vals.min()!r}")
    return _entropy_of_probabilities(vals)


def _entropy_of_probabilities(p):
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    s = float(-np.sum(p * np.log2(p)))
    return max(s, 0.0)


@dataclass(frozen=True)
class EntropyRow:
    partition: Bipartition
    entropy_bits: float

    @property
    def key(self):
        return self.partition.smaller

    def to_dict(self):
        return {
            "side_a": list(self.partition.side_a),
            "side_b": list(self.partition.side_b),
            "entropy_bits": self.entropy_bits,
        }


@dataclass(frozen=True)
class EntropyTable:
    n_qubits: int
    rows: tuple

    def entropy(self, labels):
        """Entropy of the subsystem ``labels`` (either side of a cut)."""
        labels = tuple(sorted(labels))
        for row in self.rows:
            if labels in (row.partition.side_a, row.partition.side_b):
                return row.entropy_bits
        raise KeyError(f"no bipartition with side {list(labels)}")

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


def bipartitions(n_qubits):
    """One representative per bipartition class, side_a containing qubit 1.

    Ordered by the size of the smaller side, then lexicographically by that
    side, which for four qubits gives 1, 2, 3, 4, 12, 13, 14.
    """
    parts = []
    others = range(2, n_qubits + 1)
    for k in range(0, n_qubits - 1):
        for extra in combinations(others, k):
            parts.append(Bipartition.from_side(n_qubits, (1,) + extra))
    return sorted(parts, key=lambda p: (len(p.smaller), p.smaller))


def entropy_table(state):
    """Entropies of every bipartition class of ``state``."""
    n = state.n_qubits
    if not 2 <= n <= 8:
        raise ValueError(f"entropy_table supports 2..8 qubits, got {n}")
    rows = []
    for part in bipartitions(n):
        rho = partial_trace(state, part.smaller)
        rows.append(EntropyRow(part, von_neumann_entropy(rho)))
    return EntropyTable(n, tuple(rows))


def subsystem_entropy(state, labels):
    labels = sorted(labels)
    rest = [q for q in state.labels if q not in labels]
    smaller = labels if len(labels) <= len(rest) else rest
    return von_neumann_entropy(partial_trace(state, smaller))


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """``state = sum_l c_l |left_l>|right_l>`` with ``left`` on ``partition.side_a``.

    Bases are stored as columns of ``left_basis`` / ``right_basis``; only
    terms with coefficient above ``SCHMIDT_CUTOFF`` are kept.
    """

    partition: Bipartition
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    @property
    def rank(self):
        return len(self.coefficients)

    def left(self, l):
        return Ket(len(self.partition.side_a), self.left_basis[:, l])

    def right(self, l):
        return Ket(len(self.partition.side_b), self.right_basis[:, l])

    def entropy(self):
        return _entropy_of_probabilities(self.coefficients**2)

    def reconstruct(self):
        """Amplitudes of ``sum c_l left_l (x) right_l`` in the original qubit order."""
        part = self.partition
        m = (self.left_basis * self.coefficients) @ self.right_basis.T
        order = list(part.side_a) + list(part.side_b)
        t = m.reshape([2] * part.n_qubits)
        inverse = np.argsort([q - 1 for q in order])
        return t.transpose(inverse).reshape(-1)


def _gauge(vec):
    """Fix the global phase: first significant amplitude real and positive."""
    for c in vec:
        if abs(c) > 1e-9:
            return vec * (abs(c) / c)
    return vec


def _tie_key(vec):
    return tuple(x for c in vec for x in (round(c.real, 9), round(c.imag, 9)))


def schmidt_decompose(state, partition):
    """Schmidt decomposition of ``state`` across ``partition``.

    The smaller side's reduced density matrix is diagonalized; the partner
    vectors are projections of the state onto its eigenvectors, and their
    norms are the coefficients.
    """
    if isinstance(partition, (list, tuple)):
        partition = Bipartition.from_side(state.n_qubits, partition)
    a_smaller = len(partition.side_a) <= len(partition.side_b)
    m = bipartite_matrix(state, partition.side_a, partition.side_b)
    if not a_smaller:
        m = m.T
    # Rows of m now belong to the smaller side.
    rho = m @ m.conj().T
    _, vecs = jacobi_eigh((rho + rho.conj().T) / 2)
    terms = []
    for l in range(vecs.shape[1]):
        u = _gauge(vecs[:, l])
        partner = u.conj() @ m
        c = float(np.linalg.norm(partner))
        if c > SCHMIDT_CUTOFF:
            terms.append((c, u, partner / c))
    # Descending coefficients; ties broken by the left-side vector.
    def left_of(t):
        return t[1] if a_smaller else t[2]

    terms.sort(key=lambda t: _tie_key(left_of(t)), reverse=True)
    terms.sort(key=lambda t: -round(t[0], 9))
    coeffs = np.array([t[0] for t in terms])
    small = np.stack([t[1] for t in terms], axis=1)
    big = np.stack([t[2] for t in terms], axis=1)
    left, right = (small, big) if a_smaller else (big, small)
    return SchmidtForm(partition, coeffs, left, right)


def is_orthonormal(columns, tol=EPS_ORTHO):
    g = columns.conj().T @ columns
    return bool(np.max(np.abs(g - np.eye(g.shape[0]))) <= tol)


"""Exact teleportation of m-term n-qubit states over a multi-qubit resource.

Given a resource ``R`` on N qubits and Bob's n qubits, an unknown state
``sum_k alpha_k |eta_k>`` (m known orthonormal terms) can be teleported with
unit fidelity exactly when the Schmidt spectrum of ``R`` across
(Alice | Bob) is flat with m terms, i.e.
``R = (1/sqrt m) sum_l |chi_l>_alice |mu_l>_bob``.

The measurement uses the generalized Bell construction::

    |theta_{j,k}> = (1/sqrt m) sum_l w^{jl} |eta_l>_in |chi_{l+k}>_alice,   w = exp(2 pi i/m)

and outcome ``(j, k)`` is corrected on Bob's side by
``V_{j,k} = sum_l w^{jl} |mu_l><mu_{l+k}|`` (identity off the Schmidt span).
Bob ends up holding ``sum_k alpha_k |mu_k>``; a fixed, input-independent
unitary maps ``mu_k -> eta_k`` if the original basis is wanted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .entropy import Bipartition, schmidt_decompose, subsystem_entropy
from .ket import Ket
from .linalg import EPS_NORM, EPS_ORTHO

SPECTRUM_TOL = 1e-9
ENTROPY_TOL = 1e-6
ZERO_PROB = 1e-12


class InfeasibleTaskError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TeleportTask:
    resource: Ket
    bob_qubits: tuple
    m: int
    target_basis: np.ndarray = None  # columns: m orthonormal n-qubit vectors

    def __post_init__(self):
        bob = tuple(sorted(self.bob_qubits))
        object.__setattr__(self, "bob_qubits", bob)
        n_total = self.resource.n_qubits
        if not bob or len(bob) >= n_total:
            raise ValueError("bob_qubits must be a non-empty strict subset of the resource qubits")
        if len(set(bob)) != len(bob) or not all(1 <= q <= n_total for q in bob):
            raise ValueError(f"invalid bob qubit labels {list(self.bob_qubits)}")
        n = len(bob)
        if not 1 <= self.m <= 2**n:
            raise ValueError(f"m must lie in 1..{2**n} for {n} Bob qubits, got {self.m}")
        if self.target_basis is None:
            basis = np.eye(2**n, dtype=complex)[:, : self.m]
        else:
            basis = np.asarray(self.target_basis, dtype=complex)
            if basis.shape != (2**n, self.m):
                raise ValueError(f"target_basis must have shape {(2**n, self.m)}, got {basis.shape}")
            g = basis.conj().T @ basis
            if np.max(np.abs(g - np.eye(self.m))) > EPS_ORTHO:
                raise ValueError("target_basis vectors are not orthonormal")
        basis.setflags(write=False)
        object.__setattr__(self, "target_basis", basis)

    @property
    def n(self):
        return len(self.bob_qubits)

    @property
    def alice_qubits(self):
        return tuple(q for q in self.resource.labels if q not in self.bob_qubits)

    @property
    def partition(self):
        return Bipartition(self.resource.n_qubits, self.alice_qubits, self.bob_qubits)

    def schmidt(self):
        return schmidt_decompose(self.resource, self.partition)


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    bob_entropy_bits: float
    required_entropy_bits: float
    schmidt_spectrum: tuple
    structural_ok: bool
    entropy_ok: bool

    def summary(self):
        word = "feasible" if self.feasible else "infeasible"
        return f"{word}, S={self.bob_entropy_bits:.4f}, need {self.required_entropy_bits:.4f}"


def _flat_spectrum(coeffs, m):
    target = 1 / math.sqrt(m)
    return len(coeffs) == m and all(abs(c - target) <= SPECTRUM_TOL for c in coeffs)


def check_feasibility(task):
    """Decide whether ``task`` admits exact teleportation.

    ``feasible`` is the structural test (flat Schmidt spectrum with exactly m
    terms). The entropy test ``S(bob) = log2 m`` is reported alongside; it is
    implied by the structural one but not the other way round.
    """
    sf = task.schmidt()
    s = subsystem_entropy(task.resource, task.bob_qubits)
    need = math.log2(task.m)
    structural = _flat_spectrum(sf.coefficients, task.m)
    return FeasibilityVerdict(
        feasible=structural,
        bob_entropy_bits=s,
        required_entropy_bits=need,
        schmidt_spectrum=tuple(float(c) for c in sf.coefficients),
        structural_ok=structural,
        entropy_ok=abs(s - need) <= ENTROPY_TOL,
    )


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Alice's measurement on (input register, Alice's resource qubits).

    ``vectors`` holds the full orthonormal basis as columns; the first
    ``active_count`` = m^2 are the entangled vectors, indexed
    ``l = k*m + j`` for outcome ``(j, k)``. ``corrections[l]`` is Bob's
    unitary for active outcome ``l``.
    """

    m: int
    vectors: np.ndarray
    active_count: int
    corrections: tuple
    outcome_labels: tuple
    chi: np.ndarray  # Alice-side Schmidt vectors (columns)
    mu: np.ndarray  # Bob-side Schmidt vectors (columns)
    eta: np.ndarray  # input term basis (columns)
    forced: bool = field(default=False)

    def vector(self, l):
        return self.vectors[:, l]


def _complete_basis(active, dim):
    """Extend orthonormal columns to a full basis by Gram-Schmidt on e_0, e_1, ..."""
    cols = [active[:, i] for i in range(active.shape[1])]
    for i in range(dim):
        if len(cols) == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[i] = 1.0
        for _ in range(2):
            for c in cols:
                v = v - np.vdot(c, v) * c
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            cols.append(v / norm)
    return np.stack(cols, axis=1)


def _weyl_correction(mu, m, j, k):
    w = np.exp(2j * np.pi / m)
    dim = mu.shape[0]
    v = np.eye(dim, dtype=complex) - mu @ mu.conj().T
    for l in range(m):
        v += w ** (j * l) * np.outer(mu[:, l], mu[:, (l + k) % m].conj())
    return v


def build_measurement_basis(task, force=False):
    """Construct Alice's measurement basis and Bob's corrections for ``task``.

    With ``force=True`` the construction is carried out on the top-m Schmidt
    vectors even if the spectrum is not flat; the result then does not
    teleport exactly, which is useful for demonstrating the failure.
    """
    sf = task.schmidt()
    if not _flat_spectrum(sf.coefficients, task.m) and not force:
        v = check_feasibility(task)
        raise InfeasibleTaskError(f"task is infeasible: {v.summary()}")
    m = task.m
    if sf.rank < m:
        raise InfeasibleTaskError(f"Schmidt rank {sf.rank} is below m={m}")
    chi = sf.left_basis[:, :m]
    mu = sf.right_basis[:, :m]
    eta = task.target_basis
    w = np.exp(2j * np.pi / m)
    active = []
    labels = []
    corrections = []
    for k in range(m):
        for j in range(m):
            theta = sum(
                w ** (j * l) * np.kron(eta[:, l], chi[:, (l + k) % m]) for l in range(m)
            ) / math.sqrt(m)
            active.append(theta)
            labels.append((j, k))
            corrections.append(_weyl_correction(mu, m, j, k))
    active = np.stack(active, axis=1)
    dim = eta.shape[0] * chi.shape[0]
    vectors = _complete_basis(active, dim)
    return MeasurementBasis(
        m=m,
        vectors=vectors,
        active_count=m * m,
        corrections=tuple(corrections),
        outcome_labels=tuple(labels),
        chi=chi,
        mu=mu,
        eta=eta,
        forced=force,
    )


def block_matrices(basis, task):
    """``C[l][i, k] = sqrt(m) <theta_l | eta_i chi_k>`` for each active outcome."""
    sf = task.schmidt()
    m = task.m
    chi = sf.left_basis[:, :m]
    eta = task.target_basis
    blocks = []
    for l in range(basis.active_count):
        theta = basis.vectors[:, l]
        c = np.empty((m, m), dtype=complex)
        for i in range(m):
            for k in range(m):
                c[i, k] = math.sqrt(m) * np.vdot(theta, np.kron(eta[:, i], chi[:, k]))
        blocks.append(c)
    return blocks


def verify_block_unitarity(basis, task, tol=1e-9):
    """True iff every active coefficient block satisfies ``C C^dagger = I``."""
    m = task.m
    for c in block_matrices(basis, task):
        if np.max(np.abs(c @ c.conj().T - np.eye(m))) > tol:
            return False
    return True


@dataclass(frozen=True, eq=False)
class TeleportOutcome:
    alpha: np.ndarray
    outcome_probabilities: np.ndarray
    per_outcome_fidelity: np.ndarray  # nan where the outcome has zero probability
    min_fidelity: float
    active_count: int
    cbits_required: float

    @property
    def active_probabilities(self):
        return self.outcome_probabilities[: self.active_count]

    def to_dict(self):
        fid = [None if np.isnan(f) else float(f) for f in self.per_outcome_fidelity]
        return {
            "alpha": [[float(a.real), float(a.imag)] for a in self.alpha],
            "outcome_probabilities": [float(p) for p in self.outcome_probabilities],
            "per_outcome_fidelity": fid,
            "min_fidelity": self.min_fidelity,
            "active_count": self.active_count,
            "cbits_required": self.cbits_required,
        }


def random_alpha(m, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return a / np.linalg.norm(a)


def joint_state_matrix(task, psi_in):
    """``|psi_in> (x) |R>`` as a matrix: rows = (input, Alice qubits), columns = Bob."""
    n, big_n = task.n, task.resource.n_qubits
    full = np.kron(psi_in, task.resource.amplitudes).reshape([2] * (n + big_n))
    axes = list(range(n)) + [n + q - 1 for q in task.alice_qubits] + [n + q - 1 for q in task.bob_qubits]
    return full.transpose(axes).reshape(2**big_n, 2**n)


def simulate_teleportation(task, alpha=None, seed=None, basis=None, force=False):
    """Run the protocol for every possible measurement outcome.

    Exactly one of ``alpha`` (m complex coefficients) or ``seed`` must be
    given. Each outcome's probability is computed from the joint state; Bob's
    conditional state is corrected and compared with ``sum_k alpha_k |mu_k>``.
    """
    if (alpha is None) == (seed is None):
        raise ValueError("pass exactly one of alpha or seed")
    if alpha is None:
        alpha = random_alpha(task.m, seed)
    alpha = np.asarray(alpha, dtype=complex).ravel()
    if alpha.shape[0] != task.m:
        raise ValueError(f"alpha must have {task.m} entries, got {alpha.shape[0]}")
    if abs(np.linalg.norm(alpha) - 1.0) > EPS_NORM:
        raise ValueError(f"alpha is not normalized (norm {np.linalg.norm(alpha)!r})")
    if basis is None:
        basis = build_measurement_basis(task, force=force)

    phi = joint_state_matrix(task, task.target_basis @ alpha)
    target = basis.mu @ alpha
    n_out = basis.vectors.shape[1]
    probs = np.zeros(n_out)
    fids = np.full(n_out, np.nan)
    for l in range(n_out):
        bob = basis.vectors[:, l].conj() @ phi
        p = float(np.vdot(bob, bob).real)
        probs[l] = p
        if p <= ZERO_PROB:
            continue
        if l < basis.active_count:
            bob = basis.corrections[l] @ bob
        fids[l] = float(abs(np.vdot(target, bob)) ** 2 / p)
    return TeleportOutcome(
        alpha=alpha,
        outcome_probabilities=probs,
        per_outcome_fidelity=fids,
        min_fidelity=float(np.nanmin(fids)),
        active_count=basis.active_count,
        cbits_required=math.log2(basis.active_count),
    )


def feasible_partitions(state, n_bob=None):
    """All (bob_qubits, m) pairs with a flat Schmidt spectrum, m >= 2."""
    out = []
    sizes = [n_bob] if n_bob else range(1, state.n_qubits)
    for size in sizes:
        for bob in combinations(state.labels, size):
            alice = tuple(q for q in state.labels if q not in bob)
            sf = schmidt_decompose(state, Bipartition(state.n_qubits, alice, bob))
            m = sf.rank
            if m >= 2 and _flat_spectrum(sf.coefficients, m):
                out.append((bob, m))
    return out


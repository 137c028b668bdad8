"""Two-basis entanglement QKD on a four-qubit resource split 2|2.

Each party measures her two qubits either in the computational family or
in the Bell family. Two outcomes of each family carry a key bit (by default
``|00> -> 0, |11> -> 1`` and ``Phi+ -> 0, Phi- -> 1``); rounds are kept only
when the families match and both outcomes carry a bit.

Simulation RNG contract: ``numpy.random.Generator(PCG64(seed))``; round r
consumes four consecutive ``random()`` doubles, used in the order Alice
family, Alice outcome, Bob family, Bob outcome. A family draw ``u < 0.5``
selects the computational family; an outcome draw picks the first outcome
whose cumulative probability exceeds it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .entropy import bipartite_matrix
from .linalg import EPS_ORTHO

_R = 1 / np.sqrt(2)
BELL_VECTORS = np.array(
    [[_R, _R, 0, 0], [0, 0, _R, _R], [0, 0, _R, -_R], [_R, -_R, 0, 0]], dtype=complex
)
BELL_NAMES = ("PHI+", "PHI-", "PSI+", "PSI-")
COMPUTATIONAL_NAMES = ("00", "01", "10", "11")

CORRELATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MeasBasis:
    """Four-outcome two-qubit basis; ``encoding`` maps outcome index -> key bit."""

    name: str
    vectors: np.ndarray  # columns
    outcome_names: tuple
    encoding: dict = field(default_factory=dict)

    def __post_init__(self):
        g = self.vectors.conj().T @ self.vectors
        if np.max(np.abs(g - np.eye(4))) > EPS_ORTHO:
            raise ValueError(f"basis {self.name!r} is not orthonormal")
        bits = list(self.encoding.values())
        if len(set(bits)) != len(bits) or not set(bits) <= {0, 1}:
            raise ValueError(f"encoding {self.encoding!r} must be injective into {{0, 1}}")

    def with_encoding(self, encoding):
        return replace(self, encoding=dict(encoding))

    def outcome_for_bit(self, bit):
        for idx, b in self.encoding.items():
            if b == bit:
                return idx
        return None

    def describe_encoding(self):
        return {self.outcome_names[i]: b for i, b in sorted(self.encoding.items())}


COMPUTATIONAL = MeasBasis("computational", np.eye(4, dtype=complex), COMPUTATIONAL_NAMES, {0: 0, 3: 1})
BELL = MeasBasis("bell", BELL_VECTORS, BELL_NAMES, {0: 0, 1: 1})
FAMILIES = (COMPUTATIONAL, BELL)


def _check_split(state, alice, bob):
    if state.n_qubits != 4:
        raise ValueError(f"QKD analysis needs a 4-qubit state, got {state.n_qubits} qubits")
    alice, bob = tuple(alice), tuple(bob)
    if len(alice) != 2 or len(bob) != 2 or set(alice) | set(bob) != {1, 2, 3, 4}:
        raise ValueError(f"alice {list(alice)} and bob {list(bob)} must split qubits 1..4 two and two")
    return alice, bob


def complement(alice):
    return tuple(q for q in (1, 2, 3, 4) if q not in alice)


def bell_decomposition(state, alice, bob):
    """Coefficients ``c[a, b]`` with ``state = sum c[a, b] |bell_a>_alice |bell_b>_bob``.

    Bell order is Phi+, Phi-, Psi+, Psi-; each party's qubits are taken in
    the order given.
    """
    alice, bob = _check_split(state, alice, bob)
    m = bipartite_matrix(state, alice, bob)
    return BELL_VECTORS.conj().T @ m @ BELL_VECTORS.conj()


def joint_probabilities(state, alice, bob, basis_a, basis_b):
    alice, bob = _check_split(state, alice, bob)
    m = bipartite_matrix(state, alice, bob)
    amps = basis_a.vectors.conj().T @ m @ basis_b.vectors.conj()
    return np.abs(amps) ** 2


@dataclass(frozen=True, eq=False)
class CorrelationReport:
    alice: tuple
    bob: tuple
    basis_a: MeasBasis
    basis_b: MeasBasis
    joint: np.ndarray
    encoded_submatrix: np.ndarray  # [alice bit, bob bit]
    encoded_mass: float
    perfectly_correlated: bool
    agreement_rate: float  # nan when no encoded mass

    def to_dict(self):
        return {
            "alice": list(self.alice),
            "bob": list(self.bob),
            "basis_a": self.basis_a.name,
            "basis_b": self.basis_b.name,
            "encoding_a": self.basis_a.describe_encoding(),
            "encoding_b": self.basis_b.describe_encoding(),
            "joint": self.joint.tolist(),
            "encoded_submatrix": self.encoded_submatrix.tolist(),
            "perfectly_correlated": self.perfectly_correlated,
            "agreement_rate": None if np.isnan(self.agreement_rate) else self.agreement_rate,
        }


def correlation_check(state, alice, bob, basis_a=COMPUTATIONAL, basis_b=None):
    """Joint outcome statistics and the perfect-correlation test for one basis pair."""
    if basis_b is None:
        basis_b = basis_a
    p = joint_probabilities(state, alice, bob, basis_a, basis_b)
    sub = np.zeros((2, 2))
    for x in (0, 1):
        for y in (0, 1):
            a, b = basis_a.outcome_for_bit(x), basis_b.outcome_for_bit(y)
            if a is not None and b is not None:
                sub[x, y] = p[a, b]
    mass = float(sub.sum())
    perfect = bool(
        mass > CORRELATION_TOL
        and sub[0, 1] <= CORRELATION_TOL
        and sub[1, 0] <= CORRELATION_TOL
        and abs(sub[0, 0] - sub[1, 1]) <= CORRELATION_TOL
    )
    agreement = float(np.trace(sub) / mass) if mass > CORRELATION_TOL else float("nan")
    return CorrelationReport(
        tuple(alice), tuple(bob), basis_a, basis_b, p, sub, mass, perfect, agreement
    )


# ---------------------------------------------------------------- suitability


def matched_encodings(state, alice, bob, family):
    """Encodings for one family fitted to the state, or None if none can match.

    Alice's key outcomes are her two most likely ones (lower index first on
    ties), read as bits 0 and 1 in index order. Bob's key outcome for each
    bit is his most likely outcome given Alice's; if both land on the same
    outcome no injective encoding exists.
    """
    p = joint_probabilities(state, alice, bob, family, family)
    marginal = p.sum(axis=1)
    top = sorted(np.argsort(-marginal, kind="stable")[:2].tolist())
    bob_out = [int(np.argmax(p[a])) for a in top]
    if bob_out[0] == bob_out[1]:
        return None
    enc_a = {top[0]: 0, top[1]: 1}
    enc_b = {bob_out[0]: 0, bob_out[1]: 1}
    return family.with_encoding(enc_a), family.with_encoding(enc_b)


@dataclass(frozen=True, eq=False)
class SplitCheck:
    alice: tuple
    bob: tuple
    reports: tuple  # one CorrelationReport per family, or None if no encoding fits

    @property
    def passes(self):
        return all(r is not None and r.perfectly_correlated for r in self.reports)

    @property
    def bases(self):
        if not self.passes:
            return None
        return tuple((r.basis_a, r.basis_b) for r in self.reports)

    def to_dict(self):
        return {
            "alice": list(self.alice),
            "bob": list(self.bob),
            "passes": self.passes,
            "families": [None if r is None else r.to_dict() for r in self.reports],
        }


@dataclass(frozen=True, eq=False)
class QkdVerdict:
    suitable: bool
    splits: tuple
    witness: SplitCheck = None

    def to_dict(self):
        return {
            "suitable": self.suitable,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "splits": [s.to_dict() for s in self.splits],
        }


def check_split(state, alice):
    alice = tuple(sorted(alice))
    bob = complement(alice)
    reports = []
    for family in FAMILIES:
        enc = matched_encodings(state, alice, bob, family)
        reports.append(None if enc is None else correlation_check(state, alice, bob, *enc))
    return SplitCheck(alice, bob, tuple(reports))


def qkd_suitability(state):
    """Search the three balanced splits for one where both families give matching keys."""
    splits = tuple(check_split(state, (1, q)) for q in (2, 3, 4))
    witness = next((s for s in splits if s.passes), None)
    return QkdVerdict(witness is not None, splits, witness)


# ---------------------------------------------------------------- simulation


@dataclass(frozen=True)
class QkdRun:
    rounds: int
    seed: int
    n_sifted: int
    sift_rate: float
    agreement_rate: float  # nan when nothing was sifted
    alice_key: str
    bob_key: str

    def to_dict(self):
        return {
            "rounds": self.rounds,
            "seed": self.seed,
            "n_sifted": self.n_sifted,
            "sift_rate": self.sift_rate,
            "agreement_rate": None if np.isnan(self.agreement_rate) else self.agreement_rate,
            "alice_key": self.alice_key,
            "bob_key": self.bob_key,
        }


def _standard_bases():
    return ((COMPUTATIONAL, COMPUTATIONAL), (BELL, BELL))


def analytic_rates(state, alice, bob, bases=None):
    """Expected (sift_rate, agreement_rate) of :func:`simulate_qkd`."""
    bases = bases or _standard_bases()
    reports = [correlation_check(state, alice, bob, a, b) for a, b in bases]
    mass = sum(r.encoded_mass for r in reports)
    agree = sum(float(np.trace(r.encoded_submatrix)) for r in reports)
    sift = mass / len(bases) ** 2
    return sift, (agree / mass if mass > CORRELATION_TOL else float("nan"))


def _sample(probs, u):
    """First outcome whose cumulative probability exceeds ``u``, row by row."""
    cum = np.cumsum(probs, axis=1)
    cum = cum / cum[:, -1:]
    return np.argmax(cum > u[:, None], axis=1)


def simulate_qkd(state, alice, bob, rounds, seed, bases=None):
    """Seeded sift-and-compare run over ``rounds`` fresh copies of ``state``.

    ``bases`` is ``((alice_comp, bob_comp), (alice_bell, bob_bell))``; it
    defaults to the standard encodings for both parties.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    alice, bob = _check_split(state, alice, bob)
    bases = bases or _standard_bases()
    m = bipartite_matrix(state, alice, bob)
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random((rounds, 4))

    fam_a = (u[:, 0] >= 0.5).astype(int)
    fam_b = (u[:, 2] >= 0.5).astype(int)

    # Bob's unnormalized conditional state for each (Alice family, outcome).
    cond = np.stack([bases[f][0].vectors.conj().T @ m for f in (0, 1)])  # [f, a, bob]
    p_a = np.sum(np.abs(cond) ** 2, axis=2)  # [f, a]
    out_a = _sample(p_a[fam_a], u[:, 1])

    phi = cond[fam_a, out_a]
    phi = phi / np.linalg.norm(phi, axis=1, keepdims=True)
    bob_vecs = np.stack([bases[f][1].vectors for f in (0, 1)])  # [f, y, b]
    amps_b = np.einsum("ryb,ry->rb", bob_vecs[fam_b].conj(), phi)
    p_b = np.abs(amps_b) ** 2
    out_b = _sample(p_b, u[:, 3])

    alice_key, bob_key = [], []
    for r in range(rounds):
        if fam_a[r] != fam_b[r]:
            continue
        enc_a = bases[fam_a[r]][0].encoding
        enc_b = bases[fam_b[r]][1].encoding
        if out_a[r] in enc_a and out_b[r] in enc_b:
            alice_key.append(str(enc_a[out_a[r]]))
            bob_key.append(str(enc_b[out_b[r]]))
    n = len(alice_key)
    agreement = sum(x == y for x, y in zip(alice_key, bob_key)) / n if n else float("nan")
    return QkdRun(rounds, seed, n, n / rounds, agreement, "".join(alice_key), "".join(bob_key))

from dataclasses import replace

import numpy as np
import pytest

from qresource.catalog import catalog_state
from qresource.ket import Ket
from qresource.linalg import is_unitary, random_state_vector
from qresource.teleport import (
    InfeasibleTaskError,
    TeleportTask,
    block_matrices,
    build_measurement_basis,
    check_feasibility,
    feasible_partitions,
    joint_state_matrix,
    random_alpha,
    simulate_teleportation,
    verify_block_unitarity,
)

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1, -1])
H_34 = -(0.75 * np.log2(0.75) + 0.25 * np.log2(0.25))


def task(name, bob, m, **kw):
    return TeleportTask(catalog_state(name), bob, m, **kw)


def equal_up_to_phase(a, b, tol=1e-9):
    overlap = np.vdot(a.ravel(), b.ravel())
    return abs(abs(overlap) - np.linalg.norm(a) * np.linalg.norm(b)) <= tol


# ---------------------------------------------------------------- task validation


@pytest.mark.parametrize(
    "bob, m",
    [((), 2), ((1, 2, 3, 4), 2), ((5,), 2), ((2, 2), 2), ((4,), 3), ((4,), 0)],
)
def test_invalid_tasks(bob, m):
    with pytest.raises(ValueError):
        task("GHZ4", bob, m)


def test_target_basis_checked():
    with pytest.raises(ValueError):
        task("GHZ4", (4,), 2, target_basis=np.ones((2, 2)))
    with pytest.raises(ValueError):
        task("GHZ4", (4,), 2, target_basis=np.eye(2)[:, :1])


def test_task_sides():
    t = task("S1", (4, 2), 2)
    assert t.bob_qubits == (2, 4)
    assert t.alice_qubits == (1, 3)


# ---------------------------------------------------------------- feasibility


def test_ghz4_feasible():
    v = check_feasibility(task("GHZ4", (4,), 2))
    assert v.feasible and v.entropy_ok and v.structural_ok
    assert np.isclose(v.bob_entropy_bits, 1.0)


def test_w4_infeasible():
    v = check_feasibility(task("W4", (4,), 2))
    assert not v.feasible
    assert np.isclose(v.bob_entropy_bits, H_34)
    assert v.summary() == "infeasible, S=0.8113, need 1.0000"


def test_omega_two_qubit_cuts():
    v = check_feasibility(task("OMEGA", (3, 4), 4))
    assert v.feasible and np.isclose(v.bob_entropy_bits, 2.0)
    v = check_feasibility(task("OMEGA", (2, 3), 4))
    assert not v.feasible and np.isclose(v.bob_entropy_bits, 1.0)


@pytest.mark.parametrize(
    "name, feasible_bobs",
    [
        ("GHZ4", {1, 2, 3, 4}),
        ("W4", set()),
        ("S1", {2}),
        ("S2", {2, 3, 4}),
        ("OMEGA", {1, 2, 3, 4}),
    ],
)
def test_single_qubit_matrix(name, feasible_bobs):
    for q in range(1, 5):
        assert check_feasibility(task(name, (q,), 2)).feasible == (q in feasible_bobs)


def test_structural_implies_entropy(rng):
    for _ in range(20):
        k = Ket(4, random_state_vector(16, rng))
        for bob in [(1,), (2, 3)]:
            for m in (1, 2):
                v = check_feasibility(TeleportTask(k, bob, m))
                assert not v.structural_ok or v.entropy_ok


def test_entropy_alone_is_not_enough():
    # Spectrum (1/2, 1/2, 0, 0) on two Bob qubits: S = 1 but the task m=4 needs S = 2,
    # while m=2 passes both tests.
    k = Ket(4, np.kron(catalog_state("PHI+").amplitudes, [1, 0, 0, 0]))
    assert check_feasibility(TeleportTask(k, (2, 3), 2)).feasible
    v = check_feasibility(TeleportTask(k, (2, 3), 4))
    assert not v.feasible and not v.entropy_ok


def test_feasible_partitions():
    assert feasible_partitions(catalog_state("S1"), 1) == [((2,), 2)]
    omega = dict(feasible_partitions(catalog_state("OMEGA"), 2))
    assert omega == {(1, 2): 4, (1, 3): 4, (1, 4): 2, (2, 3): 2, (2, 4): 4, (3, 4): 4}
    assert all(m == 2 for _, m in feasible_partitions(catalog_state("GHZ4")))


# ---------------------------------------------------------------- measurement basis


def test_bell_pair_basis_and_corrections():
    t = task("PHI+", (2,), 2)
    b = build_measurement_basis(t)
    assert b.active_count == 4 and b.vectors.shape == (4, 4)
    bell = [
        np.array([1, 0, 0, 1]),
        np.array([1, 0, 0, -1]),
        np.array([0, 1, 1, 0]),
        np.array([0, 1, -1, 0]),
    ]
    for l, ref in enumerate(bell):
        assert equal_up_to_phase(b.vector(l), ref / np.sqrt(2))
    for corr, ref in zip(b.corrections, [np.eye(2), Z, X, Z @ X]):
        assert equal_up_to_phase(corr, ref)
    assert b.outcome_labels == ((0, 0), (1, 0), (0, 1), (1, 1))


@pytest.mark.parametrize("name, bob, m", [("GHZ4", (4,), 2), ("OMEGA", (3, 4), 4), ("S2", (3,), 2)])
def test_basis_orthonormal_and_corrections_unitary(name, bob, m):
    b = build_measurement_basis(task(name, bob, m))
    g = b.vectors.conj().T @ b.vectors
    assert np.max(np.abs(g - np.eye(g.shape[0]))) <= 1e-9
    assert all(is_unitary(c) for c in b.corrections)
    assert len(b.corrections) == m * m


def test_ghz4_completion_vectors_unused():
    t = task("GHZ4", (4,), 2)
    b = build_measurement_basis(t)
    # input qubit plus Alice's three qubits: 16 vectors, 4 of them active
    assert b.vectors.shape == (16, 16) and b.active_count == 4
    for seed in range(100):
        phi = joint_state_matrix(t, t.target_basis @ random_alpha(2, seed))
        overlaps = b.vectors[:, 4:].conj().T @ phi
        assert np.max(np.abs(overlaps)) <= 1e-12


def test_m1_product_case():
    t = task("GHZ4", (4,), 1)
    assert check_feasibility(t).feasible is False
    b = build_measurement_basis(task("PHI+", (2,), 1), force=True)
    assert b.active_count == 1 and np.allclose(b.corrections[0], np.eye(2))
    t1 = TeleportTask(Ket.basis("0000"), (4,), 1)
    assert check_feasibility(t1).feasible
    b1 = build_measurement_basis(t1)
    assert b1.active_count == 1
    assert np.allclose(b1.corrections[0], np.eye(2))
    assert verify_block_unitarity(b1, t1)
    out = simulate_teleportation(t1, alpha=[1.0])
    assert np.isclose(out.min_fidelity, 1) and np.isclose(out.active_probabilities[0], 1)


def test_infeasible_basis_refused():
    with pytest.raises(InfeasibleTaskError):
        build_measurement_basis(task("W4", (4,), 2))


# ---------------------------------------------------------------- block unitarity


@pytest.mark.parametrize("name, bob, m", [("GHZ4", (1,), 2), ("OMEGA", (2, 4), 4), ("S1", (2,), 2)])
def test_blocks_unitary(name, bob, m):
    t = task(name, bob, m)
    b = build_measurement_basis(t)
    assert verify_block_unitarity(b, t)
    for c in block_matrices(b, t):
        assert c.shape == (m, m)


def test_replaced_product_vector_breaks_unitarity():
    t = task("GHZ4", (4,), 2)
    b = build_measurement_basis(t)
    vecs = b.vectors.copy()
    vecs[:, 0] = np.kron(b.eta[:, 0], b.chi[:, 0])
    broken = replace(b, vectors=vecs)
    assert not verify_block_unitarity(broken, t)
    c = block_matrices(broken, t)[0]
    # the block is sqrt(m) |0><0|, i.e. a rank-1 projector up to scale
    assert np.linalg.matrix_rank(c) == 1


# ---------------------------------------------------------------- simulation


def test_ghz4_basis_input():
    out = simulate_teleportation(task("GHZ4", (4,), 2), alpha=[1, 0])
    assert np.allclose(out.active_probabilities, 0.25)
    assert np.allclose(out.per_outcome_fidelity[:4], 1)
    assert np.isclose(out.min_fidelity, 1)
    assert out.cbits_required == 2


def test_omega_two_qubit_teleport():
    out = simulate_teleportation(task("OMEGA", (3, 4), 4), seed=7)
    assert out.active_count == 16
    assert np.allclose(out.active_probabilities, 1 / 16, atol=1e-9)
    assert out.min_fidelity >= 1 - 1e-9


def test_s1_bob_2():
    out = simulate_teleportation(task("S1", (2,), 2), seed=11)
    assert out.min_fidelity >= 1 - 1e-9


@pytest.mark.parametrize(
    "name, bob, m",
    [("GHZ4", (2,), 2), ("OMEGA", (1, 3), 4), ("OMEGA", (1, 4), 2), ("S2", (4,), 2), ("GHZ(5)", (5,), 2)],
)
def test_theorem_invariants(name, bob, m):
    t = task(name, bob, m)
    b = build_measurement_basis(t)
    for seed in range(5):
        out = simulate_teleportation(t, seed=seed, basis=b)
        assert abs(out.outcome_probabilities.sum() - 1) <= 1e-9
        assert np.allclose(out.active_probabilities, 1 / m**2, atol=1e-9)
        assert np.all(out.outcome_probabilities[b.active_count:] <= 1e-12)
        assert out.min_fidelity >= 1 - 1e-9


def test_custom_target_basis():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    t = task("GHZ4", (3,), 2, target_basis=h)
    out = simulate_teleportation(t, alpha=[0.6, 0.8j])
    assert out.min_fidelity >= 1 - 1e-9


def test_w4_forced_is_not_exact():
    t = task("W4", (4,), 2)
    out = simulate_teleportation(t, seed=1, force=True)
    assert out.min_fidelity < 1 - 1e-3
    assert abs(out.outcome_probabilities.sum() - 1) <= 1e-9


def test_alpha_and_seed_exclusive():
    t = task("GHZ4", (4,), 2)
    with pytest.raises(ValueError):
        simulate_teleportation(t)
    with pytest.raises(ValueError):
        simulate_teleportation(t, alpha=[1, 0], seed=1)
    with pytest.raises(ValueError):
        simulate_teleportation(t, alpha=[1, 1])
    with pytest.raises(ValueError):
        simulate_teleportation(t, alpha=[1, 0, 0])


def test_random_alpha_seeded():
    assert np.array_equal(random_alpha(3, 5), random_alpha(3, 5))
    assert np.isclose(np.linalg.norm(random_alpha(3, 5)), 1)


def test_outcome_json():
    d = simulate_teleportation(task("GHZ4", (4,), 2), alpha=[1, 0]).to_dict()
    assert set(d) == {"alpha", "outcome_probabilities", "per_outcome_fidelity", "min_fidelity", "active_count", "cbits_required"}
    assert d["per_outcome_fidelity"][4:] == [None] * 12

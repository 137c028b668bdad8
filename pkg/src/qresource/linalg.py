"""Dense complex linear algebra for small Hilbert spaces.

Matrices are plain numpy arrays. The Hermitian eigensolver is a cyclic
Jacobi iteration, which is accurate and fast enough for the dimensions
used here (reduced states up to 16x16, Gram matrices up to 64x64).
"""

from __future__ import annotations

from functools import reduce

import numpy as np

EPS_ORTHO = 1e-9
EPS_EIG = 1e-10
EPS_NORM = 1e-9
EPS_HERM = 1e-12

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class NotHermitianError(ValueError):
    pass


def tensor_product(*mats):
    """Kronecker product of one or more matrices or vectors, left to right."""
    if not mats:
        raise ValueError("tensor_product needs at least one operand")
    return reduce(np.kron, (np.asarray(m) for m in mats))


def check_hermitian(m, tol=EPS_HERM):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return m


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(np.abs(off) ** 2))


def jacobi_eigh(m, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with real eigenvalues sorted descending and
    the matching eigenvectors as columns of ``vectors``.
    """
    a = check_hermitian(m).astype(complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        if _off_norm(a) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g < 1e-300:
                    continue
                phase = apq / g
                theta = 0.5 * np.arctan2(2.0 * g, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                # 2x2 rotation: phase-align a[p,q] to real, then real Givens.
                j = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                a[q, p] = 0.0
                a[p, q] = 0.0
                v[:, idx] = v[:, idx] @ j
    vals = np.real(np.diag(a)).copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], v[:, order]


def hermitian_eigenvalues(m, psd=False):
    """Real eigenvalues of a Hermitian matrix, sorted descending.

    With ``psd=True`` tiny negative values in ``[-EPS_EIG, 0)`` are clamped
    to zero.
    """
    vals, _ = jacobi_eigh(m)
    if psd:
        vals = np.where((vals < 0) & (vals >= -EPS_EIG), 0.0, vals)
    return vals


def gram_matrix(vectors):
    """Matrix of inner products ``G[i, j] = <v_i|v_j>``."""
    vecs = [np.asarray(getattr(v, "amplitudes", v), dtype=complex).ravel() for v in vectors]
    if not vecs:
        return np.zeros((0, 0), dtype=complex)
    dim = vecs[0].shape[0]
    for k, v in enumerate(vecs):
        if v.shape[0] != dim:
            raise ValueError(f"vector {k} has dimension {v.shape[0]}, expected {dim}")
    stacked = np.stack(vecs, axis=1)
    g = stacked.conj().T @ stacked
    g[np.diag_indices_from(g)] = np.real(np.diag(g))
    return g


def is_unitary(u, tol=1e-9):
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def random_unitary(dim, rng):
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state_vector(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def apply_local(vec, op, qubits, n_qubits):
    """Apply ``op`` to the listed qubits (1-based labels) of an ``n_qubits`` vector.

    ``op`` acts on the qubits in the order given; qubit 1 is the most
    significant bit of the amplitude index.
    """
    qubits = list(qubits)
    k = len(qubits)
    op = np.asarray(op).reshape([2] * (2 * k))
    t = np.asarray(vec).reshape([2] * n_qubits)
    axes = [q - 1 for q in qubits]
    t = np.tensordot(op, t, axes=(list(range(k, 2 * k)), axes))
    t = np.moveaxis(t, list(range(k)), axes)
    return t.reshape(-1)


def permute_qubits(vec, perm):
    """Reorder qubits: new qubit ``i`` (1-based) is old qubit ``perm[i-1]``.

    Works as an index-bit permutation of the amplitude vector.
    """
    vec = np.asarray(vec)
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{perm!r} is not a permutation of 1..{n}")
    idx = np.arange(2**n)
    src = np.zeros_like(idx)
    for new_pos, old_label in enumerate(perm):
        bit = (idx >> (n - 1 - new_pos)) & 1
        src |= bit << (n - old_label)
    return vec[src]

"""Small linear-algebra helpers shared by the group and strata modules."""
from typing import Sequence

import numpy as np
from scipy.linalg import null_space


def canonical_basis(projector: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of the range of an orthogonal projector.

    Columns of the projector are orthogonalised in order, so subspaces aligned
    with coordinate axes get coordinate-aligned bases and every basis is
    reproducible.
    """
    d = projector.shape[0]
    basis = []
    for j in range(d):
        v = projector[:, j].copy()
        for b in basis:
            v -= np.dot(b, v) * b
        norm = np.linalg.norm(v)
        if norm > tol:
            basis.append(v / norm)
    if not basis:
        return np.zeros((d, 0))
    return np.column_stack(basis)


def span_basis(vectors: np.ndarray) -> np.ndarray:
    """Canonical orthonormal basis for the column span of ``vectors``."""
    d = vectors.shape[0]
    if vectors.size == 0:
        return np.zeros((d, 0))
    q, s, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if s.size else 1.0)))
    if rank == 0:
        return np.zeros((d, 0))
    q = q[:, :rank]
    return canonical_basis(q @ q.T)


def fixed_subspace(matrices: Sequence[np.ndarray], dim: int) -> np.ndarray:
    """Orthonormal basis (d x k) of the common eigenvalue-1 space of ``matrices``."""
    eye = np.eye(dim)
    if len(matrices) == 0:
        return eye.copy()
    stacked = np.vstack([m - eye for m in matrices])
    ns = null_space(stacked, rcond=1e-9)
    if ns.shape[1] == 0:
        return np.zeros((dim, 0))
    return canonical_basis(ns @ ns.T)


def restricted_fixed_subspace(basis: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Basis of span(basis) intersected with Fix(matrix), in ambient coordinates."""
    k = basis.shape[1]
    if k == 0:
        return basis
    inner = null_space((matrix - np.eye(matrix.shape[0])) @ basis, rcond=1e-9)
    if inner.shape[1] == 0:
        return np.zeros((basis.shape[0], 0))
    return span_basis(basis @ inner)


def orient(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Flip ``v`` so its first non-negligible entry is positive."""
    for x in v:
        if abs(x) > tol:
            return v if x > 0 else -v
    return v

"""Generalized Hermitian eigenbasis used by the Galerkin construction.

The basis vectors solve ``K+ h = lambda M h`` on the free dofs. They are
normalized so that each is a unit vector of the energy product, which makes
them orthonormal there and orthogonal (with norms 1/lambda) in L2. The
pencil is reduced to a standard Hermitian problem through the Cholesky
factor of the mass matrix, and all kernels fix signs deterministically so
repeated runs emit identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import NoConvergence, NotSPD

EIG_TOL = 1e-11
ORTHO_TOL = 1e-9


@dataclass
class EigenBasis:
    """First ``k`` eigenpairs of the (K+, M) pencil on the free dofs."""

    eigenvalues: np.ndarray  # ascending, positive
    vectors: np.ndarray  # (N, k), columns h_j with h_j* K+ h_j = 1
    plus_norms: np.ndarray  # h_j* K+ h_j, all 1 by normalization
    mass_norms: np.ndarray  # h_j* M h_j = 1/lambda_j

    @property
    def size(self) -> int:
        return self.vectors.shape[1]


@dataclass
class OrthogonalityReport:
    max_plus_residual: float  # max |h_i* K+ h_j - delta_ij|
    max_mass_offdiag: float  # max_{i != j} |h_i* M h_j|


def _dense(mat) -> np.ndarray:
    return mat.toarray() if sp.issparse(mat) else np.asarray(mat)


def cholesky_spd(M) -> np.ndarray:
    """Lower-triangular factor R with R R* = M; raises NotSPD otherwise."""
    A = _dense(M)
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise NotSPD(str(exc)) from exc


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column's phase so its largest-modulus entry is real
    positive (first such index on ties)."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        pivot = col[i]
        if np.abs(pivot) > 0.0:
            out[:, j] = col * (np.abs(pivot) / pivot)
    return out


def _tie_break(eigenvalues: np.ndarray, vectors: np.ndarray):
    """Order degenerate eigenvalue groups lexicographically by the
    sign-fixed vector entries, for reproducible output."""
    scale = max(1.0, float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 1.0)
    order = list(range(len(eigenvalues)))
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and abs(eigenvalues[order[j]] - eigenvalues[order[i]]) <= 1e-12 * scale:
            j += 1
        if j - i > 1:
            group = order[i:j]
            keys = {}
            for g in group:
                col = vectors[:, g]
                mags = np.abs(col)
                sig = np.nonzero(mags > 1e-8 * max(float(mags.max()), 1e-300))[0]
                first = int(sig[0]) if len(sig) else len(col)
                keys[g] = (
                    first,
                    tuple(np.round(np.concatenate([col.real, col.imag]), 9)),
                )
            order[i:j] = sorted(group, key=keys.get)
        i = j
    order = np.array(order)
    return eigenvalues[order], vectors[:, order]


def hermitian_eigen(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues,
    deterministic column phases."""
    A = _dense(H)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(V))):
        raise NoConvergence("eigendecomposition produced non-finite values")
    V = _fix_signs(V)
    w, V = _tie_break(w, V)
    return w, V


def generalized_eigenbasis(k_plus, mass, count: int) -> EigenBasis:
    """First ``count`` pairs of K+ h = lambda M h, energy-orthonormal."""
    K = _dense(k_plus)
    R = cholesky_spd(mass)
    # Reduce to the standard Hermitian problem R^-1 K R^-* y = lambda y.
    Y = sla.solve_triangular(R, K, lower=True)
    H = sla.solve_triangular(R, Y.conj().T, lower=True).conj().T
    H = 0.5 * (H + H.conj().T)
    w, V = hermitian_eigen(H)
    w, V = w[:count], V[:, :count]
    if np.any(w <= 0.0):
        raise NotSPD(f"pencil eigenvalue {float(np.min(w)):.3e} is not positive")
    vectors = sla.solve_triangular(R.conj().T, V, lower=False)
    vectors = vectors / np.sqrt(w)[None, :]
    vectors = _fix_signs(vectors)
    M = _dense(mass)
    plus_norms = np.real(np.einsum("ij,ij->j", vectors.conj(), K @ vectors))
    mass_norms = np.real(np.einsum("ij,ij->j", vectors.conj(), M @ vectors))
    return EigenBasis(
        eigenvalues=w, vectors=vectors, plus_norms=plus_norms, mass_norms=mass_norms
    )


def verify_orthogonality(basis: EigenBasis, k_plus, mass) -> OrthogonalityReport:
    """Measure orthonormality in the energy product and orthogonality in L2."""
    H = basis.vectors
    G_plus = H.conj().T @ (_dense(k_plus) @ H)
    G_mass = H.conj().T @ (_dense(mass) @ H)
    k = basis.size
    plus_res = float(np.max(np.abs(G_plus - np.eye(k))))
    off = np.abs(G_mass - np.diag(np.diag(G_mass)))
    mass_off = float(np.max(off)) if k > 1 else 0.0
    return OrthogonalityReport(max_plus_residual=plus_res, max_mass_offdiag=mass_off)

"""P1 finite element assembly of the discrete forms.

Three global matrices are built over all mesh nodes and then reduced by
eliminating the nodes pinned by the degenerate boundary set:

* ``k_plus`` -- the energy inner product: the principal part assembled
  through the pointwise factor D (so it is Hermitian PSD by construction,
  also for degenerate principal matrices), plus the nonnegative zero-order
  weight, plus the Robin boundary mass with weight b00/b1;
* ``mass``   -- the L2 mass matrix, exact for P1;
* ``first_order`` -- the non-symmetric form pairing the directional
  derivatives D_l against the test function, plus the delta_a0 weight.

Quadrature is 2-point Gauss on segments and the 3-point edge-midpoint rule
on triangles, both exact for quadratic integrands, hence exact whenever the
coefficients are elementwise constant.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConstraintOnAllDofs, DivisionByZeroB1, SingularKPlus
from .meshing import Mesh
from .problem import FactorizedPrincipal, ProblemSpec

_GAUSS2 = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))


def _element_geometry(mesh: Mesh):
    """Per-element constant gradients (E, dim, ndof) and measures (E,)."""
    p = mesh.nodes[mesh.elements]
    if mesh.dim == 1:
        h = p[:, 1, 0] - p[:, 0, 0]
        grads = np.stack([-1.0 / h, 1.0 / h], axis=1)[:, None, :]
        return grads, np.abs(h)
    J = np.stack(
        [p[:, 1, :] - p[:, 0, :], p[:, 2, :] - p[:, 0, :]], axis=2
    )  # columns are edge vectors
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    inv_t = (
        np.stack(
            [
                np.stack([J[:, 1, 1], -J[:, 1, 0]], axis=1),
                np.stack([-J[:, 0, 1], J[:, 0, 0]], axis=1),
            ],
            axis=1,
        )
        / det[:, None, None]
    )
    ref = np.array([[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    grads = inv_t @ ref
    return grads, 0.5 * np.abs(det)


def _element_quadrature(mesh: Mesh):
    """Quadrature points (E, Q, dim), weights (E, Q) including measure,
    and P1 values (Q, ndof)."""
    p = mesh.nodes[mesh.elements]
    if mesh.dim == 1:
        s = np.array(_GAUSS2)
        pts = p[:, None, 0, :] + s[None, :, None] * (p[:, None, 1, :] - p[:, None, 0, :])
        h = np.abs(p[:, 1, 0] - p[:, 0, 0])
        wts = 0.5 * h[:, None] * np.ones((1, 2))
        phi = np.stack([1.0 - s, s], axis=1)
        return pts, wts, phi
    bary = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    pts = np.einsum("qa,ead->eqd", bary, p)
    _, area = _element_geometry(mesh)
    wts = area[:, None] * np.full((1, 3), 1.0 / 3.0)
    return pts, wts, bary


def _facet_quadrature(mesh: Mesh, facet_idx: np.ndarray):
    """Quadrature on boundary facets: points (F, Qb, dim), weights (F, Qb)
    including measure, P1 facet values (Qb, nfdof)."""
    facets = mesh.boundary_facets[facet_idx]
    p = mesh.nodes[facets]
    if mesh.dim == 1:
        pts = p[:, None, 0, :]
        wts = mesh.facet_measures[facet_idx][:, None]
        phi = np.ones((1, 1))
        return facets, pts, wts, phi
    s = np.array(_GAUSS2)
    pts = p[:, None, 0, :] + s[None, :, None] * (p[:, None, 1, :] - p[:, None, 0, :])
    wts = 0.5 * mesh.facet_measures[facet_idx][:, None] * np.ones((1, 2))
    phi = np.stack([1.0 - s, s], axis=1)
    return facets, pts, wts, phi


def _coords(pts: np.ndarray):
    return tuple(pts[..., i] for i in range(pts.shape[-1]))


def _scatter_matrix(conn: np.ndarray, data: np.ndarray, size: int) -> sp.csr_matrix:
    ndof = conn.shape[1]
    rows = np.repeat(conn[:, :, None], ndof, axis=2)
    cols = np.repeat(conn[:, None, :], ndof, axis=1)
    return sp.coo_matrix(
        (data.ravel(), (rows.ravel(), cols.ravel())), shape=(size, size)
    ).tocsr()


def _robin_ratio(spec: ProblemSpec, coords) -> np.ndarray:
    b1 = np.real(np.asarray(spec.boundary_b1(*coords), dtype=complex))
    if np.any(b1 == 0.0):
        raise DivisionByZeroB1("b1 vanishes on an unconstrained boundary facet")
    b00 = np.real(np.asarray(spec.boundary_b00(*coords), dtype=complex))
    return b00 / b1


def assemble_plus_form(
    mesh: Mesh, spec: ProblemSpec, factorized: FactorizedPrincipal
) -> sp.csr_matrix:
    """Energy-product matrix over all nodes (unreduced), Hermitian PSD."""
    n = mesh.num_nodes
    grads, _ = _element_geometry(mesh)
    pts, wts, phi = _element_quadrature(mesh)
    ndof = mesh.elements.shape[1]
    data = np.zeros((len(mesh.elements), ndof, ndof), dtype=complex)
    for q in range(pts.shape[1]):
        coords = _coords(pts[:, q, :])
        D = factorized.factor(*coords)
        B = D @ grads
        data += wts[:, q, None, None] * np.einsum("eli,elj->eij", B.conj(), B)
        if spec.zero_order_a00 is not None:
            a00 = np.real(np.asarray(spec.zero_order_a00(*coords)))
            data += (wts[:, q] * a00)[:, None, None] * np.outer(phi[q], phi[q])
    K = _scatter_matrix(mesh.elements, data, n)

    robin = np.nonzero(~mesh.facet_dirichlet)[0]
    if len(robin) and spec.boundary_b00 is not None:
        facets, fpts, fwts, fphi = _facet_quadrature(mesh, robin)
        fdata = np.zeros((len(facets), facets.shape[1], facets.shape[1]))
        for q in range(fpts.shape[1]):
            ratio = _robin_ratio(spec, _coords(fpts[:, q, :]))
            fdata += (fwts[:, q] * ratio)[:, None, None] * np.outer(fphi[q], fphi[q])
        K = K + _scatter_matrix(facets, fdata.astype(complex), n)
    return (K + K.conj().T) * 0.5


def assemble_mass(mesh: Mesh) -> sp.csr_matrix:
    """L2 mass matrix over all nodes, from the exact P1 element mass."""
    _, measures = _element_geometry(mesh)
    if mesh.dim == 1:
        pattern = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    else:
        pattern = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    data = measures[:, None, None] * pattern
    return _scatter_matrix(mesh.elements, data, mesh.num_nodes)


def assemble_first_order(
    mesh: Mesh, spec: ProblemSpec, factorized: FactorizedPrincipal
) -> sp.csr_matrix:
    """Matrix of the lower-order form over all nodes (non-symmetric)."""
    n = mesh.num_nodes
    grads, _ = _element_geometry(mesh)
    pts, wts, phi = _element_quadrature(mesh)
    ndof = mesh.elements.shape[1]
    data = np.zeros((len(mesh.elements), ndof, ndof), dtype=complex)
    coeffs = list(spec.first_order or [])
    for q in range(pts.shape[1]):
        coords = _coords(pts[:, q, :])
        if coeffs:
            D = factorized.factor(*coords)
            B = D @ grads
            drift = np.zeros((len(mesh.elements), ndof), dtype=complex)
            for l, a_l in enumerate(coeffs):
                drift += np.asarray(a_l(*coords), dtype=complex)[:, None] * B[:, l, :]
            data += wts[:, q, None, None] * phi[q][None, :, None] * drift[:, None, :]
        if spec.zero_order_delta_a0 is not None:
            da0 = np.asarray(spec.zero_order_delta_a0(*coords), dtype=complex)
            data += (wts[:, q] * da0)[:, None, None] * np.outer(phi[q], phi[q])
    return _scatter_matrix(mesh.elements, data, n)


def assemble_load(mesh: Mesh, f: Optional[Callable], t: float) -> np.ndarray:
    """Load vector <f(., t), phi_i> with constrained entries dropped."""
    free = free_nodes(mesh)
    if f is None:
        return np.zeros(len(free), dtype=complex)
    pts, wts, phi = _element_quadrature(mesh)
    F = np.zeros(mesh.num_nodes, dtype=complex)
    for q in range(pts.shape[1]):
        vals = np.asarray(f(*_coords(pts[:, q, :]), t), dtype=complex)
        np.add.at(F, mesh.elements, (wts[:, q] * vals)[:, None] * phi[q][None, :])
    return F[free]


def free_nodes(mesh: Mesh) -> np.ndarray:
    constrained = mesh.dirichlet_nodes()
    mask = np.ones(mesh.num_nodes, dtype=bool)
    mask[constrained] = False
    return np.nonzero(mask)[0]


def apply_S_constraints(obj, constrained_dofs: np.ndarray):
    """Drop rows/columns (entries) at the constrained dofs."""
    constrained = np.asarray(constrained_dofs, dtype=int)
    if sp.issparse(obj):
        size = obj.shape[0]
        mask = np.ones(size, dtype=bool)
        mask[constrained] = False
        keep = np.nonzero(mask)[0]
        return obj.tocsr()[keep][:, keep]
    arr = np.asarray(obj)
    mask = np.ones(arr.shape[0], dtype=bool)
    mask[constrained] = False
    if arr.ndim == 1:
        return arr[mask]
    return arr[np.ix_(mask, mask)]


@dataclass
class DofMap:
    """Free/constrained node bookkeeping for one mesh."""

    total: int
    free: np.ndarray
    constrained: np.ndarray

    def expand(self, reduced: np.ndarray) -> np.ndarray:
        full = np.zeros(self.total, dtype=complex)
        full[self.free] = reduced
        return full

    def reduce(self, full: np.ndarray) -> np.ndarray:
        return np.asarray(full)[self.free]


@dataclass
class AssembledForms:
    """Constraint-reduced matrices of one discretized problem."""

    mesh: Mesh
    dofmap: DofMap
    k_plus: sp.csr_matrix
    mass: sp.csr_matrix
    first_order: sp.csr_matrix
    spec: ProblemSpec = None
    _k_factor: object = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return len(self.dofmap.free)

    def k_plus_solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._k_factor is None:
            try:
                self._k_factor = spla.splu(self.k_plus.tocsc())
            except RuntimeError as exc:
                raise SingularKPlus(str(exc)) from exc
        return self._k_factor.solve(np.asarray(rhs, dtype=complex))

    def load(self, t: float) -> np.ndarray:
        return assemble_load(self.mesh, self.spec.source if self.spec else None, t)

    def load_dual_norm(self, t: float) -> float:
        return dual_norm(self.load(t), self.k_plus, factor=self)


def dual_norm(F: np.ndarray, k_plus, factor: Optional[AssembledForms] = None) -> float:
    """Discrete dual norm sqrt(F* K+^-1 F) of a reduced load vector."""
    F = np.asarray(F, dtype=complex)
    if not np.any(F):
        return 0.0
    if factor is not None:
        x = factor.k_plus_solve(F)
    else:
        try:
            if sp.issparse(k_plus):
                x = spla.splu(k_plus.tocsc()).solve(F)
            else:
                x = np.linalg.solve(np.asarray(k_plus), F)
        except (RuntimeError, np.linalg.LinAlgError) as exc:
            raise SingularKPlus(str(exc)) from exc
    val = float(np.real(np.vdot(F, x)))
    return float(np.sqrt(max(val, 0.0)))


def assemble_forms(
    mesh: Mesh, spec: ProblemSpec, factorized: FactorizedPrincipal
) -> AssembledForms:
    """Assemble and reduce all matrices for one problem."""
    constrained = mesh.dirichlet_nodes()
    free = free_nodes(mesh)
    if len(free) == 0:
        raise ConstraintOnAllDofs("no free degrees of freedom remain")
    dofmap = DofMap(total=mesh.num_nodes, free=free, constrained=constrained)
    K = apply_S_constraints(assemble_plus_form(mesh, spec, factorized), constrained)
    M = apply_S_constraints(assemble_mass(mesh), constrained)
    C = apply_S_constraints(assemble_first_order(mesh, spec, factorized), constrained)
    return AssembledForms(
        mesh=mesh, dofmap=dofmap, k_plus=K, mass=M, first_order=C, spec=spec
    )


def export_matrix_coo(path: str, matrix) -> None:
    """Write a matrix in coordinate text format (row, col, re, im)."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im"])
        for i in order:
            v = complex(coo.data[i])
            w.writerow(
                [int(coo.row[i]), int(coo.col[i]), format(v.real, ".17g"), format(v.imag, ".17g")]
            )

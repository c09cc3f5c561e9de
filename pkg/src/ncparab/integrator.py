"""Time integration of the Galerkin system in the eigenbasis.

Expanding the approximate solution in the energy-orthonormal basis turns
the weak problem into a k-dimensional linear ODE system

    g_i(t) + sum_j Chat[i, j] g_j(t) + d_i g_i'(t) = Fhat_i(t),

where ``Chat`` pairs the lower-order form against the basis and
``d_i`` is the squared L2 norm of the i-th basis vector. The system is
complex and solved natively in complex arithmetic with a one-parameter
implicit theta scheme (theta = 1/2 Crank-Nicolson by default, theta = 1
backward Euler); the step matrix is factored once since the coefficients do
not depend on time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla

from .assembly import AssembledForms, assemble_load, dual_norm
from .errors import SingularStepMatrix, TimeOffGrid
from .problem import ProblemSpec
from .spectral import EigenBasis


@dataclass
class GalerkinSystem:
    """Coefficient data of the k-dimensional evolution system."""

    dimension: int
    interaction: np.ndarray  # (k, k), modal matrix of the lower-order form
    capacitance: np.ndarray  # (k,), squared L2 norms of the basis vectors
    forcing: Callable  # t -> (k,) complex modal load


@dataclass
class GalerkinTrajectory:
    """Computed trajectory on a uniform time grid with norm traces."""

    times: np.ndarray  # (M+1,)
    coefficients: np.ndarray  # (M+1, k)
    norm_plus_sq: np.ndarray  # |g|^2, the energy norm squared
    norm_l2_sq: np.ndarray  # sum d_i |g_i|^2
    dual_f_sq: np.ndarray  # squared dual norm of the full load
    theta: float
    basis: EigenBasis = field(repr=False)
    forms: AssembledForms = field(repr=False)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def time_index(self, t: float) -> int:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-12 * max(1.0, float(self.times[-1])):
            raise TimeOffGrid(f"t = {t} is not on the trajectory grid")
        return idx


def build_galerkin_system(
    forms: AssembledForms, basis: EigenBasis, k: int, source: Optional[Callable] = None
) -> GalerkinSystem:
    """Project the assembled forms onto the first k basis vectors."""
    H = basis.vectors[:, :k]
    interaction = H.conj().T @ (forms.first_order @ H)
    capacitance = basis.mass_norms[:k].copy()
    mesh = forms.mesh

    def forcing(t: float) -> np.ndarray:
        if source is None:
            return np.zeros(k, dtype=complex)
        return H.conj().T @ assemble_load(mesh, source, t)

    return GalerkinSystem(
        dimension=k, interaction=interaction, capacitance=capacitance, forcing=forcing
    )


def project_initial(u0: np.ndarray, basis: EigenBasis, mass) -> np.ndarray:
    """L2-orthogonal projection coefficients of the nodal vector u0."""
    Mu = mass @ np.asarray(u0, dtype=complex)
    return (basis.vectors.conj().T @ Mu) / basis.mass_norms


def _step_matrices(system: GalerkinSystem, theta: float, dt: float):
    k = system.dimension
    D = np.diag(system.capacitance)
    A = np.eye(k) + system.interaction
    lhs = D / dt + theta * A
    rhs = D / dt - (1.0 - theta) * A
    return lhs, rhs


def _factor(lhs: np.ndarray):
    lu, piv = sla.lu_factor(lhs)
    if np.min(np.abs(np.diag(lu))) < 1e-300:
        raise SingularStepMatrix("implicit step matrix is singular")
    return lu, piv


def step_theta(
    system: GalerkinSystem, g: np.ndarray, theta: float, dt: float, t: float = 0.0
) -> np.ndarray:
    """One theta-scheme step from time t to t + dt."""
    lhs, rhs = _step_matrices(system, theta, dt)
    lu, piv = _factor(lhs)
    b = rhs @ g + theta * system.forcing(t + dt) + (1.0 - theta) * system.forcing(t)
    return sla.lu_solve((lu, piv), b)


def solve_evolution(
    spec: ProblemSpec,
    forms: AssembledForms,
    basis: EigenBasis,
    k: int,
    time_steps: int,
    theta: float = 0.5,
) -> GalerkinTrajectory:
    """Full trajectory on [0, T] with energy, L2 and dual-norm traces.

    The dual-norm trace uses the full discrete load, not its truncation to
    the first k modes.
    """
    system = build_galerkin_system(forms, basis, k, source=spec.source)
    T = spec.final_time
    dt = T / time_steps
    times = np.linspace(0.0, T, time_steps + 1)

    u0_full = np.zeros(forms.mesh.num_nodes, dtype=complex)
    if spec.initial is not None:
        nodes = forms.mesh.nodes
        coords = tuple(nodes[:, i] for i in range(forms.mesh.dim))
        u0_full = np.asarray(spec.initial(*coords), dtype=complex)
    u0 = forms.dofmap.reduce(u0_full)

    sub_basis = EigenBasis(
        eigenvalues=basis.eigenvalues[:k],
        vectors=basis.vectors[:, :k],
        plus_norms=basis.plus_norms[:k],
        mass_norms=basis.mass_norms[:k],
    )
    coeffs = np.zeros((time_steps + 1, k), dtype=complex)
    coeffs[0] = project_initial(u0, sub_basis, forms.mass)

    lhs, rhs = _step_matrices(system, theta, dt)
    lu, piv = _factor(lhs)
    loads = [system.forcing(t) for t in times]
    for m in range(time_steps):
        b = rhs @ coeffs[m] + theta * loads[m + 1] + (1.0 - theta) * loads[m]
        coeffs[m + 1] = sla.lu_solve((lu, piv), b)

    norm_plus_sq = np.sum(np.abs(coeffs) ** 2, axis=1)
    norm_l2_sq = np.sum(system.capacitance[None, :] * np.abs(coeffs) ** 2, axis=1)
    if spec.source is None:
        dual_f_sq = np.zeros(time_steps + 1)
    else:
        dual_f_sq = np.array(
            [dual_norm(forms.load(t), forms.k_plus, factor=forms) ** 2 for t in times]
        )
    return GalerkinTrajectory(
        times=times,
        coefficients=coeffs,
        norm_plus_sq=norm_plus_sq,
        norm_l2_sq=norm_l2_sq,
        dual_f_sq=dual_f_sq,
        theta=theta,
        basis=sub_basis,
        forms=forms,
    )


def reconstruct_solution(
    trajectory: GalerkinTrajectory, basis: EigenBasis, mesh, t: float
) -> np.ndarray:
    """Nodal solution values at a grid time, zeros reinstated on the
    constrained nodes."""
    idx = trajectory.time_index(t)
    k = trajectory.coefficients.shape[1]
    reduced = basis.vectors[:, :k] @ trajectory.coefficients[idx]
    return trajectory.forms.dofmap.expand(reduced)


def energy_identity_residuals(
    system: GalerkinSystem, trajectory: GalerkinTrajectory
) -> np.ndarray:
    """Relative defect of the discrete energy balance at each implicit step.

    For the backward scheme, pairing the step equation with the new state
    gives, after taking real parts,

        Re<dg/dt, D g> + |g|^2 + Re(g* Chat g) = Re(g* Fhat),

    which a correctly solved step satisfies to solver precision.
    """
    g = trajectory.coefficients
    dt = trajectory.dt
    d = system.capacitance
    res = np.zeros(len(g) - 1)
    for m in range(len(g) - 1):
        gn = g[m + 1]
        lhs = (
            np.real(np.vdot(gn, d * (gn - g[m]) / dt))
            + float(np.real(np.vdot(gn, gn)))
            + float(np.real(np.vdot(gn, system.interaction @ gn)))
        )
        rhs = float(np.real(np.vdot(gn, system.forcing(trajectory.times[m + 1]))))
        scale = max(
            abs(lhs),
            abs(rhs),
            float(np.real(np.vdot(gn, gn))),
            1e-30,
        )
        res[m] = abs(lhs - rhs) / scale
    return res

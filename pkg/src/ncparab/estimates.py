"""A priori bounds, the uniqueness criterion, and trajectory diagnostics.

The energy argument for the evolution problem yields two exponential-in-time
bounds: a sup bound on the squared L2 norm and an energy bound on the time
integral of the squared energy norm, both with right side

    (|u0|_L2^2 + int_0^T |f|_-^2 dt) * exp((2 c2 + 2 c1^2) T),

where c1 controls the directional-derivative coefficients and c2 the
zero-order remainder. The right side does not depend on the basis size.
Verification on a computed trajectory uses trapezoidal quadrature of the
norm traces and an explicit slack for quadrature and projection error;
violations are reported, not raised, so near-degenerate configurations can
still be explored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .integrator import GalerkinTrajectory
from .problem import ProblemSpec, sample_interior_points

UNIQUENESS_TOL = 1e-10
BOUND_SLACK = 0.02


@dataclass
class EstimateReport:
    c1: float
    c2: float
    gronwall_factor: float
    sup_lhs: float
    sup_rhs: float
    energy_lhs: float
    energy_rhs: float
    sup_ok: bool
    energy_ok: bool
    uniqueness_min_eig: float = float("nan")
    uniqueness_ok: bool = False
    continuity_max_jump: float = float("nan")

    @property
    def bounds_ok(self) -> bool:
        return self.sup_ok and self.energy_ok


def compute_constants(spec: ProblemSpec, sample_density: int = 32) -> tuple[float, float]:
    """Constants (c1, c2) from coefficient sup norms by dense sampling.

    c1 is the Euclidean norm of the per-direction sups of the first-order
    coefficients (their directional derivatives are dominated by the energy
    norm); c2 is the sup of |delta_a0|.
    """
    pts = sample_interior_points(spec.domain, sample_density)
    coords = tuple(pts[:, i] for i in range(pts.shape[1]))
    sup_sq = 0.0
    for a_l in spec.first_order or []:
        sup_sq += float(np.max(np.abs(np.asarray(a_l(*coords), dtype=complex)))) ** 2
    c1 = float(np.sqrt(sup_sq))
    c2 = 0.0
    if spec.zero_order_delta_a0 is not None:
        c2 = float(np.max(np.abs(np.asarray(spec.zero_order_delta_a0(*coords), dtype=complex))))
    return c1, c2


def apriori_bounds(
    trajectory: GalerkinTrajectory,
    u0: np.ndarray,
    c1: float,
    c2: float,
    T: float,
    slack: float = BOUND_SLACK,
) -> EstimateReport:
    """Check the sup and energy bounds on a computed trajectory.

    ``u0`` is the reduced nodal initial vector; its squared L2 norm enters
    the right side through the mass matrix, k-independently.
    """
    mass = trajectory.forms.mass
    u0 = np.asarray(u0, dtype=complex)
    u0_sq = float(np.real(np.vdot(u0, mass @ u0)))
    f_int = float(np.trapezoid(trajectory.dual_f_sq, trajectory.times))
    factor = float(np.exp((2.0 * c2 + 2.0 * c1**2) * T))
    rhs = (u0_sq + f_int) * factor

    sup_lhs = float(np.max(trajectory.norm_l2_sq))
    energy_lhs = 0.5 * float(
        np.trapezoid(trajectory.norm_plus_sq, trajectory.times)
    ) + float(trajectory.norm_l2_sq[-1])

    return EstimateReport(
        c1=c1,
        c2=c2,
        gronwall_factor=factor,
        sup_lhs=sup_lhs,
        sup_rhs=rhs,
        energy_lhs=energy_lhs,
        energy_rhs=rhs,
        sup_ok=sup_lhs <= rhs * (1.0 + slack) + 1e-30,
        energy_ok=energy_lhs <= rhs * (1.0 + slack) + 1e-30,
    )


def check_uniqueness_condition(interaction, tol: float = UNIQUENESS_TOL) -> tuple[float, bool]:
    """Smallest eigenvalue of the Hermitian part of the lower-order matrix.

    Nonnegativity (up to ``tol``) is the discrete version of the sign
    condition under which the evolution problem has exactly one solution.
    Accepts the modal matrix or the nodal one.
    """
    A = interaction.toarray() if sp.issparse(interaction) else np.asarray(interaction)
    herm = 0.5 * (A + A.conj().T)
    min_eig = float(np.min(np.linalg.eigvalsh(herm))) if len(herm) else 0.0
    return min_eig, min_eig >= -tol


def check_continuity(trajectory: GalerkinTrajectory) -> float:
    """Largest jump of the L2 norm between adjacent grid times.

    Shrinks proportionally to the step size for trajectories approximating
    a solution continuous in L2.
    """
    norms = np.sqrt(trajectory.norm_l2_sq)
    if len(norms) < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(norms))))


def check_cauchy_bound(
    forms, c1: float, c2: float, n_vectors: int = 200, seed: int = 0
) -> tuple[float, bool]:
    """Random-vector check of the lower-order form bound.

    For the constant c = c1 + c2 the form satisfies
    |v* C u| <= c * sqrt(u*(K+ + M)u) * sqrt(v*(K+ + M)v); returns the
    largest observed ratio and whether it stays below c (with roundoff
    headroom).
    """
    rng = np.random.default_rng(seed)
    n = forms.N
    c = c1 + c2
    worst = 0.0
    for _ in range(n_vectors):
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        num = abs(np.vdot(v, forms.first_order @ u))
        den_u = np.sqrt(
            np.real(np.vdot(u, forms.k_plus @ u)) + np.real(np.vdot(u, forms.mass @ u))
        )
        den_v = np.sqrt(
            np.real(np.vdot(v, forms.k_plus @ v)) + np.real(np.vdot(v, forms.mass @ v))
        )
        if den_u * den_v > 0.0:
            worst = max(worst, num / (den_u * den_v))
    return worst, worst <= c * (1.0 + 1e-9) + 1e-12

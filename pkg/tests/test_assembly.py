import numpy as np
import pytest
import scipy.linalg as sla

from ncparab import fields
from ncparab.assembly import (
    apply_S_constraints,
    assemble_first_order,
    assemble_forms,
    assemble_load,
    assemble_mass,
    assemble_plus_form,
    dual_norm,
    free_nodes,
)
from ncparab.errors import ConstraintOnAllDofs, SingularKPlus
from ncparab.meshing import Mesh, build_mesh
from ncparab.presets import build_disk
from ncparab.problem import (
    Interval,
    ProblemSpec,
    Rectangle,
    factorize_principal,
    sample_interior_points,
)


def _interval_spec(**overrides):
    kwargs = dict(
        domain=Interval(0.0, 1.0),
        final_time=1.0,
        principal=fields.constant_matrix([[1.0]]),
        first_order=[],
        zero_order_a00=fields.constant_scalar(0.0),
        zero_order_delta_a0=fields.constant_scalar(0.0),
        boundary_b1=fields.constant_scalar(1.0),
        boundary_b00=fields.constant_scalar(0.0),
        dirichlet_selector=lambda x: np.ones(np.shape(x), dtype=bool),
    )
    kwargs.update(overrides)
    return ProblemSpec(**kwargs)


def _pipeline(spec, resolution):
    mesh = build_mesh(spec.domain, resolution, spec.dirichlet_selector)
    fz = factorize_principal(spec, sample_interior_points(spec.domain, 4))
    return mesh, fz


def test_1d_dirichlet_stiffness_matches_hand_assembly():
    n = 6
    h = 1.0 / n
    spec = _interval_spec()
    mesh, fz = _pipeline(spec, n)
    forms = assemble_forms(mesh, spec, fz)
    expected = (
        np.diag(2.0 * np.ones(n - 1))
        - np.diag(np.ones(n - 2), 1)
        - np.diag(np.ones(n - 2), -1)
    ) / h
    assert np.allclose(forms.k_plus.toarray(), expected, atol=1e-12)


def test_zero_principal_gives_mass():
    # Positivity alone allows a vanishing principal part; the a00 term then
    # makes the energy product the plain mass matrix.
    spec = _interval_spec(
        principal=fields.constant_matrix([[0.0]]),
        zero_order_a00=fields.constant_scalar(1.0),
        dirichlet_selector=None,
    )
    mesh, fz = _pipeline(spec, 5)
    K = assemble_plus_form(mesh, spec, fz)
    M = assemble_mass(mesh)
    assert np.allclose(K.toarray(), M.toarray(), atol=1e-14)


def test_disk_preset_is_principal_plus_boundary_mass():
    spec = build_disk()
    mesh, fz = _pipeline(spec, 4)
    K = assemble_plus_form(mesh, spec, fz).toarray()
    principal_only = ProblemSpec(
        domain=spec.domain,
        final_time=1.0,
        principal=spec.principal,
        boundary_b1=fields.constant_scalar(1.0),
        boundary_b00=fields.constant_scalar(0.0),
    )
    boundary_only = ProblemSpec(
        domain=spec.domain,
        final_time=1.0,
        principal=fields.constant_matrix(np.zeros((2, 2))),
        boundary_b1=spec.boundary_b1,
        boundary_b00=spec.boundary_b00,
    )
    P = assemble_plus_form(mesh, principal_only, fz).toarray()
    B = assemble_plus_form(
        mesh, boundary_only, factorize_principal(boundary_only, np.zeros((1, 2)))
    ).toarray()
    assert np.allclose(K, P + B, atol=1e-13)
    assert np.max(np.abs(B.imag)) == 0.0


def test_mass_1d_element_pattern():
    mesh = build_mesh(Interval(0.0, 1.0), 2)
    h = 0.5
    expected = h / 6.0 * np.array([[2.0, 1.0, 0.0], [1.0, 4.0, 1.0], [0.0, 1.0, 2.0]])
    assert np.allclose(assemble_mass(mesh).toarray(), expected, atol=1e-15)


def test_mass_partition_of_unity_1d():
    mesh = build_mesh(Interval(0.0, 1.0), 7)
    M = assemble_mass(mesh).toarray()
    # row sums integrate the hat functions; total is the domain measure
    row_sums = M.sum(axis=1)
    h = 1.0 / 7
    assert row_sums[0] == pytest.approx(h / 2)
    assert np.allclose(row_sums[1:-1], h)
    assert M.sum() == pytest.approx(1.0, abs=1e-12)


def test_mass_total_rectangle_area_two():
    mesh = build_mesh(Rectangle(0.0, 2.0, 0.0, 1.0), 5)
    assert assemble_mass(mesh).sum() == pytest.approx(2.0, abs=1e-12)


def test_first_order_zero_coefficients():
    spec = _interval_spec(dirichlet_selector=None)
    mesh, fz = _pipeline(spec, 4)
    C = assemble_first_order(mesh, spec, fz)
    assert C.nnz == 0 or np.max(np.abs(C.toarray())) == 0.0


def test_first_order_constant_delta_a0_is_scaled_mass():
    c = 0.7 - 0.3j
    spec = _interval_spec(zero_order_delta_a0=fields.constant_scalar(c), dirichlet_selector=None)
    mesh, fz = _pipeline(spec, 4)
    C = assemble_first_order(mesh, spec, fz).toarray()
    M = assemble_mass(mesh).toarray()
    assert np.allclose(C, c * M, atol=1e-14)


def test_convection_matches_hand_assembly():
    # P1 convection on 3 elements: element block [[-1/2, 1/2], [-1/2, 1/2]].
    spec = _interval_spec(first_order=[fields.constant_scalar(1.0)], dirichlet_selector=None)
    mesh, fz = _pipeline(spec, 3)
    C = assemble_first_order(mesh, spec, fz).toarray()
    block = np.array([[-0.5, 0.5], [-0.5, 0.5]])
    expected = np.zeros((4, 4), dtype=complex)
    for e in range(3):
        expected[e : e + 2, e : e + 2] += block
    assert np.allclose(C, expected, atol=1e-14)
    # column sums reduce to the boundary evaluations of each hat function
    assert np.allclose(C.sum(axis=0), [-1.0, 0.0, 0.0, 1.0], atol=1e-14)


def test_load_zero_source():
    mesh = build_mesh(Interval(0.0, 1.0), 4)
    assert np.all(assemble_load(mesh, None, 0.0) == 0.0)
    f = lambda x, t: np.zeros(np.shape(x), dtype=complex)
    assert np.allclose(assemble_load(mesh, f, 0.0), 0.0)


def test_load_constant_source_interior():
    n = 5
    sel = lambda x: np.ones(np.shape(x), dtype=bool)
    mesh = build_mesh(Interval(0.0, 1.0), n, sel)
    f = lambda x, t: np.ones(np.shape(x), dtype=complex)
    F = assemble_load(mesh, f, 0.0)
    assert np.allclose(F, 1.0 / n, atol=1e-14)


def test_load_of_basis_function_is_mass_column():
    n = 6
    mesh = build_mesh(Interval(0.0, 1.0), n)
    M = assemble_mass(mesh).toarray()
    nodes = mesh.nodes[:, 0]
    k = 2
    hat = np.zeros(n + 1)
    hat[k] = 1.0

    def f(x, t):
        return np.interp(x, nodes, hat).astype(complex)

    F = assemble_load(mesh, f, 0.0)
    assert np.allclose(F, M[:, k], atol=1e-14)


def test_apply_constraints_identity_when_s_empty():
    mesh = build_mesh(Interval(0.0, 1.0), 4)
    M = assemble_mass(mesh)
    reduced = apply_S_constraints(M, mesh.dirichlet_nodes())
    assert reduced.shape == M.shape
    assert np.allclose(reduced.toarray(), M.toarray())


def test_apply_constraints_removes_endpoints():
    sel = lambda x: np.ones(np.shape(x), dtype=bool)
    mesh = build_mesh(Interval(0.0, 1.0), 6, sel)
    M = assemble_mass(mesh)
    reduced = apply_S_constraints(M, mesh.dirichlet_nodes())
    assert reduced.shape == (5, 5)
    vec = np.arange(7, dtype=float)
    assert np.allclose(apply_S_constraints(vec, mesh.dirichlet_nodes()), vec[1:-1])


def test_reduce_then_expand_is_identity_on_free_dofs():
    spec = _interval_spec()
    mesh, fz = _pipeline(spec, 5)
    forms = assemble_forms(mesh, spec, fz)
    v = np.arange(forms.N, dtype=complex) + 1.0j
    assert np.allclose(forms.dofmap.reduce(forms.dofmap.expand(v)), v)
    full = forms.dofmap.expand(v)
    assert np.all(full[forms.dofmap.constrained] == 0.0)


def test_constraining_everything_raises():
    nodes = np.array([[0.0], [0.5], [1.0]])
    elements = np.array([[0, 1], [1, 2]])
    facets = np.array([[0], [1], [2]])
    mesh = Mesh(
        1,
        nodes,
        elements,
        facets,
        np.array([[-1.0], [1.0], [1.0]]),
        np.ones(3),
        np.ones(3, dtype=bool),
    )
    spec = _interval_spec(dirichlet_selector=None)
    fz = factorize_principal(spec, np.array([[0.5]]))
    with pytest.raises(ConstraintOnAllDofs):
        assemble_forms(mesh, spec, fz)


def test_dual_norm_trivial_cases():
    assert dual_norm(np.zeros(4), np.eye(4)) == 0.0
    F = np.array([3.0, 4.0j, 0.0])
    assert dual_norm(F, np.eye(3)) == pytest.approx(5.0)


def test_dual_norm_matches_monte_carlo_sup():
    rng = np.random.default_rng(7)
    n = 3
    B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    K = B.conj().T @ B + n * np.eye(n)
    F = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    exact_sq = dual_norm(F, K) ** 2
    V = rng.standard_normal((10_000, n)) + 1j * rng.standard_normal((10_000, n))
    num = np.abs(V.conj() @ F) ** 2
    den = np.real(np.einsum("vi,ij,vj->v", V.conj(), K, V))
    mc = float(np.max(num / den))
    assert mc <= exact_sq * (1.0 + 1e-12)
    assert mc >= exact_sq * 0.95


def test_dual_norm_singular_raises():
    with pytest.raises(SingularKPlus):
        dual_norm(np.ones(2), np.zeros((2, 2)))


def test_k_plus_hermitian_and_positive_definite(disk_pipeline):
    _, _, forms, _, _ = disk_pipeline
    K = forms.k_plus.toarray()
    assert np.max(np.abs(K - K.conj().T)) <= 1e-12
    assert np.min(np.linalg.eigvalsh(K)) > 0.0


def test_discrete_cauchy_bound_random_vectors():
    spec = _interval_spec(
        first_order=[fields.constant_scalar(0.5)],
        zero_order_delta_a0=fields.constant_scalar(-0.2j),
    )
    mesh, fz = _pipeline(spec, 20)
    forms = assemble_forms(mesh, spec, fz)
    c = 0.5 + 0.2  # c1 + c2 for these constants
    rng = np.random.default_rng(11)
    K, M, C = forms.k_plus.toarray(), forms.mass.toarray(), forms.first_order.toarray()
    for _ in range(200):
        u = rng.standard_normal(forms.N) + 1j * rng.standard_normal(forms.N)
        v = rng.standard_normal(forms.N) + 1j * rng.standard_normal(forms.N)
        lhs = abs(np.vdot(v, C @ u))
        rhs = np.sqrt(np.real(np.vdot(u, K @ u)) + np.real(np.vdot(u, M @ u)))
        rhs *= np.sqrt(np.real(np.vdot(v, K @ v)) + np.real(np.vdot(v, M @ v)))
        assert lhs <= c * rhs * (1.0 + 1e-9)


def test_pencil_eigenvalues_grow_with_constraints():
    # Nested Dirichlet sets shrink the trial space, so pencil eigenvalues
    # cannot decrease (min-max). a00 = 1 keeps the form definite without S.
    selectors = [None, lambda x: np.isclose(x, 0.0), lambda x: np.ones(np.shape(x), bool)]
    spectra = []
    for sel in selectors:
        spec = _interval_spec(zero_order_a00=fields.constant_scalar(1.0), dirichlet_selector=sel)
        mesh, fz = _pipeline(spec, 12)
        forms = assemble_forms(mesh, spec, fz)
        vals = sla.eigh(
            forms.k_plus.toarray(), forms.mass.toarray(), eigvals_only=True
        )
        spectra.append(np.sort(vals))
    for fewer, more in zip(spectra[:-1], spectra[1:]):
        shared = min(len(fewer), len(more))
        assert np.all(more[:shared] >= fewer[:shared] - 1e-10)


def test_coercive_case_dominates_h1_form():
    # With identity principal part and a00 = 1 the energy form dominates
    # stiffness + mass; boundary weight only adds a PSD term.
    spec = _interval_spec(
        zero_order_a00=fields.constant_scalar(1.0),
        boundary_b1=fields.constant_scalar(1.0),
        boundary_b00=fields.constant_scalar(1.0),
        dirichlet_selector=None,
    )
    mesh, fz = _pipeline(spec, 10)
    K = assemble_plus_form(mesh, spec, fz).toarray()
    stiffness_only = _interval_spec(dirichlet_selector=None)
    S = assemble_plus_form(mesh, stiffness_only, fz).toarray()
    M = assemble_mass(mesh).toarray()
    assert np.min(np.linalg.eigvalsh(K - (S + M))) >= -1e-12


def test_l2_embedding_constant_finite():
    for builder, res in ((build_disk, 3), (None, 10)):
        if builder is None:
            spec = _interval_spec(dirichlet_selector=lambda x: np.ones(np.shape(x), bool))
        else:
            spec = builder()
        mesh, fz = _pipeline(spec, res)
        forms = assemble_forms(mesh, spec, fz)
        vals = sla.eigh(forms.mass.toarray(), forms.k_plus.toarray(), eigvals_only=True)
        c_sq = float(np.max(vals))
        assert np.isfinite(c_sq) and c_sq > 0.0


def test_free_nodes_complement_constrained():
    sel = lambda x: np.isclose(x, 1.0)
    mesh = build_mesh(Interval(0.0, 1.0), 5, sel)
    assert list(free_nodes(mesh)) == [0, 1, 2, 3, 4]
    assert list(mesh.dirichlet_nodes()) == [5]

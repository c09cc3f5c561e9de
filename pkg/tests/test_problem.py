import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncparab import fields
from ncparab.errors import (
    DivisionByZeroB1,
    NonHermitian,
    NotElliptic,
    NotPositiveSemidefinite,
)
from ncparab.problem import (
    FACTORIZATION_TOL,
    PSD_TOL,
    Interval,
    ProblemSpec,
    UnitDiskPolygon,
    factorize_principal,
    hermitian_sqrt_psd,
    sample_interior_points,
    split_zero_order,
    validate_coefficients,
)

DISK_MATRIX = np.array([[1.0, 1.0j], [-1.0j, 1.0]])


def _spec_with_principal(mat, domain=None):
    mat = np.asarray(mat, dtype=complex)
    domain = domain or (Interval(0.0, 1.0) if mat.shape[0] == 1 else UnitDiskPolygon(16))
    return ProblemSpec(
        domain=domain,
        final_time=1.0,
        principal=fields.constant_matrix(mat),
        zero_order_a00=fields.constant_scalar(0.0),
        boundary_b1=fields.constant_scalar(1.0),
        boundary_b00=fields.constant_scalar(0.0),
    )


def test_validate_identity():
    report = validate_coefficients(_spec_with_principal(np.eye(2)))
    assert report.ellipticity_m == pytest.approx(1.0)
    assert report.min_complex_eigenvalue == pytest.approx(1.0)
    assert report.hermitian_residual == 0.0
    assert report.coercive
    assert report.passed


def test_validate_degenerate_disk_matrix():
    # Real quadratic form is |xi|^2 (imaginary entries cancel for real xi)
    # while the complex Hermitian form has eigenvalues 0 and 2.
    report = validate_coefficients(_spec_with_principal(DISK_MATRIX))
    assert report.ellipticity_m == pytest.approx(1.0, abs=1e-10)
    assert report.min_complex_eigenvalue == pytest.approx(0.0, abs=1e-10)
    assert not report.coercive
    assert report.passed  # positivity holds even though coercivity fails


def test_validate_indefinite_matrix_raises():
    # Eigenvalues of [[1, 2i], [-2i, 1]] are 1 -+ 2 = -1, 3 in closed form.
    mat = np.array([[1.0, 2.0j], [-2.0j, 1.0]])
    assert sorted(np.linalg.eigvalsh(mat)) == pytest.approx([-1.0, 3.0])
    with pytest.raises(NotPositiveSemidefinite):
        validate_coefficients(_spec_with_principal(mat))


def test_validate_non_hermitian_raises():
    with pytest.raises(NonHermitian):
        validate_coefficients(_spec_with_principal([[1.0, 1.0], [0.0, 1.0]]))


def test_validate_not_elliptic_raises():
    with pytest.raises(NotElliptic):
        validate_coefficients(_spec_with_principal([[0.0]]))


def test_validate_flags_negative_a00():
    spec = _spec_with_principal(np.eye(1))
    spec.zero_order_a00 = fields.constant_scalar(-1.0)
    report = validate_coefficients(spec)
    assert not report.a00_nonnegative
    assert not report.passed


def test_split_already_nonnegative():
    a00, da0, b00, db0 = split_zero_order(
        fields.constant_scalar(1.0), fields.constant_scalar(1.0), fields.constant_scalar(1.0)
    )
    x = np.array([0.3])
    assert a00(x) == pytest.approx(1.0)
    assert da0(x) == pytest.approx(0.0)
    assert b00(x) == pytest.approx(1.0)
    assert db0(x) == pytest.approx(0.0)


def test_split_negative_real_part():
    a00, da0, _, _ = split_zero_order(
        fields.constant_scalar(-2.0 + 1.0j),
        fields.constant_scalar(1.0),
        fields.constant_scalar(1.0),
    )
    x = np.array([0.5])
    assert a00(x) == pytest.approx(0.0)
    assert da0(x) == pytest.approx(-2.0 + 1.0j)


def test_split_mixed():
    a00, da0, _, _ = split_zero_order(
        fields.constant_scalar(3.0 - 1.0j),
        fields.constant_scalar(1.0),
        fields.constant_scalar(1.0),
    )
    x = np.array([0.5])
    assert a00(x) == pytest.approx(3.0)
    assert da0(x) == pytest.approx(-1.0j)
    assert a00(x) + da0(x) == pytest.approx(3.0 - 1.0j)


def test_split_b1_zero_raises():
    _, _, b00, _ = split_zero_order(
        fields.constant_scalar(1.0), fields.constant_scalar(1.0), fields.constant_scalar(0.0)
    )
    with pytest.raises(DivisionByZeroB1):
        b00(np.array([0.0]))


@settings(max_examples=50, deadline=None)
@given(
    st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
    st.floats(min_value=0.1, max_value=10.0),
)
def test_split_recombines(a0_val, b0_val, b1_val):
    a00, da0, b00, db0 = split_zero_order(
        fields.constant_scalar(a0_val),
        fields.constant_scalar(b0_val),
        fields.constant_scalar(b1_val),
    )
    x = np.array([0.25])
    assert complex((a00(x) + da0(x))[0]) == a0_val
    assert complex((b00(x) + db0(x))[0]) == b0_val
    assert float(a00(x)[0]) >= 0.0
    assert float(b00(x)[0]) / b1_val >= 0.0


def test_factorize_identity():
    fz = factorize_principal(_spec_with_principal(np.eye(2)), np.zeros((1, 2)))
    D = fz.factor(np.array([0.0]), np.array([0.0]))[0]
    assert np.allclose(D, np.eye(2))
    assert fz.residual_bound <= FACTORIZATION_TOL


def test_factorize_disk_matrix():
    # The disk matrix A satisfies A^2 = 2A, so its PSD square root is A/sqrt(2).
    assert np.allclose(DISK_MATRIX @ DISK_MATRIX, 2.0 * DISK_MATRIX)
    spec = _spec_with_principal(DISK_MATRIX)
    fz = factorize_principal(spec, sample_interior_points(spec.domain, 4))
    D = fz.factor(np.array([0.1]), np.array([0.2]))[0]
    assert np.allclose(D, DISK_MATRIX / np.sqrt(2.0), atol=1e-12)
    assert np.allclose(D.conj().T @ D, DISK_MATRIX, atol=FACTORIZATION_TOL)
    assert fz.residual_bound <= FACTORIZATION_TOL


def test_factorize_diagonal_psd():
    spec = _spec_with_principal(np.diag([4.0, 0.0]))
    fz = factorize_principal(spec, np.zeros((1, 2)))
    D = fz.factor(np.array([0.0]), np.array([0.0]))[0]
    assert np.allclose(D, np.diag([2.0, 0.0]))


def test_factorize_indefinite_raises():
    with pytest.raises(NotPositiveSemidefinite):
        hermitian_sqrt_psd(np.array([[1.0, 2.0j], [-2.0j, 1.0]]))


def test_sqrt_clips_tiny_negative_eigenvalues():
    mat = np.diag([1.0, -PSD_TOL / 2.0]).astype(complex)
    D = hermitian_sqrt_psd(mat)
    assert np.allclose(D, np.diag([1.0, 0.0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_quadratic_form_matches_factorization(seed):
    # For random Hermitian PSD matrices and random complex gradients the
    # sesquilinear form through A equals the one through D* D.
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    A = B.conj().T @ B
    D = hermitian_sqrt_psd(A)
    gu = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    gv = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    lhs = np.vdot(gv, A @ gu)
    rhs = np.vdot(D @ gv, D @ gu)
    tol = FACTORIZATION_TOL * max(1.0, np.linalg.norm(gu) * np.linalg.norm(gv)) * np.linalg.norm(A)
    assert abs(lhs - rhs) <= tol


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_hermitian_form_real_and_nonnegative(seed):
    rng = np.random.default_rng(seed)
    pts = sample_interior_points(UnitDiskPolygon(16), 5)
    A = fields.constant_matrix(DISK_MATRIX)(pts[:, 0], pts[:, 1])
    w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    vals = np.einsum("i,pij,j->p", w.conj(), A, w)
    assert np.max(np.abs(vals.imag)) <= 1e-12 * max(1.0, np.max(np.abs(vals)))
    assert np.min(vals.real) >= -PSD_TOL

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from conftest import L1, L2, L3, taylor_exp
from ckfields.catalog import build_algebra
from ckfields.errors import ClosureViolationError, ElementLeftAlgebraError, InvalidInputError, RankAmbiguityError
from ckfields.lie_core import (
    AlgebraElement,
    MatrixLieAlgebra,
    ad_matrix,
    adjoint_action,
    bracket,
    killing_form,
    mat_exp,
    numeric_kernel,
    realify,
    refined_inverse,
    spectrum_ad,
    spectrum_matrix,
)


# --- mat_exp ---------------------------------------------------------------


def test_exp_zero_is_identity():
    assert np.array_equal(mat_exp(np.zeros((3, 3))), np.eye(3))


def test_exp_rotation_against_taylor_oracle():
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    E = mat_exp(A)
    assert np.allclose(E, taylor_exp(A), atol=1e-15, rtol=0)
    assert E[0, 0] == pytest.approx(0.540302, abs=1e-6)
    assert np.allclose(E, [[np.cos(1), np.sin(1)], [-np.sin(1), np.cos(1)]], atol=1e-15)


def test_exp_diagonal():
    E = mat_exp(np.diag([1.0, -1.0]))
    assert np.allclose(E, np.diag([np.e, 1 / np.e]), rtol=1e-15, atol=0)


def test_exp_stack_and_longdouble():
    A = np.stack([L1, 2 * L2, -3 * L3])
    E = mat_exp(A)
    assert E.shape == (3, 3, 3)
    for a, e in zip(A, E):
        assert np.allclose(e, expm(a), atol=1e-13)
    El = mat_exp(L3.astype(np.longdouble))
    assert El.dtype == np.longdouble


def test_exp_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        mat_exp(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(InvalidInputError):
        mat_exp(np.zeros((2, 3)))


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-1, 1)), st.floats(0.0, 10.0))
def test_exp_matches_high_precision_oracle(A, norm):
    if np.linalg.norm(A, 2) > 0:
        A = A * norm / np.linalg.norm(A, 2)
    # scipy's expm is itself only good to ~1e-10 relative at this norm, so use 40 digits
    with mpmath.workdps(40):
        ref = np.array(mpmath.expm(mpmath.matrix(A.tolist())).tolist(), dtype=float)
    assert np.linalg.norm(mat_exp(A) - ref) <= 1e-12 * max(np.linalg.norm(ref), 1.0)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-1, 1)), st.floats(0.0, 5.0))
def test_exp_inverse_property(A, norm):
    if np.linalg.norm(A, 2) > 0:
        A = A * norm / np.linalg.norm(A, 2)
    assert np.allclose(mat_exp(A) @ mat_exp(-A), np.eye(4), atol=1e-10)


def test_refined_inverse_beats_double():
    M = mat_exp(np.array([[0.0, 3.0], [3.0, 0.0]]))
    Mi = refined_inverse(M)
    resid = np.abs(M.astype(np.longdouble) @ Mi - np.eye(2, dtype=np.longdouble)).max()
    assert resid < 1e-17


# --- kernels ------------------------------------------------------------------


def test_kernel_and_gap():
    kr = numeric_kernel(np.diag([1.0, 2.0, 0.0]))
    assert kr.rank == 2 and kr.nullity == 1
    assert np.allclose(np.abs(kr.basis[:, 0]), [0, 0, 1])
    with pytest.raises(RankAmbiguityError):
        numeric_kernel(np.diag([1.0, 1e-2]), atol=0.05)


# --- algebras -----------------------------------------------------------------


def test_so3_bracket(so3):
    X1, X2, X3 = (so3.basis_element(i) for i in range(3))
    assert np.allclose(L1 @ L2 - L2 @ L1, L3)
    assert bracket(X1, X2).allclose(X3)
    assert bracket(X2, X3).allclose(X1)
    assert bracket(X1, X1).norm() == 0


def test_abelian_bracket_and_ad_vanish():
    ab = MatrixLieAlgebra("abelian", np.array([np.diag([1.0, -1.0])]), form_gram=np.eye(1))
    X = ab.basis_element(0)
    assert bracket(X, X * 3.0).norm() == 0
    assert np.array_equal(ad_matrix(X), np.zeros((1, 1)))


def test_ad_spectrum_so3(so3):
    X3 = so3.basis_element(2)
    assert np.array_equal(ad_matrix(so3.zero()), np.zeros((3, 3)))
    ev = np.sort_complex(np.linalg.eigvals(ad_matrix(X3)))
    assert np.allclose(ev, [-1j, 0, 1j], atol=1e-12)
    rep = spectrum_ad(X3)
    assert rep.semisimple and rep.pure_imaginary()


def test_killing_so3(so3):
    X3 = so3.basis_element(2)
    ad3 = ad_matrix(X3)
    assert killing_form(X3, X3) == pytest.approx(np.trace(ad3 @ ad3))
    assert killing_form(X3, X3) == pytest.approx(-2.0)
    assert killing_form(X3, X3) == pytest.approx((3 - 2) * np.trace(L3 @ L3))


def test_killing_su2():
    g = build_algebra("su", (2, 0))
    X = g.from_matrix(realify(1j * np.diag([1.0, -1.0])))
    ad = ad_matrix(X)
    assert killing_form(X, X) == pytest.approx(np.trace(ad @ ad))
    assert killing_form(X, X) == pytest.approx(2 * 2 * np.trace(np.diag([1j, -1j]) @ np.diag([1j, -1j])).real)
    assert killing_form(X, X) == pytest.approx(-8.0)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_killing_so_trace_formula(n, rng):
    g = build_algebra("so", (n,))
    x = rng.normal(size=g.dim)
    X = g.matrix_of(x)
    assert g.form(x, x) == pytest.approx((n - 2) * np.trace(X @ X), rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_killing_sl_trace_formula(n, rng):
    g = build_algebra("sl_R", (n,))
    x = rng.normal(size=g.dim)
    X = g.matrix_of(x)
    assert g.form(x, x) == pytest.approx(2 * n * np.trace(X @ X), rel=1e-12)


def test_adjoint_action_rotation(so3):
    X1 = so3.basis_element(0)
    for t in (0.3, 1.1, -2.0):
        Y = adjoint_action(mat_exp(t * L3), X1)
        assert np.allclose(Y.coords, [np.cos(t), np.sin(t), 0.0], atol=1e-14)
    assert adjoint_action(np.eye(3), X1).allclose(X1)


def test_adjoint_action_composition(so3, rng):
    X = so3.element(rng.normal(size=3))
    g1, g2 = (mat_exp(so3.matrix_of(rng.normal(size=3))) for _ in range(2))
    lhs = adjoint_action(g1 @ g2, X)
    rhs = adjoint_action(g1, adjoint_action(g2, X))
    assert lhs.allclose(rhs, atol=1e-12)


def test_adjoint_action_leaving_algebra(so3):
    with pytest.raises(ElementLeftAlgebraError):
        adjoint_action(np.diag([1.0, 2.0, 1.0]), so3.basis_element(0))


def test_closure_violation():
    E12 = np.zeros((2, 2))
    E12[0, 1] = 1.0
    with pytest.raises(ClosureViolationError):
        MatrixLieAlgebra("not closed", np.array([E12, E12.T]), form_gram=np.eye(2))


def test_element_checks(so3):
    other = build_algebra("so", (4,))
    with pytest.raises(InvalidInputError):
        bracket(so3.basis_element(0), other.basis_element(0))
    with pytest.raises(InvalidInputError):
        AlgebraElement(np.zeros(2), so3)


@pytest.mark.parametrize("family,params", [
    ("so", (3,)), ("so", (2, 2)), ("su", (2, 1)), ("sl_R", (3,)),
    ("sp_R", (2,)), ("sl_C", (2,)), ("g2_compact", ()), ("g2_split", ()),
])
def test_structural_residuals(family, params):
    g = build_algebra(family, params)
    assert g.jacobi_residual() < 1e-9
    assert g.antisymmetry_residual() < 1e-9
    assert g.invariance_residual() < 1e-9
    kg = g.killing_from_matrices()
    assert np.abs(kg - g.killing_gram).max() <= 1e-9 * np.abs(g.killing_gram).max()


def test_realify_is_homomorphism(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.allclose(realify(A @ B), realify(A) @ realify(B))
    assert np.allclose(realify(A.conj().T), realify(A).T)


def test_spectrum_examples():
    assert not spectrum_matrix(np.array([[0.0, 1.0], [0.0, 0.0]])).semisimple
    rep = spectrum_matrix(np.diag([1.0, -1.0]))
    assert rep.semisimple and not rep.pure_imaginary()


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (3,), elements=st.floats(-3, 3)), arrays(np.float64, (3,), elements=st.floats(-3, 3)),
       arrays(np.float64, (3,), elements=st.floats(-3, 3)))
def test_bracket_properties(x, y, z):
    g = build_algebra("sl_R", (2,))
    X, Y, Z = g.element(x), g.element(y), g.element(z)
    assert (bracket(X, Y) + bracket(Y, X)).norm() < 1e-12
    jac = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))
    assert jac.norm() < 1e-10
    # invariance b([Z,X],Y) + b(X,[Z,Y]) = 0
    lhs = killing_form(bracket(Z, X), Y) + killing_form(X, bracket(Z, Y))
    assert abs(lhs) < 1e-10 * max(1.0, np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z))

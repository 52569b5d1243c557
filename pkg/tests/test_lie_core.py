import numpy as np
import pytest

from algebra.lie_core import (BilinearForm, LieAlgebra, Subspace, matrix_algebra_from_generators,
                              reduce_to_basis, span_rank)
from utils.exceptions import ConstructionError, UsageError


def so3_generators():
    L = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        L[i, j, k], L[i, k, j] = -1.0, 1.0
    return L


@pytest.fixture
def so3():
    return matrix_algebra_from_generators(so3_generators(), labels=["L1", "L2", "L3"], name="so(3)")


def test_so3_structure_constants(so3):
    c = so3.structure_constants()
    assert so3.dim == 3
    assert c[0, 1, 2] == pytest.approx(1.0)
    assert c[1, 0, 2] == pytest.approx(-1.0)
    assert np.allclose(so3.bracket([1, 0, 0], [0, 1, 0]), [0, 0, 1])


def test_so3_killing_form(so3):
    killing = so3.killing_form()
    assert np.allclose(killing.matrix, -2.0 * np.eye(3))
    assert killing.is_negative_definite()
    assert so3.ad_invariance_residual(killing) < 1e-12


def test_jacobi_report(so3):
    report = so3.check_jacobi()
    assert report.passed
    assert report.mode == "exhaustive"
    assert report.rows_checked == 3
    assert report.to_dict()["pass"] is True


def test_broken_jacobi_is_reported():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    c[1, 2, 1], c[2, 1, 1] = 1.0, -1.0
    report = LieAlgebra.from_dense(c).check_jacobi()
    assert not report.passed
    assert report.worst_triple is not None


def test_not_closed_generators_raise():
    E12, E21 = np.zeros((2, 2)), np.zeros((2, 2))
    E12[0, 1], E21[1, 0] = 1.0, 1.0
    with pytest.raises(ConstructionError) as excinfo:
        matrix_algebra_from_generators(np.array([E12, E21]))
    assert excinfo.value.identity == "closure"
    assert excinfo.value.where == (0, 1)


def test_dependent_generators_raise():
    L = so3_generators()
    with pytest.raises(ConstructionError) as excinfo:
        matrix_algebra_from_generators(np.array([L[0], L[1], L[0] + L[1]]))
    assert excinfo.value.identity == "independence"


def test_shape_errors(so3):
    with pytest.raises(UsageError):
        LieAlgebra.from_dense(np.zeros((2, 3, 3)))
    with pytest.raises(UsageError):
        so3.bracket([1, 0], [0, 1])
    with pytest.raises(UsageError):
        LieAlgebra([], [], [], [], 0)


def test_bracket_many_matches_bracket(so3, rng):
    X, Y = rng.standard_normal((4, 3)), rng.standard_normal((5, 3))
    many = so3.bracket_many(X, Y)
    assert many.shape == (4, 5, 3)
    assert np.allclose(many[2, 3], so3.bracket(X[2], Y[3]))


def test_change_basis_keeps_jacobi(so3, rng):
    P = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    changed = so3.change_basis(P)
    assert changed.check_jacobi().passed
    # new coordinates u correspond to old coordinates u @ P
    assert np.allclose(changed.bracket([1, 0, 0], [0, 1, 0]) @ P, so3.bracket(P[0], P[1]))


def test_matrix_coordinates_roundtrip(so3):
    x = np.array([0.5, -1.0, 2.0])
    assert np.allclose(so3.coordinates(so3.to_matrix(x)), x)


def test_abelian_algebra_has_zero_killing_form():
    algebra = LieAlgebra([], [], [], [], 4, name="R^4")
    assert np.allclose(algebra.killing_form().matrix, 0.0)
    assert algebra.check_jacobi().passed


def test_jacobi_is_exhaustive_by_default_on_large_algebras():
    report = LieAlgebra([], [], [], [], 130, name="R^130").check_jacobi()
    assert report.mode == "exhaustive"
    assert report.rows_checked == 130


def test_sampled_jacobi_on_request(so3):
    report = so3.check_jacobi(exhaustive=False)
    assert report.mode == "sampled"
    assert report.rows_checked == 3


def test_subspace_rejects_dependent_vectors(so3):
    with pytest.raises(ConstructionError):
        Subspace(so3, np.array([[1.0, 0, 0], [2.0, 0, 0]]))
    sub = Subspace(so3, np.array([[1.0, 0, 0], [0, 1.0, 0]]))
    assert sub.dim == 2
    assert sub.distance(np.array([0, 0, 3.0]))[0] == pytest.approx(3.0)


def test_reduce_to_basis_euclidean():
    basis = reduce_to_basis(np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]]))
    assert basis.shape == (2, 2)
    assert np.allclose(basis @ basis.T, np.eye(2))


def test_reduce_to_basis_with_metric():
    metric = np.diag([4.0, 1.0, 9.0])
    basis = reduce_to_basis(np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]]), metric=metric)
    assert np.allclose(basis @ metric @ basis.T, np.eye(2))


def test_span_rank():
    assert span_rank(np.array([[1.0, 2.0], [2.0, 4.0]])) == 1
    assert span_rank(np.zeros((0, 3))) == 0


def test_bilinear_form_restrict():
    form = BilinearForm(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(form.restrict(np.eye(3)[1:]).matrix, np.diag([2.0, 3.0]))
    assert form([1, 1, 0], [0, 1, 1]) == pytest.approx(2.0)

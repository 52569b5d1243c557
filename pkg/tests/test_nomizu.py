import numpy as np
import pytest

from geometry.nomizu import (covariant_derivative, curvature, is_metric, is_skew, levi_civita, make_alpha,
                             metric_residual, nabla_T, ricci, s_tensor, scalar, skew_residual, sym_skew_ricci,
                             torsion)
from geometry.torsions import canonical_spec, connection_from_spec, random_spec
from utils.exceptions import ConstructionError, UsageError


def test_levi_civita_is_metric_and_torsion_free(any_frame):
    alpha = levi_civita(any_frame)
    assert is_metric(alpha)
    assert torsion(alpha).norm() < 1e-9


def test_kashiwada_einstein_constant(any_frame):
    ric = ricci(levi_civita(any_frame)).array
    n = any_frame.n
    assert np.abs(ric - 2 * (2 * n + 1) * any_frame.metric).max() < 1e-8


def test_levi_civita_scalar_curvature(sp1_frame, sp2_frame):
    assert scalar(levi_civita(sp1_frame)) == pytest.approx(42.0)
    assert scalar(levi_civita(sp2_frame)) == pytest.approx(11 * 10.0)


def test_ricci_is_trace_of_curvature(sp1_frame, rng):
    alpha = connection_from_spec(sp1_frame, random_spec(rng))
    R = curvature(alpha).array
    assert np.allclose(np.einsum("zxyz->xy", R), ricci(alpha).array)


def test_curvature_is_antisymmetric(sp1_frame):
    R = curvature(levi_civita(sp1_frame))
    assert R.antisymmetry_residual(0, 1) < 1e-12


def test_make_alpha_rejects_bad_input(sp1_pair, rng):
    with pytest.raises(UsageError):
        make_alpha(sp1_pair, np.zeros((7, 7)))
    with pytest.raises(ConstructionError) as excinfo:
        make_alpha(sp1_pair, rng.standard_normal((7, 7, 7)))
    assert excinfo.value.identity == "equivariance"


def test_metric_is_parallel(sp2_frame):
    derivative = covariant_derivative(levi_civita(sp2_frame), sp2_frame.metric, contravariant=0)
    assert derivative.norm() < 1e-12
    assert derivative.rank == (0, 3)


def test_covariant_derivative_rejects_bad_rank(sp1_frame):
    with pytest.raises(UsageError):
        covariant_derivative(levi_civita(sp1_frame), np.ones(7), contravariant=2)


def test_skew_torsion_connection(sp1_frame, rng):
    alpha = connection_from_spec(sp1_frame, random_spec(rng))
    assert is_skew(alpha)
    assert metric_residual(alpha) < 1e-9
    assert skew_residual(alpha) < 1e-9


def test_non_metric_connection(sp1_frame):
    values = sp1_frame.alpha_g.copy()
    # alpha(xi_1, xi_1) = xi_1 commutes with the isotropy but breaks nabla g = 0
    values[0, 0, 0] += 1.0
    alpha = make_alpha(sp1_frame.pair, values)
    assert metric_residual(alpha) == pytest.approx(2.0)
    assert not is_metric(alpha)
    assert not is_skew(alpha)


def test_ricci_split_identities(su3_frame, rng):
    alpha = connection_from_spec(su3_frame, random_spec(rng, with_c=True))
    split = sym_skew_ricci(alpha, levi_civita(su3_frame))
    assert split.sym_residual < 1e-8
    assert split.skew_residual < 1e-8
    S = s_tensor(torsion(alpha), su3_frame.metric).array
    assert np.allclose(S, S.T)


def test_canonical_torsion_is_parallel(sp1_frame):
    alpha = connection_from_spec(sp1_frame, canonical_spec())
    assert nabla_T(alpha, levi_civita(sp1_frame)).norm() < 1e-8


def test_random_torsion_is_not_parallel(sp1_frame, rng):
    alpha = connection_from_spec(sp1_frame, random_spec(rng))
    assert nabla_T(alpha, levi_civita(sp1_frame)).norm() > 1e-2

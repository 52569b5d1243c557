import numpy as np
import pytest

from geometry.sasaki_geometry import (check_sasaki_identity, d_eta, eta_wedge_eta, fundamental_two_forms,
                                      phi_operators, sasaki_identity_residuals)
from utils.exceptions import UsageError


def test_frame_residuals(any_frame):
    assert max(any_frame.residuals.values()) < 1e-9
    assert any_frame.dim == 4 * any_frame.n + 3


def test_sasaki_identity_per_structure(any_frame):
    report = check_sasaki_identity(any_frame)
    assert report.passed
    assert set(report.per_structure) == {1, 2, 3}


def test_sasaki_identity_detects_wrong_connection(sp1_frame):
    zero = np.zeros_like(sp1_frame.alpha_g)
    residual = sasaki_identity_residuals(zero, sp1_frame.phi[0], sp1_frame.xi[0], sp1_frame.eta[0],
                                         sp1_frame.metric)
    assert np.abs(residual).max() > 0.5


def test_reeb_fields_form_sp1(sp1_frame):
    bracket = sp1_frame.pair.m_bracket
    # [xi_1, xi_2] = 2 xi_3
    assert np.allclose(bracket[0, 1, :3], [0, 0, 2])
    assert np.allclose(bracket[1, 2, :3], [2, 0, 0])


def test_quaternionic_relations(sp2_frame):
    phi, xi, eta = sp2_frame.phi, sp2_frame.xi, sp2_frame.eta
    eye = np.eye(sp2_frame.dim)
    assert np.allclose(phi[0] @ phi[0], -eye + np.outer(xi[0], eta[0]))
    assert np.allclose(phi[0] @ phi[1], phi[2] + np.outer(xi[0], eta[1]))
    assert np.allclose(phi[0] @ xi[0], 0.0)


def test_fundamental_form_sign(any_frame):
    forms = fundamental_two_forms(any_frame)
    assert forms[1][1, 2] == pytest.approx(-1.0)
    assert forms[2][2, 0] == pytest.approx(-1.0)


def test_d_eta_is_twice_fundamental_form(any_frame):
    forms = fundamental_two_forms(any_frame)
    d = d_eta(any_frame)
    for r in range(3):
        assert np.allclose(d[r], 2.0 * forms[r + 1])


def test_phi0_only_on_su(sp1_frame, su3_frame):
    with pytest.raises(UsageError):
        fundamental_two_forms(sp1_frame, include_phi0=True)
    forms = fundamental_two_forms(su3_frame, include_phi0=True)
    assert np.allclose(forms[0], -forms[0].T)
    assert np.allclose(forms[0][:3], 0.0)
    assert set(phi_operators(su3_frame)) == {0, 1, 2, 3}
    assert set(phi_operators(sp1_frame)) == {1, 2, 3}


def test_phi0_is_a_horizontal_complex_structure(su3_frame):
    h = su3_frame.horizontal
    phi0 = su3_frame.phi0[h, h]
    assert np.allclose(phi0 @ phi0, -np.eye(phi0.shape[0]))


def test_eta_wedge_eta(sp1_frame):
    form = eta_wedge_eta(sp1_frame, 1, 2)
    assert form[0, 1] == pytest.approx(1.0)
    assert form[1, 0] == pytest.approx(-1.0)
    assert np.count_nonzero(form) == 2


def test_reeb_and_structure_combinations(sp1_frame):
    v = np.array([0.0, 0.6, 0.8])
    assert np.allclose(sp1_frame.reeb(v), 0.6 * sp1_frame.xi[1] + 0.8 * sp1_frame.xi[2])
    phi_v = sp1_frame.structure(v)
    h = sp1_frame.horizontal
    assert np.allclose(phi_v[h, h] @ phi_v[h, h], -np.eye(4))

import numpy as np
import pytest

from checks.base_check import BaseCheck, CheckContext
from checks.einstein_check import EinsteinCheck
from checks.metric_check import MetricCheck
from checks.parallel_torsion_check import ParallelTorsionCheck
from checks.phi_compatible_check import PhiCompatibleCheck
from checks.ricci_symmetry_check import RicciSymmetryCheck
from checks.s_einstein_check import SEinsteinCheck, predicted_coefficients, s_einstein_criterion
from controls.classification_controller import FLAGS, ClassificationController
from geometry.torsions import (PRESETS, ConnectionSpec, canonical_spec, distinguished_spec, haar_rotation,
                               levi_civita_spec, parallel7_spec, random_spec, so3_action)
from memory.session_memory import session_memory


@pytest.fixture(scope="module")
def controller():
    return ClassificationController()


def test_levi_civita_verdict(sp1_frame, controller):
    verdict = controller.classify(sp1_frame, levi_civita_spec())
    flags = verdict.flags
    assert set(flags) == set(FLAGS)
    for name in ["metric", "skew", "einstein", "s_einstein", "ricci_symmetric", "parallel_torsion"]:
        assert flags[name], name
    assert not flags["phi_compatible"]
    assert not flags["parallelizes_reeb"]
    assert verdict.scalar == pytest.approx(42.0)
    assert verdict.ok


def test_distinguished_verdict_in_dimension_seven(sp1_frame, controller):
    verdict = controller.classify(sp1_frame, distinguished_spec())
    assert verdict.flags["parallelizes_reeb"]
    assert verdict.flags["phi_compatible"]
    assert verdict.flags["einstein"]
    assert verdict.scalar == pytest.approx(0.0, abs=1e-8)
    assert verdict.summary()["gamma"] == pytest.approx(-2.0)


def test_distinguished_is_not_einstein_on_sp2(sp2_frame, controller):
    verdict = controller.classify(sp2_frame, distinguished_spec())
    assert verdict.flags["parallelizes_reeb"]
    assert not verdict.flags["einstein"]
    assert verdict.checks["einstein"].details["criterion_agrees"]


def test_canonical_on_sp2(sp2_frame, controller):
    verdict = controller.classify(sp2_frame, canonical_spec())
    assert verdict.flags["phi_compatible"]
    assert verdict.flags["s_einstein"]
    assert verdict.flags["ricci_symmetric"]
    assert not verdict.flags["parallelizes_reeb"]
    phi = verdict.checks["phi_compatible"].details
    assert phi["gamma"] == pytest.approx(phi["predicted_gamma"]) == pytest.approx(-6.0)
    fit = verdict.summary()["s_einstein_fit"]
    assert fit["alpha"] == pytest.approx(4.0)
    assert fit["beta"] == pytest.approx(-4.0)


def test_parallel7_is_not_parallel_on_sp2(sp2_frame):
    result = ParallelTorsionCheck().evaluate(CheckContext(sp2_frame, parallel7_spec()))
    assert not result.passed
    assert result.residual > 1e-2


def test_parallel7_is_parallel_on_sp1(sp1_frame):
    assert ParallelTorsionCheck().evaluate(CheckContext(sp1_frame, parallel7_spec())).passed


@pytest.mark.parametrize("frame_name", ["sp1_frame", "su3_frame"])
def test_flags_are_invariant_under_reeb_rotations(request, frame_name, controller):
    frame = request.getfixturevalue(frame_name)
    rng = np.random.default_rng(5)
    specs = [preset() for preset in PRESETS.values()]
    specs += [random_spec(rng, with_c=frame.phi0 is not None) for _ in range(2)]
    for spec in specs:
        flags = controller.classify(frame, spec).flags
        for _ in range(2):
            rotated = so3_action(spec, haar_rotation(rng))
            assert controller.classify(frame, rotated).flags == flags, spec.label


def test_asymmetric_B_breaks_ricci_symmetry(sp1_frame):
    B = np.zeros((3, 3))
    B[0, 1] = 1.0
    result = RicciSymmetryCheck().evaluate(CheckContext(sp1_frame, ConnectionSpec(0.0, B)))
    assert not result.passed
    assert result.details["closed_form_residual"] < 1e-8
    assert result.details["criterion_residual"] == pytest.approx(1.0)


def test_s_einstein_prediction(sp2_frame):
    spec = ConnectionSpec(1.0, 3.0 * np.eye(3))
    assert s_einstein_criterion(spec) == pytest.approx(0.0)
    result = SEinsteinCheck().evaluate(CheckContext(sp2_frame, spec))
    alpha, beta = predicted_coefficients(2, spec)
    assert result.passed
    assert result.details["criterion_agrees"]
    assert result.details["alpha"] == pytest.approx(alpha)
    assert result.details["beta"] == pytest.approx(beta)


def test_einstein_check_reports_seven_dimensional_prediction(sp1_frame):
    result = EinsteinCheck().evaluate(CheckContext(sp1_frame, canonical_spec()))
    assert result.details["predicted_7d_scalar"] == pytest.approx(0.0)
    assert result.details["criterion_agrees"]


def test_phi_compatible_needs_B_equal_2I(sp1_frame):
    result = PhiCompatibleCheck().evaluate(CheckContext(sp1_frame, ConnectionSpec(4.0, np.eye(3))))
    assert not result.passed
    assert "gamma" not in result.details


def test_tolerance_override(sp1_frame, rng):
    spec = ConnectionSpec(0.0, 1e-6 * rng.standard_normal((3, 3)))
    context = CheckContext(sp1_frame, spec)
    assert not RicciSymmetryCheck().evaluate(context).passed
    assert RicciSymmetryCheck(tol=1e-3).evaluate(context).passed


class ExplodingCheck(BaseCheck):
    def __init__(self):
        super().__init__("exploding")

    def evaluate(self, context):
        raise RuntimeError("boom")


def test_failing_check_is_recorded(sp1_frame):
    verdict = ClassificationController(checks=[MetricCheck(), ExplodingCheck()]).classify(
        sp1_frame, levi_civita_spec())
    assert verdict.flags == {"metric": True, "exploding": False}
    assert verdict.errors == {"exploding": "boom"}
    assert not verdict.ok
    assert verdict.witnesses["exploding"] == float("inf")


def test_verdicts_are_remembered(sp1_frame, controller):
    controller.classify(sp1_frame, canonical_spec())
    assert len(session_memory["verdicts"]) == 1
    assert len(session_memory["residuals"]) == len(FLAGS)
    assert session_memory["verdicts"][0]["space"] == "sp:1"


def test_classify_many(sp1_frame, controller):
    specs = [levi_civita_spec(), canonical_spec(), distinguished_spec()]
    verdicts = controller.classify_many(sp1_frame, specs)
    assert [v.spec.label for v in verdicts] == ["levi-civita", "canonical", "distinguished"]
    assert [v.flags["parallelizes_reeb"] for v in verdicts] == [False, False, True]


def test_repr():
    assert repr(MetricCheck()) == "MetricCheck(name='metric')"
    assert MetricCheck().get_name() == "metric"

import numpy as np
import pytest

from controls.sweep_controller import IDENTITIES, closed_form_residuals, run_sweep, spec_for
from geometry.torsions import distinguished_spec
from memory.session_memory import clear_session, remember_residual, session_memory, worst_residuals


def test_empty_sweep(sp1_frame):
    report = run_sweep(sp1_frame, count=0)
    assert report.count == 0
    assert report.maxima == {}
    assert report.passed


def test_sweep_passes_and_batches(sp1_frame):
    report = run_sweep(sp1_frame, count=7, seed=3, batch_size=3)
    assert report.passed
    assert set(report.maxima) == set(IDENTITIES)
    assert len(report.history) == 3
    assert report.history[-1]["stop"] == 7
    assert report.to_dict()["batches"] == 3


def test_sweep_is_deterministic(su3_frame):
    first = run_sweep(su3_frame, count=4, seed=11)
    second = run_sweep(su3_frame, count=4, seed=11, batch_size=1)
    assert first.maxima == pytest.approx(second.maxima)


def test_spec_for_depends_on_seed_and_index(su3_frame, sp1_frame):
    assert np.allclose(spec_for(su3_frame, 5, 2).as_vector(), spec_for(su3_frame, 5, 2).as_vector())
    assert not np.allclose(spec_for(su3_frame, 5, 2).as_vector(), spec_for(su3_frame, 5, 3).as_vector())
    assert np.any(spec_for(su3_frame, 5, 2).c)
    assert not np.any(spec_for(sp1_frame, 5, 2).c)


def test_closed_form_residuals_on_a_preset(sp2_frame):
    residuals = closed_form_residuals(sp2_frame, distinguished_spec())
    assert max(residuals.values()) < 1e-8


def test_sweep_results_reach_session_memory(sp1_frame):
    run_sweep(sp1_frame, count=2)
    checks = {entry["check"] for entry in session_memory["residuals"]}
    assert checks == {f"sweep.{name}" for name in IDENTITIES}


def test_worst_residuals():
    remember_residual("metric", "sp:1", 1e-12, True)
    remember_residual("metric", "sp:1", 3e-12, True)
    remember_residual("metric", "sp:2", 2e-12, True)
    worst = worst_residuals()
    assert worst[("metric", "sp:1")]["residual"] == 3e-12
    assert len(worst) == 2
    clear_session()
    assert session_memory["residuals"] == []

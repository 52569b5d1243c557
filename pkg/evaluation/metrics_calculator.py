# evaluation/metrics_calculator.py
"""Acceptance metrics, one function per criterion.

Every function returns rows ``{"criterion", "space", "metric", "value", "target", "pass"}``
so that the runner can stack them into a single table.
"""
import logging
from typing import Dict, List

import numpy as np

from checks.base_check import CheckContext
from checks.einstein_check import EinsteinCheck
from checks.parallel_torsion_check import ParallelTorsionCheck
from checks.ricci_symmetry_check import RicciSymmetryCheck
from controls.sweep_controller import run_sweep
from equivariant.hom_spaces import dim_hom_all
from equivariant.named_bases import match_named_generators
from geometry.nomizu import divergence, levi_civita, lower, ricci
from geometry.sasaki_geometry import SasakiFrame
from geometry.torsions import (ConnectionSpec, canonical_spec, characteristic_spec, closed_form_divergence,
                               distinguished_spec, haar_rotation, levi_civita_spec, parallel7_spec,
                               random_einstein_member, random_spec, reeb_parallel_solutions, torsion_basis)
from utils.config_loader import tolerance
from utils.exceptions import BudgetExceededError

logger = logging.getLogger(__name__)

EXPECTED_DIMS = {False: {"bilinear": 63, "lambda2": 30, "lambda3": 10},
                 True: {"bilinear": 99, "lambda2": 45, "lambda3": 13}}


def _row(criterion: str, space: str, metric: str, value, target: str, passed: bool) -> Dict:
    return {"criterion": criterion, "space": space, "metric": metric,
            "value": None if value is None else float(value), "target": target, "pass": bool(passed)}


def dimension_metrics(frame: SasakiFrame, force: bool = False) -> List[Dict]:
    """Hom-space dimensions and singular-value gaps; a budget refusal on e7/e8 counts as passing."""
    pair, rows = frame.pair, []
    expected = EXPECTED_DIMS[frame.phi0 is not None]
    try:
        results = dim_hom_all(pair, force=force)
    except BudgetExceededError as e:
        logger.warning(f"{pair.space_id}: {e}")
        return [_row("dimensions", pair.space_id, "refused", e.unknowns, "refusal on e7/e8", pair.large)]
    for kind, result in results.items():
        rows.append(_row("dimensions", pair.space_id, f"dim_{kind}", result.dimension, str(expected[kind]),
                         result.dimension == expected[kind]))
        gap = None if result.clean else result.gap
        rows.append(_row("dimensions", pair.space_id, f"gap_{kind}", gap, f">= {tolerance('min_gap'):g}",
                         gap is None or gap >= tolerance("min_gap")))
    return rows


def kashiwada_metrics(frame: SasakiFrame) -> List[Dict]:
    ric = ricci(levi_civita(frame)).array
    residual = float(np.abs(ric - 2 * (2 * frame.n + 1) * frame.metric).max())
    return [_row("kashiwada", frame.pair.space_id, "ric_g_residual", residual, f"<= {tolerance('chained'):g}",
                 residual <= tolerance("chained"))]


def sweep_metrics(frame: SasakiFrame, count: int = 100, seed: int = 7) -> List[Dict]:
    report = run_sweep(frame, count=count, seed=seed)
    return [_row("closed_forms", frame.pair.space_id, name, value, f"<= {report.tolerance:g}",
                 value <= report.tolerance) for name, value in report.maxima.items()]


def einstein_family_metrics(frame: SasakiFrame, samples: int = 50, seed: int = 0) -> List[Dict]:
    """Sampled members of the 7-dimensional Einstein family are Einstein with the predicted scalar."""
    rng = np.random.default_rng(seed)
    check = EinsteinCheck()
    worst_residual, worst_scalar = 0.0, 0.0
    for _ in range(samples):
        spec, predicted = random_einstein_member(rng, with_c=frame.phi0 is not None and rng.random() < 0.5)
        result = check.evaluate(CheckContext(frame, spec))
        worst_residual = max(worst_residual, result.residual)
        worst_scalar = max(worst_scalar, abs(result.details["scalar"] - predicted))
    space, tol = frame.pair.space_id, tolerance("chained")
    return [_row("einstein_7d", space, "sym_ricci_residual", worst_residual, f"<= {tol:g}", worst_residual <= tol),
            _row("einstein_7d", space, "scalar_residual", worst_scalar, f"<= {tol:g}", worst_scalar <= tol)]


def non_einstein_metrics(frame: SasakiFrame, samples: int = 100, seed: int = 0) -> List[Dict]:
    """Random unit-norm specs never give an Einstein connection when n >= 2."""
    rng = np.random.default_rng(seed)
    check = EinsteinCheck()
    smallest = np.inf
    for _ in range(samples):
        vector = random_spec(rng, with_c=frame.phi0 is not None).as_vector()
        spec = ConnectionSpec.from_vector(vector / np.linalg.norm(vector))
        smallest = min(smallest, check.evaluate(CheckContext(frame, spec)).residual)
    return [_row("einstein_7d", frame.pair.space_id, "min_einstein_residual", smallest, ">= 1e-3", smallest >= 1e-3)]


def divergence_metrics(frame: SasakiFrame) -> List[Dict]:
    alpha_g = levi_civita(frame)
    worst = 0.0
    for key, T in torsion_basis(frame).items():
        div = divergence(alpha_g, lower(T, frame.metric)).array
        worst = max(worst, float(np.abs(div - closed_form_divergence(frame, key)).max()))
    return [_row("divergence", frame.pair.space_id, "div_residual", worst, f"<= {tolerance('chained'):g}",
                 worst <= tolerance("chained"))]


def ricci_symmetry_metrics(frame: SasakiFrame, samples: int = 40, seed: int = 0) -> List[Dict]:
    """Skew(Ric) vanishes exactly when B is symmetric."""
    rng = np.random.default_rng(seed)
    check = RicciSymmetryCheck()
    mismatches = 0
    for index in range(samples):
        spec = random_spec(rng)
        symmetric = index % 2 == 0
        if symmetric:
            spec = ConnectionSpec(spec.a, 0.5 * (spec.B + spec.B.T), spec.c)
        if check.evaluate(CheckContext(frame, spec)).passed != symmetric:
            mismatches += 1
    return [_row("divergence", frame.pair.space_id, "ricci_symmetry_mismatches", mismatches, "0", mismatches == 0)]


def parallel_torsion_metrics(frame: SasakiFrame, seed: int = 0) -> List[Dict]:
    """The parallel families on sp:1, their 0.05 perturbations, and the dim-7-only case elsewhere."""
    rng = np.random.default_rng(seed)
    check = ParallelTorsionCheck()
    space, rows = frame.pair.space_id, []
    P = haar_rotation(rng)
    families = {"levi-civita": levi_civita_spec(), "canonical": canonical_spec(),
                "characteristic": characteristic_spec(P), "parallel7": parallel7_spec(P)}
    if frame.n != 1:
        norm = check.evaluate(CheckContext(frame, families["parallel7"])).residual
        return [_row("parallel_torsion", space, "parallel7_norm", norm, ">= 1e-2", norm >= 1e-2)]
    for name, spec in families.items():
        norm = check.evaluate(CheckContext(frame, spec)).residual
        rows.append(_row("parallel_torsion", space, f"{name}_norm", norm, f"<= {tolerance('chained'):g}",
                         norm <= tolerance("chained")))
        E = rng.standard_normal((3, 3))
        perturbed = ConnectionSpec(spec.a, spec.B + 0.05 * E / np.linalg.norm(E), spec.c)
        norm = check.evaluate(CheckContext(frame, perturbed)).residual
        rows.append(_row("parallel_torsion", space, f"{name}_perturbed_norm", norm, ">= 1e-2", norm >= 1e-2))
    return rows


def reeb_metrics(frame: SasakiFrame) -> List[Dict]:
    """nabla xi_i = 0 has the single solution (4, 2 I_3, 0); that connection is Einstein only in dimension 7."""
    space = frame.pair.space_id
    report = reeb_parallel_solutions(frame)
    target = distinguished_spec().as_vector()
    distance = None if report.solution is None else float(np.abs(report.solution.as_vector() - target).max())
    rows = [_row("reeb_parallel", space, "kernel_dimension", report.kernel_dimension, "1", report.unique),
            _row("reeb_parallel", space, "solution_distance", distance, f"<= {tolerance('chained'):g}",
                 distance is not None and distance <= tolerance("chained"))]
    einstein = EinsteinCheck().evaluate(CheckContext(frame, distinguished_spec())).passed
    rows.append(_row("reeb_parallel", space, "distinguished_einstein", float(einstein), str(frame.n == 1),
                     einstein == (frame.n == 1)))
    return rows


def named_basis_metrics(frame: SasakiFrame) -> List[Dict]:
    rows = []
    for kind, result in dim_hom_all(frame.pair, kinds=["bilinear", "lambda3"]).items():
        fit = match_named_generators(frame, result)
        rows.append(_row("named_bases", frame.pair.space_id, f"{kind}_fit_residual", fit.residual,
                         "spans, independent, <= 1e-8", fit.passed))
    return rows

# cli/commands.py
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from algebra.algebra_zoo import build_pair
from controls.classification_controller import ClassificationController
from controls.sweep_controller import run_sweep
from equivariant.hom_spaces import KINDS, check_budget, invariant_tensors
from geometry.nomizu import levi_civita, ricci
from geometry.sasaki_geometry import make_frame
from geometry.torsions import ConnectionSpec, validate_spec
from utils.basis_writer import write_bases
from utils.cache_manager import load_cached_results, save_cached_results
from utils.config_loader import settings, tolerance
from utils.exceptions import UsageError
from utils.space_id import parse_space_id, quaternionic_dimension

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"


def _plain(value):
    """JSON-safe copy: numpy scalars and arrays to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


@dataclass
class RunReport:
    space: str
    command: str
    inputs: Dict[str, Any]
    results: Dict[str, Any]
    residuals: Dict[str, float]
    passed: bool
    seed: Optional[int] = None
    timing: Optional[float] = None
    messages: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> dict:
        return _plain({
            "schema": SCHEMA_VERSION,
            "space": self.space,
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "results": self.results,
            "residuals": self.residuals,
            "pass": self.passed,
            "timing": self.timing,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def parse_floats(text: str, count: int, name: str) -> List[float]:
    """Comma-separated floats, no whitespace.

    Raises:
        UsageError: wrong count or malformed entry
    """
    parts = (text or "").split(",")
    if len(parts) != count:
        raise UsageError(f"--{name} needs {count} comma-separated numbers, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--{name} has a malformed entry: {text!r}")


def _timed(report: RunReport, start: float, timing: bool) -> RunReport:
    report.timing = round(time.perf_counter() - start, 6) if timing else None
    return report


def cmd_build(space_text: str, allow_n0: bool = False, timing: bool = False) -> RunReport:
    """Build the pair and its frame and run every structural check, Kashiwada's Ric^g = 2(2n+1) g included."""
    start = time.perf_counter()
    space = parse_space_id(space_text, allow_n0=allow_n0)
    pair = build_pair(space, allow_n0=allow_n0)
    frame = make_frame(pair)
    ric = ricci(levi_civita(frame)).array
    kashiwada = float(np.abs(ric - 2 * (2 * pair.n + 1) * frame.metric).max())

    residuals = {**pair.residuals, **frame.residuals, "kashiwada": kashiwada}
    passed = kashiwada <= tolerance("chained") and all(v <= tolerance("exact") for k, v in residuals.items()
                                                         if k != "kashiwada")
    results = {"dims": pair.dims(), "n": pair.n, "label": pair.label, "dim_M": pair.dim_m,
               "checks": {k: v <= (tolerance("chained") if k == "kashiwada" else tolerance("exact"))
                          for k, v in residuals.items()}}
    report = RunReport(space=pair.space_id, command="build", inputs={"space": space.text}, results=results,
                       residuals=residuals, passed=passed)
    return _timed(report, start, timing)


def _which(which: str) -> List[str]:
    if which == "all":
        return list(KINDS)
    if which not in KINDS:
        raise UsageError(f"Unknown dims target {which!r}; expected bilinear, lambda2, lambda3 or all")
    return [which]


def cmd_dims(space_text: str, which: str = "all", force: bool = False, emit_basis: Optional[str] = None,
             seed: Optional[int] = None, allow_n0: bool = False, timing: bool = False) -> RunReport:
    """Dimensions of the invariant spaces, refused up front when over budget.

    Raises:
        BudgetExceededError: a requested system is over budget and ``force`` is not set
    """
    start = time.perf_counter()
    kinds = _which(which)
    space = parse_space_id(space_text, allow_n0=allow_n0)
    dim_m = 4 * quaternionic_dimension(space) + 3
    for kind in kinds:
        check_budget(space.text, dim_m, space.large, kind, force=force)

    pair = build_pair(space, allow_n0=allow_n0)
    config = settings()["equivariant"]
    seed = config["weight_seed"] if seed is None else seed
    results, residuals, computed = {}, {}, {}
    for kind in kinds:
        cached = None if emit_basis else load_cached_results(pair.space_id, kind, tolerance("rank_rtol"),
                                                                 config["budget"], seed)
        if cached is not None:
            logger.info(f"Using cached {kind} result for {pair.space_id}")
            results[kind] = cached
        else:
            result = invariant_tensors(pair, kind, force=force, seed=seed)
            computed[kind] = result
            results[kind] = _plain(result.to_dict())
            save_cached_results(pair.space_id, kind, tolerance("rank_rtol"), config["budget"], results[kind], seed)
        residuals[kind] = results[kind]["equivariance_residual"]

    if emit_basis:
        results["files"] = write_bases(emit_basis, computed)
    min_gap = tolerance("min_gap")
    passed = all(r["gap"] is None or r["gap"] >= min_gap for k, r in results.items() if k in KINDS)
    report = RunReport(space=pair.space_id, command="dims", inputs={"space": space.text, "which": which,
                                                                    "force": force}, results=results,
                       residuals=residuals, passed=passed, seed=seed)
    return _timed(report, start, timing)


def cmd_classify(space_text: str, a: float = 0.0, B: Optional[str] = None, c: Optional[str] = None,
                 tol: Optional[float] = None, allow_n0: bool = False, timing: bool = False) -> RunReport:
    """Full verdict of nabla^g + T(a, B, c)/2.

    Raises:
        UsageError: malformed B or c, or c nonzero outside su
    """
    start = time.perf_counter()
    B_values = np.array(parse_floats(B, 9, "B")).reshape(3, 3) if B else np.zeros((3, 3))
    c_values = np.array(parse_floats(c, 3, "c")) if c else np.zeros(3)
    space = parse_space_id(space_text, allow_n0=allow_n0)
    spec = ConnectionSpec(a, B_values, c_values, label="cli")
    pair = build_pair(space, allow_n0=allow_n0)
    frame = make_frame(pair)
    validate_spec(frame, spec)

    verdict = ClassificationController(tol=tol).classify(frame, spec)
    agreements = {name: result.details["criterion_agrees"] for name, result in verdict.checks.items()
                  if "criterion_agrees" in result.details}
    passed = verdict.ok and all(agreements.values())
    results = verdict.to_dict()
    results["criterion_agrees"] = agreements
    report = RunReport(space=pair.space_id, command="classify", inputs={"space": space.text, **spec.to_dict(),
                                                                        "tol": tol},
                       results=results, residuals=dict(verdict.witnesses), passed=passed)
    return _timed(report, start, timing)


def cmd_sweep(space_text: str, count: Optional[int] = None, seed: Optional[int] = None,
              allow_n0: bool = False, show_progress: bool = False, timing: bool = False) -> RunReport:
    """Closed forms against brute force on ``count`` seeded random specs."""
    start = time.perf_counter()
    space = parse_space_id(space_text, allow_n0=allow_n0)
    pair = build_pair(space, allow_n0=allow_n0)
    frame = make_frame(pair)
    sweep = run_sweep(frame, count=count, seed=seed, show_progress=show_progress)
    report = RunReport(space=pair.space_id, command="sweep", inputs={"space": space.text, "count": sweep.count},
                       results=sweep.to_dict(), residuals=dict(sweep.maxima), passed=sweep.passed, seed=sweep.seed)
    return _timed(report, start, timing)


def format_report(report: RunReport) -> str:
    status = "✅ PASS" if report.passed else "❌ FAIL"
    text = f"""
{'=' * 80}
🧮 {report.command.upper()} REPORT - {report.space}
{'=' * 80}

📋 Inputs: {json.dumps(_plain(report.inputs), sort_keys=True)}
🎯 Status: {status}
"""
    results = _plain(report.results)
    if report.command == "build":
        dims = results["dims"]
        text += f"📐 dim g = {dims['g']}, dim h = {dims['h']}, dim m = {dims['m']} (n = {results['n']})\n"
    elif report.command == "dims":
        for kind in KINDS:
            if kind in results:
                entry = results[kind]
                gap = "clean" if entry["gap"] is None else f"gap {entry['gap']:.1e}"
                text += f"📐 Hom_h({entry['source']}, {entry['target']}) = {entry['dimension']} ({gap})\n"
    elif report.command == "classify":
        text += "\n🏷️  FLAGS:\n"
        for name, value in results["flags"].items():
            text += f"• {'🟢' if value else '⚪'} {name}: {value}\n"
        scalar = results["summary"].get("scalar")
        if scalar is not None:
            text += f"\n📈 Scalar curvature s = {scalar:.10g}\n"
    elif report.command == "sweep":
        text += f"🎲 {results['count']} specs, seed {results['seed']}\n"

    text += f"\n{'=' * 80}\n🔬 RESIDUALS\n{'=' * 80}\n"
    for name, value in _plain(report.residuals).items():
        shown = "n/a" if value is None else f"{value:.3e}"
        text += f"• {name}: {shown}\n"
    if report.timing is not None:
        text += f"\n🕒 Wall time: {report.timing:.3f}s\n"
    text += f"{'=' * 80}\n"
    return text

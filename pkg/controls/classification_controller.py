# controls/classification_controller.py
import logging
from concurrent.futures import ThreadPoolExecutor, TimeoutError
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from checks.base_check import BaseCheck, CheckContext, CheckResult
from checks.einstein_check import EinsteinCheck
from checks.metric_check import MetricCheck, SkewTorsionCheck
from checks.parallel_torsion_check import ParallelTorsionCheck
from checks.phi_compatible_check import PhiCompatibleCheck
from checks.reeb_check import ReebParallelCheck
from checks.ricci_symmetry_check import RicciSymmetryCheck
from checks.s_einstein_check import SEinsteinCheck
from geometry.sasaki_geometry import SasakiFrame
from geometry.torsions import ConnectionSpec
from memory.session_memory import remember_residual, remember_verdict
from utils.config_loader import settings

logger = logging.getLogger(__name__)

FLAGS = ["metric", "skew", "einstein", "s_einstein", "ricci_symmetric", "phi_compatible",
         "parallel_torsion", "parallelizes_reeb"]


@dataclass
class ClassificationVerdict:
    """Flags of one connection; each flag is exactly its witness residual within tolerance."""
    space: str
    spec: ConnectionSpec
    flags: Dict[str, bool]
    witnesses: Dict[str, float]
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    scalar: Optional[float] = None
    errors: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def summary(self) -> Dict[str, Any]:
        out = {
            "scalar": self.scalar,
            "sym_ricci_norm": self.checks["ricci_symmetric"].details.get("sym_norm") if "ricci_symmetric" in self.checks else None,
            "skew_ricci_norm": self.witnesses.get("ricci_symmetric"),
            "nabla_T_norm": self.witnesses.get("parallel_torsion"),
        }
        phi = self.checks.get("phi_compatible")
        if phi is not None and "gamma" in phi.details:
            out["gamma"] = phi.details["gamma"]
        s_einstein = self.checks.get("s_einstein")
        if s_einstein is not None:
            out["s_einstein_fit"] = {"alpha": s_einstein.details.get("alpha"), "beta": s_einstein.details.get("beta")}
        return out

    def to_dict(self) -> dict:
        return {
            "space": self.space,
            "spec": self.spec.to_dict(),
            "flags": dict(self.flags),
            "witnesses": dict(self.witnesses),
            "summary": self.summary(),
            "errors": dict(self.errors),
        }


def default_checks(tol: Optional[float] = None) -> List[BaseCheck]:
    return [MetricCheck(tol), SkewTorsionCheck(tol), EinsteinCheck(tol), SEinsteinCheck(tol),
            RicciSymmetryCheck(tol), PhiCompatibleCheck(tol), ParallelTorsionCheck(tol), ReebParallelCheck(tol)]


def _run_check_safely(check: BaseCheck, context: CheckContext) -> CheckResult:
    try:
        return check.evaluate(context)
    except Exception as e:
        logger.error(f"{check.name} failed: {e}")
        return CheckResult(check.name, False, float("inf"), check.tolerance(), error=str(e))


class ClassificationController:
    """Runs the classification checks of one connection concurrently."""

    def __init__(self, checks: Optional[List[BaseCheck]] = None, tol: Optional[float] = None,
                 max_workers: Optional[int] = None, timeout: Optional[float] = None):
        config = settings()["sweep"]
        self.checks = checks or default_checks(tol)
        self.max_workers = max_workers or config["max_workers"]
        self.timeout = timeout or config["timeout"]
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def classify(self, frame: SasakiFrame, spec: ConnectionSpec) -> ClassificationVerdict:
        """
        Decide every flag for the connection nabla^g + T(spec)/2 on ``frame``.

        Args:
            frame: Sasakian frame of a built pair
            spec: Torsion coefficients (a, B, c)

        Returns:
            ClassificationVerdict with one flag and one witness residual per check
        """
        context = CheckContext(frame, spec).warm()
        results: Dict[str, CheckResult] = {}
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {check.name: executor.submit(_run_check_safely, check, context) for check in self.checks}
            for name, future in futures.items():
                try:
                    results[name] = future.result(timeout=self.timeout)
                except TimeoutError:
                    self.logger.warning(f"{name} timed out after {self.timeout}s")
                    results[name] = CheckResult(name, False, float("inf"), 0.0, error="timeout")

        space = frame.pair.space_id
        verdict = ClassificationVerdict(
            space=space,
            spec=spec,
            flags={name: result.passed for name, result in results.items()},
            witnesses={name: result.residual for name, result in results.items()},
            checks=results,
            scalar=context.scalar,
            errors={name: result.error for name, result in results.items() if result.error},
        )
        for name, result in results.items():
            remember_residual(name, space, result.residual, result.passed, result.tolerance)
        remember_verdict(verdict.to_dict())
        raised = [name for name in FLAGS if verdict.flags.get(name)]
        self.logger.info(f"{space} {spec.label or 'spec'}: {', '.join(raised) or 'no flags'}")
        return verdict

    def classify_many(self, frame: SasakiFrame, specs: List[ConnectionSpec]) -> List[ClassificationVerdict]:
        """Classify several connections, one worker per spec; checks of one spec then run in order."""
        serial = ClassificationController(self.checks, max_workers=1, timeout=self.timeout)
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = [executor.submit(serial.classify, frame, spec) for spec in specs]
            return [future.result(timeout=self.timeout) for future in futures]

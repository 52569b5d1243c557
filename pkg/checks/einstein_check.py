# checks/einstein_check.py
import numpy as np

from checks.base_check import BaseCheck, CheckContext, CheckResult
from geometry.torsions import einstein_criterion


class EinsteinCheck(BaseCheck):
    """Sym(Ric) = (s / dim M) g.

    Also reports the algebraic criterion; in dimension 7 it describes the family
    a = tr B +- sqrt((|B|^2 + |c|^2)/3), BB^t + cc^t in R I_3, c^t B = 0.
    """

    def __init__(self, tol: float = None):
        super().__init__("einstein", tol)

    def evaluate(self, context: CheckContext) -> CheckResult:
        frame, spec = context.frame, context.spec
        sym = context.split.sym.array
        s = context.scalar
        residual = float(np.abs(sym - (s / frame.dim) * frame.metric).max())
        criterion = einstein_criterion(frame.n, spec)
        result = self.result(residual, scale=np.abs(sym).max(), scalar=s,
                             predicted_scalar=criterion.predicted_scalar,
                             criterion_residual=criterion.residual)
        result.details["criterion_agrees"] = criterion.holds() == result.passed
        if frame.n == 1:
            result.details["predicted_7d_scalar"] = 42.0 - 3.5 * spec.norm_squared
        if not result.details["criterion_agrees"]:
            self.logger.warning(f"Einstein flag {result.passed} disagrees with the algebraic criterion "
                                f"on {frame.pair.label} (residual {residual:.2e})")
        return result

# checks/parallel_torsion_check.py
import numpy as np

from checks.base_check import BaseCheck, CheckContext, CheckResult
from geometry.nomizu import nabla_T


class ParallelTorsionCheck(BaseCheck):
    """nabla T = 0."""

    def __init__(self, tol: float = None):
        super().__init__("parallel_torsion", tol)

    def evaluate(self, context: CheckContext) -> CheckResult:
        derivative = nabla_T(context.alpha, context.alpha_g).array
        norm = float(np.abs(derivative).max(initial=0.0))
        return self.result(norm, nabla_T_norm=norm)

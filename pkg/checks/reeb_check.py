# checks/reeb_check.py
from checks.base_check import BaseCheck, CheckContext, CheckResult
from geometry.torsions import reeb_derivative_norm


class ReebParallelCheck(BaseCheck):
    """nabla xi_i = 0 for i = 1, 2, 3."""

    def __init__(self, tol: float = None):
        super().__init__("parallelizes_reeb", tol)

    def evaluate(self, context: CheckContext) -> CheckResult:
        return self.result(reeb_derivative_norm(context.frame, context.alpha))

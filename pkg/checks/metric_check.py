# checks/metric_check.py
from checks.base_check import BaseCheck, CheckContext, CheckResult
from geometry.nomizu import metric_residual, skew_residual


class MetricCheck(BaseCheck):
    """nabla g = 0, i.e. alpha(X, .) is g-skew."""

    tolerance_key = "exact"

    def __init__(self, tol: float = None):
        super().__init__("metric", tol)

    def evaluate(self, context: CheckContext) -> CheckResult:
        return self.result(metric_residual(context.alpha), scale=abs(context.alpha.values).max())


class SkewTorsionCheck(BaseCheck):
    """g(T(X, Y), Z) is a 3-form."""

    tolerance_key = "exact"

    def __init__(self, tol: float = None):
        super().__init__("skew", tol)

    def evaluate(self, context: CheckContext) -> CheckResult:
        return self.result(max(metric_residual(context.alpha), skew_residual(context.alpha)),
                           scale=abs(context.alpha.values).max())

# checks/phi_compatible_check.py
import numpy as np

from checks.base_check import BaseCheck, CheckContext, CheckResult
from geometry.nomizu import covariant_derivative


def distribution_residual(context: CheckContext) -> float:
    """nabla_Z Y horizontal for horizontal Y, vertical for vertical Y."""
    a = context.alpha.values
    h = context.frame.horizontal
    return float(max(np.abs(a[:, h, :3]).max(initial=0.0), np.abs(a[:, :3, h]).max(initial=0.0)))


def structure_residuals(context: CheckContext) -> list:
    """max |(nabla_X phi_i) Y| over horizontal X, Y, for i = 1, 2, 3."""
    h = context.frame.horizontal
    out = []
    for i in range(3):
        # phi as a (1, 1) tensor: input axis then output axis
        derivative = covariant_derivative(context.alpha, context.frame.phi[i].T).array
        out.append(float(np.abs(derivative[h, h, :]).max(initial=0.0)))
    return out


class PhiCompatibleCheck(BaseCheck):
    """nabla preserves Q and Q^perp and (nabla_X phi)(Y) = 0 on Q for one of phi_1, phi_2, phi_3.

    When the flag holds, gamma = omega(xi_1, xi_2, xi_3) is reported.
    """

    def __init__(self, tol: float = None):
        super().__init__("phi_compatible", tol)

    def evaluate(self, context: CheckContext) -> CheckResult:
        spec = context.spec
        distribution = distribution_residual(context)
        per_structure = structure_residuals(context)
        residual = max(distribution, min(per_structure))
        algebraic = float(max(np.abs(spec.B - 2.0 * np.eye(3)).max(), np.abs(spec.c).max()))
        result = self.result(residual, scale=np.abs(context.alpha.values).max(),
                             distribution_residual=distribution, structure_residuals=per_structure,
                             criterion_residual=algebraic)
        if result.passed:
            result.details["gamma"] = float(context.omega[0, 1, 2])
            result.details["predicted_gamma"] = spec.a - 6.0
        return result

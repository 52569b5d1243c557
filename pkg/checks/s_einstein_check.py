# checks/s_einstein_check.py
import numpy as np

from checks.base_check import BaseCheck, CheckContext, CheckResult


def s_einstein_criterion(spec) -> float:
    """Residual of B = B^t, BB^t + cc^t in R I_3 and c^t B = 0."""
    gram = spec.B @ spec.B.T + np.outer(spec.c, spec.c)
    return float(max(np.abs(spec.B - spec.B.T).max(),
                     np.abs(gram - (np.trace(gram) / 3.0) * np.eye(3)).max(),
                     np.abs(spec.c @ spec.B).max()))


def predicted_coefficients(n: int, spec):
    """(alpha, beta) of Ric = alpha g + beta sum eta_k (x) eta_k when the criterion holds."""
    lam = spec.norm_squared / 3.0
    alpha = 4 * n + 2 - spec.norm_squared / 2.0
    beta = (4 * n + 2 - 0.5 * spec.shift ** 2 - n * lam) - alpha
    return alpha, beta


class SEinsteinCheck(BaseCheck):
    """Ric = alpha g + beta sum eta_k (x) eta_k, fitted by least squares."""

    def __init__(self, tol: float = None):
        super().__init__("s_einstein", tol)

    def evaluate(self, context: CheckContext) -> CheckResult:
        frame, spec = context.frame, context.spec
        ric = context.ricci
        vertical = sum(np.outer(frame.eta[k], frame.eta[k]) for k in range(3))
        design = np.stack([frame.metric.reshape(-1), vertical.reshape(-1)], axis=1)
        (alpha, beta), *_ = np.linalg.lstsq(design, ric.reshape(-1), rcond=None)
        residual = float(np.abs(ric - alpha * frame.metric - beta * vertical).max())
        criterion = s_einstein_criterion(spec)
        predicted = predicted_coefficients(frame.n, spec)
        result = self.result(residual, scale=np.abs(ric).max(), alpha=float(alpha), beta=float(beta),
                             predicted_alpha=predicted[0], predicted_beta=predicted[1],
                             criterion_residual=criterion)
        result.details["criterion_agrees"] = (criterion <= self.tolerance() * max(1.0, spec.norm_squared)) == result.passed
        return result

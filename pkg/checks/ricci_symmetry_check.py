# checks/ricci_symmetry_check.py
import numpy as np

from checks.base_check import BaseCheck, CheckContext, CheckResult
from geometry.torsions import closed_form_skew_ricci


class RicciSymmetryCheck(BaseCheck):
    """Skew(Ric) = div(T)/2 vanishes; happens exactly when B is symmetric."""

    def __init__(self, tol: float = None):
        super().__init__("ricci_symmetric", tol)

    def evaluate(self, context: CheckContext) -> CheckResult:
        split = context.split
        skew = split.skew.array
        norm = float(np.abs(skew).max(initial=0.0))
        closed = float(np.abs(skew - closed_form_skew_ricci(context.frame, context.spec)).max())
        return self.result(norm, scale=np.abs(context.ricci).max(), sym_norm=float(np.abs(split.sym.array).max()),
                           skew_norm=norm, closed_form_residual=closed,
                           criterion_residual=float(np.abs(context.spec.B - context.spec.B.T).max()))

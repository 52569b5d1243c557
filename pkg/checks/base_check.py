# checks/base_check.py
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional

import numpy as np

from geometry.nomizu import AlphaMap, RicciSplit, levi_civita, lower, ricci, sym_skew_ricci, torsion
from geometry.sasaki_geometry import SasakiFrame
from geometry.torsions import ConnectionSpec, connection_from_spec
from utils.config_loader import tolerance


class CheckContext:
    """A connection on a frame with the derived tensors the checks share.

    Derived tensors are computed on first use and kept.
    """

    def __init__(self, frame: SasakiFrame, spec: ConnectionSpec, alpha: Optional[AlphaMap] = None):
        self.frame = frame
        self.spec = spec
        self.alpha = alpha if alpha is not None else connection_from_spec(frame, spec)

    @cached_property
    def alpha_g(self) -> AlphaMap:
        return levi_civita(self.frame)

    @cached_property
    def torsion(self) -> np.ndarray:
        return torsion(self.alpha).array

    @cached_property
    def omega(self) -> np.ndarray:
        return lower(self.torsion, self.frame.metric)

    @cached_property
    def ricci(self) -> np.ndarray:
        return ricci(self.alpha).array

    @cached_property
    def split(self) -> RicciSplit:
        return sym_skew_ricci(self.alpha, self.alpha_g)

    @cached_property
    def scalar(self) -> float:
        return float(np.trace(np.linalg.solve(self.frame.metric, self.ricci)))

    def warm(self) -> "CheckContext":
        """Compute the shared tensors up front, before checks run concurrently."""
        _ = self.alpha_g, self.torsion, self.omega, self.ricci, self.split, self.scalar
        return self


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"pass": self.passed, "residual": self.residual, "tolerance": self.tolerance}
        out.update(self.details)
        if self.error:
            out["error"] = self.error
        return out


class BaseCheck(ABC):
    """Base class for all classification checks."""

    tolerance_key = "chained"

    def __init__(self, name: str, tol: Optional[float] = None):
        """
        Initialize base check.

        Args:
            name: Name of the flag the check decides
            tol: Override of the configured tolerance
        """
        self.name = name
        self.tol = tol
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def tolerance(self) -> float:
        return tolerance(self.tolerance_key) if self.tol is None else self.tol

    @abstractmethod
    def evaluate(self, context: CheckContext) -> CheckResult:
        """
        Decide the flag for one connection.

        Args:
            context: Frame, spec and shared tensors of the connection

        Returns:
            CheckResult whose ``passed`` is exactly ``residual <= tolerance``
        """
        raise NotImplementedError(f"{self.name} must implement evaluate method")

    def result(self, residual: float, scale: float = 1.0, **details) -> CheckResult:
        tol = self.tolerance() * max(1.0, scale)
        return CheckResult(self.name, bool(residual <= tol), float(residual), tol, details)

    def get_name(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name='{self.name}')"

# geometry/sasaki_geometry.py
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from algebra.algebra_zoo import EPSILON, ReductivePair
from utils.config_loader import tolerance
from utils.exceptions import ConstructionError, UsageError

logger = logging.getLogger(__name__)

CYCLIC = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]


@dataclass(frozen=True)
class SasakiFrame:
    """The three Sasakian structures at the origin, in the orthonormal m basis.

    ``phi[i][k, j]`` is the k-th coordinate of phi_i(x_j); ``alpha_g[i, j, k]`` is the
    k-th coordinate of alpha^g(x_i, x_j).
    """
    pair: ReductivePair
    xi: np.ndarray
    eta: np.ndarray
    phi: np.ndarray
    alpha_g: np.ndarray
    phi0: Optional[np.ndarray] = None
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.pair.dim_m

    @property
    def n(self) -> int:
        return self.pair.n

    @property
    def metric(self) -> np.ndarray:
        return self.pair.metric.matrix

    @property
    def horizontal(self) -> slice:
        return slice(3, self.dim)

    def reeb(self, v) -> np.ndarray:
        """xi_v = sum v_k xi_k."""
        return np.asarray(v, dtype=float) @ self.xi

    def structure(self, v) -> np.ndarray:
        """phi_v = sum v_k phi_k."""
        return np.einsum("k,kab->ab", np.asarray(v, dtype=float), self.phi)


def _phi_from_brackets(pair: ReductivePair) -> np.ndarray:
    dm = pair.dim_m
    phi = np.zeros((3, dm, dm))
    for i in range(3):
        phi[i][:, :3] = 0.5 * pair.m_bracket[i, :3, :].T
        phi[i][:, 3:] = pair.m_bracket[i, 3:, :].T
    return phi


def levi_civita_alpha(pair: ReductivePair) -> np.ndarray:
    """Levi-Civita Nomizu map of the 3-Sasakian metric.

    alpha(xi, xi') = 1/2 [xi, xi'], alpha(X, Y) = 1/2 [X, Y]_m,
    alpha(xi, X) = 0 and alpha(X, xi) = [X, xi] for X horizontal.
    """
    mb = pair.m_bracket
    alpha = 0.5 * mb.copy()
    alpha[:3, 3:, :] = 0.0
    alpha[3:, :3, :] = mb[3:, :3, :]
    return alpha


def _phi0(pair: ReductivePair) -> Optional[np.ndarray]:
    if pair.phi0_element is None:
        return None
    M = pair.m.basis
    images = pair.g.bracket_many(pair.phi0_element[None, :], M)[0]
    h_part, m_part = pair.decompose(images)
    if np.abs(h_part).max(initial=0.0) > tolerance("exact"):
        raise ConstructionError("ad(h0) does not preserve m", identity="phi0_reductive")
    return m_part.T


def make_frame(pair: ReductivePair) -> SasakiFrame:
    """Assemble xi, eta, phi and alpha^g on a built pair and verify the structure.

    Raises:
        UsageError: the pair carries no 3-Sasakian structure
        ConstructionError: a structural identity fails; ``identity`` names it
    """
    if not pair.sasakian:
        raise UsageError(f"{pair.label} is not a 3-Sasakian pair")
    tol = tolerance("exact")
    dm = pair.dim_m
    eye = np.eye(dm)
    G = pair.metric.matrix
    xi = eye[:3].copy()
    eta = (G @ xi.T).T
    phi = _phi_from_brackets(pair)
    alpha = levi_civita_alpha(pair)
    phi0 = _phi0(pair)

    residuals = {
        "xi_orthonormal": float(np.abs(xi @ G @ xi.T - np.eye(3)).max()),
        "xi_brackets": float(np.abs(pair.m_bracket[:3, :3, :3] - 2.0 * EPSILON).max()),
        "phi_xi": max(float(np.abs(phi[i] @ xi[i]).max()) for i in range(3)),
        "phi_square": max(float(np.abs(phi[i] @ phi[i] + eye - np.outer(xi[i], eta[i])).max()) for i in range(3)),
        "phi_product": max(
            float(np.abs(phi[i] @ phi[j] - np.outer(xi[i], eta[j]) - phi[k]).max()) for i, j, k in CYCLIC
        ),
        "killing": max(float(np.abs(G @ phi[i] + (G @ phi[i]).T).max()) for i in range(3)),
        "torsion_free": float(np.abs(alpha - alpha.transpose(1, 0, 2) - pair.m_bracket).max()),
        "metric": float(np.abs(np.einsum("zxk,ky->zxy", alpha, G) + np.einsum("zyk,kx->zxy", alpha, G)).max()),
    }
    if phi0 is not None:
        residuals["phi0_vertical"] = float(np.abs(phi0[:, :3]).max())
        residuals["phi0_commutes"] = max(float(np.abs(phi0 @ phi[i] - phi[i] @ phi0).max()) for i in range(3))
        residuals["phi0_skew"] = float(np.abs(G @ phi0 + (G @ phi0).T).max())

    failed = {k: v for k, v in residuals.items() if v > tol}
    if failed:
        key = max(failed, key=failed.get)
        raise ConstructionError(f"{pair.label}: frame identity {key} fails ({failed[key]:.3e})",
                                identity=key, residual=failed[key])

    frame = SasakiFrame(pair=pair, xi=xi, eta=eta, phi=phi, alpha_g=alpha, phi0=phi0, residuals=residuals)
    report = check_sasaki_identity(frame)
    residuals["sasaki_identity"] = report.max_residual
    if not report.passed:
        raise ConstructionError(f"{pair.label}: Sasakian identity fails ({report.max_residual:.3e})",
                                identity="sasaki_identity", residual=report.max_residual)
    logger.debug(f"Frame on {pair.label}: max residual {max(residuals.values()):.2e}")
    return frame


@dataclass
class SasakiReport:
    max_residual: float
    passed: bool
    per_structure: Dict[int, float]

    def to_dict(self) -> dict:
        return {"max_residual": self.max_residual, "pass": self.passed,
                "per_structure": {str(k): v for k, v in self.per_structure.items()}}


def sasaki_identity_residuals(alpha: np.ndarray, phi: np.ndarray, xi: np.ndarray, eta: np.ndarray,
                              metric: np.ndarray) -> np.ndarray:
    """alpha(X, phi Y) - phi alpha(X, Y) - g(X, Y) xi + eta(Y) X for one structure."""
    dm = metric.shape[0]
    first = np.einsum("py,xpk->xyk", phi, alpha)
    second = np.einsum("kp,xyp->xyk", phi, alpha)
    third = np.einsum("xy,k->xyk", metric, xi)
    fourth = np.einsum("y,xk->xyk", eta, np.eye(dm))
    return first - second - third + fourth


def check_sasaki_identity(frame: SasakiFrame, tol: Optional[float] = None) -> SasakiReport:
    """(nabla^g_X phi_i) Y = g(X, Y) xi_i - eta_i(Y) X for i = 1, 2, 3 on all basis pairs."""
    tol = tolerance("exact") if tol is None else tol
    per = {}
    for i in range(3):
        residual = sasaki_identity_residuals(frame.alpha_g, frame.phi[i], frame.xi[i], frame.eta[i], frame.metric)
        per[i + 1] = float(np.abs(residual).max())
    worst = max(per.values())
    return SasakiReport(max_residual=worst, passed=worst <= tol, per_structure=per)


def fundamental_two_forms(frame: SasakiFrame, include_phi0: bool = False) -> Dict[int, np.ndarray]:
    """Phi_s(X, Y) = g(X, phi_s Y) for s = 1, 2, 3, and s = 0 on request (SU family only).

    Raises:
        UsageError: Phi_0 requested on a pair without phi_0
    """
    G = frame.metric
    forms = {s + 1: G @ frame.phi[s] for s in range(3)}
    if include_phi0:
        if frame.phi0 is None:
            raise UsageError(f"Phi_0 exists only on the SU family, not on {frame.pair.label}")
        forms[0] = G @ frame.phi0
    return forms


def phi_operators(frame: SasakiFrame) -> Dict[int, np.ndarray]:
    """phi_0 (when present) and phi_1..phi_3 keyed by index."""
    operators = {s + 1: frame.phi[s] for s in range(3)}
    if frame.phi0 is not None:
        operators[0] = frame.phi0
    return operators


def d_eta(frame: SasakiFrame) -> np.ndarray:
    """d eta_r(X, Y) = -eta_r([X, Y]_m) for invariant 1-forms; shape (3, m, m)."""
    return -np.einsum("xyk,rk->rxy", frame.pair.m_bracket, frame.eta)


def eta_wedge_eta(frame: SasakiFrame, r: int, s: int) -> np.ndarray:
    """(eta_r ^ eta_s)(X, Y) = eta_r(X) eta_s(Y) - eta_r(Y) eta_s(X), indices 1..3."""
    a, b = frame.eta[r - 1], frame.eta[s - 1]
    return np.outer(a, b) - np.outer(b, a)

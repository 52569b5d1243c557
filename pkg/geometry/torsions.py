# geometry/torsions.py
"""Invariant skew torsions on 3-Sasakian homogeneous spaces.

A connection with skew torsion is written nabla = nabla^g + T/2 with
T = a T^o + sum_rs b_rs T^rs + sum_l c_l T^l0, the last sum only on the SU family.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation

from algebra.algebra_zoo import EPSILON
from geometry.nomizu import AlphaMap, make_alpha, reeb_derivatives
from geometry.sasaki_geometry import SasakiFrame, eta_wedge_eta, fundamental_two_forms
from utils.config_loader import tolerance
from utils.exceptions import UsageError

logger = logging.getLogger(__name__)

TorsionKey = Union[str, Tuple[int, int]]


@dataclass(frozen=True, eq=False)
class ConnectionSpec:
    """Coefficients (a, B, c) of an invariant skew torsion."""
    a: float = 0.0
    B: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    c: np.ndarray = field(default_factory=lambda: np.zeros(3))
    label: str = ""

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if B.shape != (3, 3):
            raise UsageError(f"B must be 3x3, got shape {B.shape}")
        if c.shape != (3,):
            raise UsageError(f"c must have 3 entries, got shape {c.shape}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "c", c)

    @property
    def norm_squared(self) -> float:
        """||B||^2 + ||c||^2."""
        return float(np.sum(self.B ** 2) + np.sum(self.c ** 2))

    @property
    def shift(self) -> float:
        """a - tr B."""
        return self.a - float(np.trace(self.B))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.a], self.B.reshape(-1), self.c])

    @classmethod
    def from_vector(cls, vector, label: str = "") -> "ConnectionSpec":
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (13,):
            raise UsageError(f"A spec vector has 13 entries (a, B row-major, c), got {vector.shape}")
        return cls(vector[0], vector[1:10].reshape(3, 3), vector[10:], label=label)

    def scaled(self, factor: float) -> "ConnectionSpec":
        return ConnectionSpec(factor * self.a, factor * self.B, factor * self.c, label=self.label)

    def to_dict(self) -> dict:
        return {"a": self.a, "B": self.B.tolist(), "c": self.c.tolist()}


def validate_spec(frame: SasakiFrame, spec: ConnectionSpec) -> None:
    """Raises UsageError when c is nonzero on a pair without phi_0."""
    if frame.phi0 is None and np.any(spec.c != 0.0):
        raise UsageError(f"c must vanish outside the SU family ({frame.pair.label} has no T^l0)")


def _t_rs(frame: SasakiFrame, r: int, phi_s: np.ndarray) -> np.ndarray:
    eta, xi, G = frame.eta[r], frame.xi[r], frame.metric
    Phi = G @ phi_s
    T = -np.einsum("x,ky->xyk", eta, phi_s)
    T += np.einsum("y,kx->xyk", eta, phi_s)
    T += np.einsum("xy,k->xyk", Phi, xi)
    return T


def torsion_basis(frame: SasakiFrame) -> Dict[TorsionKey, np.ndarray]:
    """T^o, T^rs for r, s = 1..3 and, on the SU family, T^r0, as (1, 2) tensors.

    T^o(X, Y) = X^v x Y^v and
    T^rs(X, Y) = -eta_r(X) phi_s Y + eta_r(Y) phi_s X + Phi_s(X, Y) xi_r.
    """
    basis = {"o": np.einsum("ai,bj,abc,ck->ijk", frame.eta, frame.eta, EPSILON, frame.xi)}
    for r in range(3):
        for s in range(3):
            basis[(r + 1, s + 1)] = _t_rs(frame, r, frame.phi[s])
    if frame.phi0 is not None:
        for r in range(3):
            basis[(r + 1, 0)] = _t_rs(frame, r, frame.phi0)
    return basis


def torsion_from_spec(frame: SasakiFrame, spec: ConnectionSpec,
                      basis: Optional[Dict[TorsionKey, np.ndarray]] = None) -> np.ndarray:
    validate_spec(frame, spec)
    basis = basis or torsion_basis(frame)
    T = spec.a * basis["o"]
    for r in range(3):
        for s in range(3):
            if spec.B[r, s]:
                T = T + spec.B[r, s] * basis[(r + 1, s + 1)]
        if spec.c[r]:
            T = T + spec.c[r] * basis[(r + 1, 0)]
    return T


def connection_from_spec(frame: SasakiFrame, spec: ConnectionSpec) -> AlphaMap:
    """alpha = alpha^g + T/2.

    Raises:
        UsageError: c nonzero outside the SU family
    """
    T = torsion_from_spec(frame, spec)
    label = spec.label or f"spec(a={spec.a:g})"
    return make_alpha(frame.pair, frame.alpha_g + 0.5 * T, label=label)


def so3_action(spec: ConnectionSpec, P) -> ConnectionSpec:
    """Coefficients of the same torsion after the Reeb frame change xi'_i = sum_j p_ij xi_j.

    Raises:
        UsageError: P is not special orthogonal
    """
    P = np.asarray(P, dtype=float)
    tol = tolerance("so3")
    if P.shape != (3, 3):
        raise UsageError(f"P must be 3x3, got shape {P.shape}")
    orthogonality = float(np.abs(P @ P.T - np.eye(3)).max())
    if orthogonality > tol or abs(np.linalg.det(P) - 1.0) > tol:
        raise UsageError(f"P is not in SO(3) (|PP^t - I| = {orthogonality:.2e}, det = {np.linalg.det(P):.6f})")
    return ConnectionSpec(spec.a, P @ spec.B @ P.T, P @ spec.c, label=spec.label)


def rotate_frame(frame: SasakiFrame, P) -> SasakiFrame:
    """The compatible triple xi'_i = sum_j p_ij xi_j with its eta' and phi'."""
    P = np.asarray(P, dtype=float)
    return SasakiFrame(pair=frame.pair, xi=P @ frame.xi, eta=P @ frame.eta,
                       phi=np.einsum("ij,jab->iab", P, frame.phi), alpha_g=frame.alpha_g,
                       phi0=frame.phi0, residuals=dict(frame.residuals))


def haar_rotation(rng: np.random.Generator) -> np.ndarray:
    return Rotation.random(random_state=rng).as_matrix()


# presets

def levi_civita_spec() -> ConnectionSpec:
    return ConnectionSpec(label="levi-civita")


def canonical_spec() -> ConnectionSpec:
    """omega = sum eta_i ^ d eta_i."""
    return ConnectionSpec(0.0, 2.0 * np.eye(3), label="canonical")


def distinguished_spec() -> ConnectionSpec:
    """The connection parallelizing all three Reeb fields."""
    return ConnectionSpec(4.0, 2.0 * np.eye(3), label="distinguished")


def characteristic_spec(P=None) -> ConnectionSpec:
    """Characteristic connection of the Sasakian structure with Reeb field P^t e_1; omega = eta ^ d eta."""
    P = np.eye(3) if P is None else np.asarray(P, dtype=float)
    return ConnectionSpec(0.0, P @ np.diag([2.0, 0.0, 0.0]) @ P.T, label="characteristic")


def g2_einstein_spec() -> ConnectionSpec:
    """omega_G2 = 1/2 sum eta_i ^ d eta_i + 4 eta_123."""
    return ConnectionSpec(4.0, np.eye(3), label="g2-einstein")


def parallel7_spec(P=None) -> ConnectionSpec:
    """Parallel torsion that exists in dimension 7 only."""
    P = np.eye(3) if P is None else np.asarray(P, dtype=float)
    return ConnectionSpec(0.0, (2.0 / 3.0) * P @ np.diag([1.0, 1.0, -1.0]) @ P.T, label="parallel7")


PRESETS = {
    "levi-civita": levi_civita_spec,
    "canonical": canonical_spec,
    "distinguished": distinguished_spec,
    "characteristic": characteristic_spec,
    "g2-einstein": g2_einstein_spec,
    "parallel7": parallel7_spec,
}


def random_spec(rng: np.random.Generator, with_c: bool = False, scale: float = 1.0) -> ConnectionSpec:
    a = scale * rng.standard_normal()
    B = scale * rng.standard_normal((3, 3))
    c = scale * rng.standard_normal(3) if with_c else np.zeros(3)
    return ConnectionSpec(a, B, c, label="random")


# closed forms

def _cross_form(frame: SasakiFrame, spec: ConnectionSpec) -> np.ndarray:
    """sum_js b_js c_j g(phi_0 X, phi_s Y) on horizontal vectors."""
    dm = frame.dim
    if frame.phi0 is None or not np.any(spec.c):
        return np.zeros((dm, dm))
    weights = spec.c @ spec.B
    G = frame.metric
    form = sum(weights[s] * frame.phi0.T @ G @ frame.phi[s] for s in range(3))
    out = np.zeros((dm, dm))
    h = frame.horizontal
    out[h, h] = form[h, h]
    return out


def closed_form_s(frame: SasakiFrame, spec: ConnectionSpec) -> np.ndarray:
    """S(xi_i, xi_k) = 2 delta_ik (a - tr B)^2 + 4n (BB^t + cc^t)_ik, S(X, Y) = 2(|B|^2 + |c|^2) g + 4 cross, S(Q, Q^perp) = 0."""
    n, dm = frame.n, frame.dim
    S = np.zeros((dm, dm))
    S[:3, :3] = 2.0 * spec.shift ** 2 * np.eye(3) + 4.0 * n * (spec.B @ spec.B.T + np.outer(spec.c, spec.c))
    h = frame.horizontal
    S[h, h] = 2.0 * spec.norm_squared * frame.metric[h, h]
    return S + 4.0 * _cross_form(frame, spec)


def closed_form_sym_ricci(frame: SasakiFrame, spec: ConnectionSpec) -> np.ndarray:
    n, dm = frame.n, frame.dim
    sym = np.zeros((dm, dm))
    sym[:3, :3] = ((4 * n + 2) - 0.5 * spec.shift ** 2) * np.eye(3) - n * (spec.B @ spec.B.T + np.outer(spec.c, spec.c))
    h = frame.horizontal
    sym[h, h] = ((4 * n + 2) - 0.5 * spec.norm_squared) * frame.metric[h, h]
    return sym - _cross_form(frame, spec)


def closed_form_scalar(n: int, spec: ConnectionSpec) -> float:
    return float((4 * n + 2) * (4 * n + 3) - 1.5 * spec.shift ** 2 - 3 * n * spec.norm_squared)


def closed_form_divergence(frame: SasakiFrame, key: TorsionKey) -> np.ndarray:
    """div of one torsion generator; nonzero only for T^rs with r != s."""
    dm, n = frame.dim, frame.n
    if key == "o" or key[1] == 0 or key[0] == key[1]:
        return np.zeros((dm, dm))
    r, s = key
    forms = fundamental_two_forms(frame)
    if s == r % 3 + 1:
        t = s % 3 + 1
        return 2.0 * forms[t] + (4 * n + 2) * eta_wedge_eta(frame, r, s)
    # s = r + 2 (mod 3)
    return -2.0 * forms[r % 3 + 1] + (4 * n + 2) * eta_wedge_eta(frame, r, s)


def closed_form_skew_ricci(frame: SasakiFrame, spec: ConnectionSpec) -> np.ndarray:
    skew = np.zeros((frame.dim, frame.dim))
    for r in range(3):
        for s in range(3):
            if r != s and spec.B[r, s]:
                skew += 0.5 * spec.B[r, s] * closed_form_divergence(frame, (r + 1, s + 1))
    return skew


@dataclass
class EinsteinCriterion:
    """Algebraic conditions for Sym(Ric) to be a multiple of g."""
    conformal_residual: float
    cross_residual: float
    balance_residual: float
    predicted_scalar: float

    @property
    def residual(self) -> float:
        return max(self.conformal_residual, self.cross_residual, self.balance_residual)

    def holds(self, tol: Optional[float] = None) -> bool:
        tol = tolerance("chained") if tol is None else tol
        return self.residual <= tol * max(1.0, abs(self.predicted_scalar))


def einstein_criterion(n: int, spec: ConnectionSpec) -> EinsteinCriterion:
    """BB^t + cc^t in R I_3, c^t B = 0 and 3(a - tr B)^2 + (2n - 3)(|B|^2 + |c|^2) = 0."""
    N = spec.norm_squared
    gram = spec.B @ spec.B.T + np.outer(spec.c, spec.c)
    return EinsteinCriterion(
        conformal_residual=float(np.abs(gram - (N / 3.0) * np.eye(3)).max()),
        cross_residual=float(np.abs(spec.c @ spec.B).max()),
        balance_residual=float(abs(3.0 * spec.shift ** 2 + (2 * n - 3) * N)),
        predicted_scalar=closed_form_scalar(n, spec),
    )


def einstein_family_spec(B, c=None, sign: int = 1, tol: Optional[float] = None) -> Tuple[ConnectionSpec, float]:
    """Member of the 7-dimensional Einstein family and its predicted scalar curvature.

    a = tr B + sign * sqrt((|B|^2 + |c|^2)/3), s = 42 - 7/2 (|B|^2 + |c|^2).

    Raises:
        UsageError: (B, c) violates BB^t + cc^t in R I_3 or c^t B = 0, or sign is not +-1
    """
    if sign not in (1, -1):
        raise UsageError(f"sign must be +1 or -1, got {sign}")
    B = np.asarray(B, dtype=float)
    c = np.zeros(3) if c is None else np.asarray(c, dtype=float)
    probe = ConnectionSpec(0.0, B, c)
    N = probe.norm_squared
    a = float(np.trace(B)) + sign * np.sqrt(N / 3.0)
    spec = ConnectionSpec(a, B, c, label=f"einstein{'+' if sign > 0 else '-'}")
    criterion = einstein_criterion(1, spec)
    tol = tolerance("co3") if tol is None else tol
    if max(criterion.conformal_residual, criterion.cross_residual) > tol * max(1.0, N):
        raise UsageError("(B, c) is outside the Einstein family: need BB^t + cc^t in R I_3 and c^t B = 0")
    return spec, 42.0 - 3.5 * N


def random_einstein_member(rng: np.random.Generator, with_c: bool = False) -> Tuple[ConnectionSpec, float]:
    """Sample (sign, B, c) from the 7-dimensional Einstein family.

    Without c, B = lambda R with R in SO(3); with c, B = mu (v1 w1^t + v2 w2^t) and c = mu u
    for orthonormal frames (u, v1, v2) and (w1, w2, w3).
    """
    sign = 1 if rng.random() < 0.5 else -1
    scale = rng.uniform(0.2, 2.5)
    if not with_c:
        return einstein_family_spec(scale * haar_rotation(rng), sign=sign)
    frame, other = haar_rotation(rng), haar_rotation(rng)
    u, v1, v2 = frame[:, 0], frame[:, 1], frame[:, 2]
    B = scale * (np.outer(v1, other[:, 0]) + np.outer(v2, other[:, 1]))
    return einstein_family_spec(B, scale * u, sign=sign)


def is_conformal(B, tol: Optional[float] = None) -> bool:
    """B in CO(3): BB^t = (|B|^2/3) I_3 and det B != 0."""
    tol = tolerance("co3") if tol is None else tol
    B = np.asarray(B, dtype=float)
    lam = float(np.sum(B ** 2)) / 3.0
    return bool(np.abs(B @ B.T - lam * np.eye(3)).max() <= tol and abs(np.linalg.det(B)) > tol)


def spinor_family_matrix(q) -> np.ndarray:
    """B of the parallel-spinor family attached to a nonzero quaternion q = (a, b, c, d)."""
    a, b, c, d = np.asarray(q, dtype=float)
    rho = 1.0 / (6.0 * (a * a + b * b + c * c + d * d))
    return rho * np.array([
        [a * a - b * b - c * c + d * d, 2 * (a * b + c * d), 2 * (a * c - b * d)],
        [2 * (a * b - c * d), -a * a + b * b - c * c + d * d, 2 * (b * c + a * d)],
        [2 * (a * c + b * d), 2 * (b * c - a * d), -a * a - b * b + c * c + d * d],
    ])


@dataclass
class UniquenessReport:
    """Solutions of nabla xi_i = 0 among all invariant skew torsions."""
    parameters: int
    kernel_dimension: int
    solution: Optional[ConnectionSpec]
    residual: float

    @property
    def unique(self) -> bool:
        return self.kernel_dimension == 1 and self.solution is not None

    def to_dict(self) -> dict:
        return {"parameters": self.parameters, "kernel_dimension": self.kernel_dimension,
                "solution": None if self.solution is None else self.solution.to_dict(),
                "residual": self.residual}


def reeb_parallel_solutions(frame: SasakiFrame) -> UniquenessReport:
    """Solve alpha^g(Z, xi_i) + 1/2 sum_j p_j T_j(Z, xi_i) = 0 in homogeneous coordinates (p, 1)."""
    basis = torsion_basis(frame)
    keys = ["o"] + [(r, s) for r in range(1, 4) for s in range(1, 4)]
    if frame.phi0 is not None:
        keys += [(r, 0) for r in range(1, 4)]
    xi = frame.xi
    columns = [0.5 * np.einsum("zpk,ip->izk", basis[key], xi).reshape(-1) for key in keys]
    columns.append(np.einsum("zpk,ip->izk", frame.alpha_g, xi).reshape(-1))
    A = np.stack(columns, axis=1)
    _, s, vh = np.linalg.svd(A)
    sigma = np.zeros(A.shape[1])
    sigma[:len(s)] = s
    null = vh[sigma <= tolerance("rank_rtol") * max(sigma[0], 1.0)]
    solution, residual = None, float("nan")
    if len(null) == 1 and abs(null[0, -1]) > tolerance("exact"):
        p = null[0, :-1] / null[0, -1]
        vector = np.zeros(13)
        vector[:len(p)] = p
        solution = ConnectionSpec.from_vector(vector, label="reeb-parallel")
        residual = float(np.abs(A @ np.append(p, 1.0)).max())
    logger.debug(f"nabla xi = 0 on {frame.pair.label}: kernel dimension {len(null)} over {len(keys)} parameters")
    return UniquenessReport(parameters=len(keys), kernel_dimension=len(null), solution=solution, residual=residual)


def reeb_derivative_norm(frame: SasakiFrame, alpha: AlphaMap) -> float:
    """max over i of |nabla xi_i|."""
    return float(np.abs(reeb_derivatives(alpha, frame.xi)).max())

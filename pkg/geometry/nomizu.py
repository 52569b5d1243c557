# geometry/nomizu.py
"""Invariant connections on G/H through their Nomizu maps alpha: m x m -> m.

All tensors live at the origin and are dense arrays over the m basis. A (1, k)
tensor has k input axes followed by one output axis; a (0, k) tensor has k axes.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from algebra.algebra_zoo import ReductivePair
from utils.config_loader import tolerance
from utils.exceptions import ConsistencyError, ConstructionError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TensorAtOrigin:
    """Invariant tensor at o; ``rank`` is (contravariant, covariant)."""
    array: np.ndarray
    rank: Tuple[int, int]
    name: str = ""

    def __array__(self, dtype=None):
        return self.array if dtype is None else self.array.astype(dtype)

    def antisymmetry_residual(self, first: int = 0, second: int = 1) -> float:
        return float(np.abs(self.array + np.swapaxes(self.array, first, second)).max(initial=0.0))

    def symmetry_residual(self, first: int = 0, second: int = 1) -> float:
        return float(np.abs(self.array - np.swapaxes(self.array, first, second)).max(initial=0.0))

    def norm(self) -> float:
        """Max-entry norm."""
        return float(np.abs(self.array).max(initial=0.0))


def _array(tensor) -> np.ndarray:
    return tensor.array if isinstance(tensor, TensorAtOrigin) else np.asarray(tensor, dtype=float)


def equivariance_residuals(pair: ReductivePair, values: np.ndarray) -> np.ndarray:
    """[A, alpha(X, Y)] - alpha([A, X], Y) - alpha(X, [A, Y]) for every h basis element A."""
    ad = pair.h_action
    if not len(ad):
        return np.zeros((0,) + values.shape)
    moved_out = np.einsum("xyp,apk->axyk", values, ad, optimize=True)
    moved_left = np.einsum("axp,pyk->axyk", ad, values, optimize=True)
    moved_right = np.einsum("ayp,xpk->axyk", ad, values, optimize=True)
    return moved_out - moved_left - moved_right


def max_equivariance_residual(pair: ReductivePair, values: np.ndarray) -> float:
    """Largest equivariance residual, one h generator at a time."""
    worst = 0.0
    for ad in pair.h_action:
        residual = values @ ad - np.einsum("xp,pyk->xyk", ad, values) - np.einsum("yp,xpk->xyk", ad, values)
        worst = max(worst, float(np.abs(residual).max(initial=0.0)))
    return worst


@dataclass(frozen=True)
class AlphaMap:
    """An h-equivariant bilinear map on m: alpha(x_i, x_j) = sum_k values[i, j, k] x_k.

    Build through ``make_alpha``, which rejects non-equivariant input.
    """
    pair: ReductivePair
    values: np.ndarray
    label: str = "alpha"
    equivariance: float = 0.0

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def __call__(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.values)

    def __add__(self, other: "AlphaMap") -> "AlphaMap":
        return AlphaMap(self.pair, self.values + other.values, label=f"{self.label}+{other.label}",
                        equivariance=max(self.equivariance, other.equivariance))


def make_alpha(pair: ReductivePair, values: np.ndarray, label: str = "alpha",
               tol: Optional[float] = None) -> AlphaMap:
    """Wrap an array as an AlphaMap after checking h-equivariance.

    Raises:
        UsageError: wrong shape
        ConstructionError: equivariance residual above tolerance
    """
    values = np.asarray(values, dtype=float)
    dm = pair.dim_m
    if values.shape != (dm, dm, dm):
        raise UsageError(f"alpha must have shape {(dm, dm, dm)}, got {values.shape}")
    tol = tolerance("exact") if tol is None else tol
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    residual = max_equivariance_residual(pair, values)
    if residual > tol * scale:
        raise ConstructionError(f"{label} is not h-equivariant (residual {residual:.3e})",
                                identity="equivariance", residual=residual)
    return AlphaMap(pair=pair, values=values, label=label, equivariance=residual)


def levi_civita(frame) -> AlphaMap:
    """alpha^g of a SasakiFrame as a checked AlphaMap."""
    return make_alpha(frame.pair, frame.alpha_g, label="levi-civita")


def torsion(alpha: AlphaMap) -> TensorAtOrigin:
    """T(X, Y) = alpha(X, Y) - alpha(Y, X) - [X, Y]_m."""
    a = alpha.values
    return TensorAtOrigin(a - a.transpose(1, 0, 2) - alpha.pair.m_bracket, (1, 2), "torsion")


def curvature(alpha: AlphaMap) -> TensorAtOrigin:
    """R(X, Y)Z = alpha(X, alpha(Y, Z)) - alpha(Y, alpha(X, Z)) - alpha([X, Y]_m, Z) - [[X, Y]_h, Z].

    Axes are (X, Y, Z, output).
    """
    a, pair = alpha.values, alpha.pair
    R = np.einsum("yzp,xpk->xyzk", a, a, optimize=True)
    R -= np.einsum("xzp,ypk->xyzk", a, a, optimize=True)
    R -= np.einsum("xyp,pzk->xyzk", pair.m_bracket, a, optimize=True)
    if len(pair.h_action):
        R -= np.einsum("xyh,hzk->xyzk", pair.h_bracket, pair.h_action, optimize=True)
    return TensorAtOrigin(R, (1, 3), "curvature")


def ricci(alpha: AlphaMap) -> TensorAtOrigin:
    """Ric(X, Y) = trace of Z -> R(Z, X)Y, contracted without materializing R."""
    a, pair = alpha.values, alpha.pair
    ric = np.einsum("xyp,ipi->xy", a, a, optimize=True)
    ric -= np.einsum("iyp,xpi->xy", a, a, optimize=True)
    ric -= np.einsum("ixp,pyi->xy", pair.m_bracket, a, optimize=True)
    if len(pair.h_action):
        ric -= np.einsum("ixh,hyi->xy", pair.h_bracket, pair.h_action, optimize=True)
    return TensorAtOrigin(ric, (0, 2), "ricci")


def scalar(alpha: AlphaMap) -> float:
    ric = ricci(alpha).array
    return float(np.einsum("xy,xy->", np.linalg.inv(alpha.pair.metric.matrix), ric))


def covariant_derivative(alpha: AlphaMap, tensor, contravariant: int = 1) -> TensorAtOrigin:
    """(nabla_Z T)(X_1..X_k) = alpha(Z, T(X_1..X_k)) - sum_i T(.., alpha(Z, X_i), ..).

    Args:
        alpha: Nomizu map of the connection
        tensor: invariant tensor; a (1, k) tensor carries its output axis last
        contravariant: 1 for (1, k) tensors, 0 for (0, k) tensors (no leading term)

    Returns:
        Tensor with the derivative direction Z as a new first axis
    """
    a = alpha.values
    T = _array(tensor)
    k = T.ndim - contravariant
    if contravariant not in (0, 1) or k < 0:
        raise UsageError(f"Unsupported tensor rank ({contravariant}, {k})")
    result = np.zeros((a.shape[0],) + T.shape)
    if contravariant:
        result += np.moveaxis(np.tensordot(T, a, axes=([-1], [1])), -2, 0)
    for slot in range(k):
        moved = np.tensordot(a, T, axes=([2], [slot]))     # (Z, X_slot, remaining axes of T)
        result -= np.moveaxis(moved, 1, slot + 1)
    return TensorAtOrigin(result, (contravariant, k + 1), "covariant_derivative")


def lower(tensor, metric: np.ndarray) -> np.ndarray:
    """omega(X, Y, Z) = g(T(X, Y), Z)."""
    return np.einsum("xyk,kz->xyz", _array(tensor), metric)


def raise_form(omega: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Inverse of ``lower``."""
    return np.einsum("xyz,zk->xyk", omega, np.linalg.inv(metric))


def metric_residual(alpha: AlphaMap) -> float:
    """max |g(alpha(X, Y), Z) + g(Y, alpha(X, Z))|."""
    G = alpha.pair.metric.matrix
    lowered = np.einsum("xyk,kz->xyz", alpha.values, G)
    return float(np.abs(lowered + lowered.transpose(0, 2, 1)).max(initial=0.0))


def skew_residual(alpha: AlphaMap) -> float:
    """max |omega(X, Y, Z) + omega(X, Z, Y)| for omega = g(T(X, Y), Z)."""
    omega = lower(torsion(alpha), alpha.pair.metric.matrix)
    return float(np.abs(omega + omega.transpose(0, 2, 1)).max(initial=0.0))


def is_metric(alpha: AlphaMap, tol: Optional[float] = None) -> bool:
    tol = tolerance("exact") if tol is None else tol
    return metric_residual(alpha) <= tol


def is_skew(alpha: AlphaMap, tol: Optional[float] = None) -> bool:
    tol = tolerance("exact") if tol is None else tol
    return is_metric(alpha, tol) and skew_residual(alpha) <= tol


def s_tensor(torsion_tensor, metric: np.ndarray) -> TensorAtOrigin:
    """S(X, Y) = sum_j g(T(e_j, X), T(e_j, Y)) over a g-orthonormal frame."""
    T = _array(torsion_tensor)
    inv = np.linalg.inv(metric)
    S = np.einsum("jl,jxp,pq,lyq->xy", inv, T, metric, T, optimize=True)
    return TensorAtOrigin(S, (0, 2), "S")


def divergence(alpha: AlphaMap, omega: np.ndarray) -> TensorAtOrigin:
    """div(omega)(X, Y) = sum_i (nabla_{e_i} omega)(X, Y, e_i); ``alpha`` is normally alpha^g."""
    derivative = covariant_derivative(alpha, omega, contravariant=0).array
    inv = np.linalg.inv(alpha.pair.metric.matrix)
    return TensorAtOrigin(np.einsum("zw,zxyw->xy", inv, derivative, optimize=True), (0, 2), "divergence")


@dataclass
class RicciSplit:
    sym: TensorAtOrigin
    skew: TensorAtOrigin
    ric_g: np.ndarray
    S: np.ndarray
    div: np.ndarray
    sym_residual: float
    skew_residual: float


def sym_skew_ricci(alpha: AlphaMap, alpha_g: AlphaMap, tol: Optional[float] = None) -> RicciSplit:
    """Split Ric of a skew-torsion connection and cross-check both halves.

    Sym(Ric) must equal Ric^g - S/4 and Skew(Ric) must equal div(T)/2.

    Raises:
        ConsistencyError: either identity fails above the chained tolerance
    """
    tol = tolerance("chained") if tol is None else tol
    G = alpha.pair.metric.matrix
    ric = ricci(alpha).array
    sym, skew = 0.5 * (ric + ric.T), 0.5 * (ric - ric.T)
    T = torsion(alpha)
    ric_g = ricci(alpha_g).array
    S = s_tensor(T, G).array
    div = divergence(alpha_g, lower(T, G)).array
    scale = max(1.0, float(np.abs(ric).max()))
    sym_residual = float(np.abs(sym - (ric_g - 0.25 * S)).max())
    skew_residual_ = float(np.abs(skew - 0.5 * div).max())
    if max(sym_residual, skew_residual_) > tol * scale:
        raise ConsistencyError(
            f"Ricci split disagrees with Ric^g - S/4 and div(T)/2 (sym {sym_residual:.3e}, skew {skew_residual_:.3e})",
            residual=max(sym_residual, skew_residual_),
        )
    return RicciSplit(TensorAtOrigin(sym, (0, 2), "sym_ricci"), TensorAtOrigin(skew, (0, 2), "skew_ricci"),
                      ric_g, S, div, sym_residual, skew_residual_)


def torsion_cyclic_sum(T: np.ndarray) -> np.ndarray:
    """T(Z, T(X, Y)) + T(X, T(Y, Z)) + T(Y, T(Z, X)) with axes (Z, X, Y, output)."""
    cyc = np.einsum("xyp,zpk->zxyk", T, T, optimize=True)
    cyc += np.einsum("yzp,xpk->zxyk", T, T, optimize=True)
    cyc += np.einsum("zxp,ypk->zxyk", T, T, optimize=True)
    return cyc


def nabla_T(alpha: AlphaMap, alpha_g: AlphaMap, tol: Optional[float] = None) -> TensorAtOrigin:
    """nabla T computed directly and through nabla^g T plus half the cyclic T o T sum.

    Raises:
        ConsistencyError: the two computations disagree
    """
    tol = tolerance("exact") if tol is None else tol
    T = torsion(alpha).array
    direct = covariant_derivative(alpha, T).array
    via_levi_civita = covariant_derivative(alpha_g, T).array + 0.5 * torsion_cyclic_sum(T)
    scale = max(1.0, float(np.abs(T).max(initial=0.0))) ** 2
    residual = float(np.abs(direct - via_levi_civita).max(initial=0.0))
    if residual > tol * scale:
        raise ConsistencyError(f"nabla T disagrees between the two formulas ({residual:.3e})", residual=residual)
    logger.debug(f"nabla T: max {np.abs(direct).max(initial=0.0):.3e}, cross-check {residual:.2e}")
    return TensorAtOrigin(direct, (1, 3), "nabla_T")


def reeb_derivatives(alpha: AlphaMap, xi: np.ndarray) -> np.ndarray:
    """(nabla_Z xi_i) for i = 1..3, shape (3, Z, output)."""
    return np.stack([covariant_derivative(alpha, xi[i]).array for i in range(len(xi))])

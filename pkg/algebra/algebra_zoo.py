# algebra/algebra_zoo.py
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from algebra.composition import (build_complexes, build_octonions, build_quaternions, build_reals,
                                  octonion_split_derivations)
from algebra.jordan import build_jordan
from algebra.lie_core import BilinearForm, LieAlgebra, Subspace, matrix_algebra_from_generators
from algebra.tits import build_tits
from utils.config_loader import tolerance
from utils.exceptions import ConstructionError, UsageError
from utils.space_id import SpaceId, parse_space_id

logger = logging.getLogger(__name__)

EPSILON = np.zeros((3, 3, 3))
for _a, _b, _c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    EPSILON[_a, _b, _c] = 1.0
    EPSILON[_b, _a, _c] = -1.0

EXCEPTIONAL_LABELS = {1: "G2/Sp(1)", 2: "F4/Sp(3)", 3: "E6/SU(6)", 4: "E7/Spin(12)", 5: "E8/E7"}
EXCEPTIONAL_NAMES = {1: "g2", 2: "f4", 3: "e6", 4: "e7", 5: "e8"}


@dataclass(frozen=True)
class ReductivePair:
    """Reductive decomposition g = h + m with m ordered as (xi_1, xi_2, xi_3, horizontal).

    Attributes:
        family: "Sp", "SO", "SU", "G2" .. "E8", or "toy"
        size: family parameter (n, k, m or the exceptional row)
        n: quaternionic dimension, dim m = 4n + 3 (None for toys)
        g: the Lie algebra
        h: isotropy subalgebra as a Subspace of g
        m: complement as a Subspace of g, g-orthonormal rows
        metric: Gram matrix of the normal metric on the m basis
        m_bracket: [x_i, x_j]_m = sum_k m_bracket[i, j, k] x_k
        h_bracket: [x_i, x_j]_h = sum_a h_bracket[i, j, a] A_a
        h_action: [A_a, x_i] = sum_k h_action[a, i, k] x_k
        residuals: structural identities checked at construction
    """
    family: str
    size: int
    n: Optional[int]
    g: LieAlgebra
    h: Subspace
    m: Subspace
    metric: BilinearForm
    m_bracket: np.ndarray
    h_bracket: np.ndarray
    h_action: np.ndarray
    label: str
    large: bool = False
    sasakian: bool = True
    residuals: Dict[str, float] = field(default_factory=dict)
    m_labels: List[str] = field(default_factory=list)
    phi0_element: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None
    decomposition: tuple = None

    @property
    def dim_m(self) -> int:
        return self.m.dim

    @property
    def dim_h(self) -> int:
        return self.h.dim

    @property
    def space_id(self) -> str:
        if self.family in ("Sp", "SO", "SU"):
            return f"{self.family.lower()}:{self.size}"
        if self.family == "toy":
            return f"toy:{self.label}"
        return self.family.lower()

    def decompose(self, vectors: np.ndarray):
        """Split g-coordinate rows into (h coordinates, m coordinates)."""
        vectors = np.atleast_2d(vectors)
        coords = lu_solve(self.decomposition, vectors.T).T
        return coords[:, :self.dim_h], coords[:, self.dim_h:]

    def dims(self) -> dict:
        return {"g": self.g.dim, "h": self.dim_h, "m": self.dim_m}


def _split_brackets(g: LieAlgebra, H: np.ndarray, M: np.ndarray):
    N, dh, dm = g.dim, len(H), len(M)
    full = np.vstack([H, M]) if dh else M
    if full.shape[0] != N:
        raise ConstructionError(f"dim h + dim m = {full.shape[0]} but dim g = {N}", identity="direct_sum")
    if np.linalg.matrix_rank(full) != N:
        raise ConstructionError("h and m do not span g", identity="direct_sum")
    lu = lu_factor(full.T)

    mm = lu_solve(lu, g.bracket_many(M, M).reshape(-1, N).T).T.reshape(dm, dm, N)
    h_bracket, m_bracket = mm[..., :dh], mm[..., dh:]
    if dh:
        hm = lu_solve(lu, g.bracket_many(H, M).reshape(-1, N).T).T.reshape(dh, dm, N)
        reductivity = float(np.abs(hm[..., :dh]).max())
        h_action = hm[..., dh:]
    else:
        reductivity = 0.0
        h_action = np.zeros((0, dm, dm))
    return lu, m_bracket, h_bracket, h_action, reductivity


def _assemble(family: str, size: int, n: int, g: LieAlgebra, H: np.ndarray, xi: np.ndarray,
              horizontal: np.ndarray, label: str, m_labels: List[str], large: bool = False,
              phi0_element: np.ndarray = None, sigma_g: np.ndarray = None) -> ReductivePair:
    tol = tolerance("exact")
    N = g.dim
    H = np.asarray(H, dtype=float).reshape(-1, N)
    kappa = g.killing_form().matrix

    if len(horizontal):
        gram = -(horizontal @ kappa @ horizontal.T) / (8.0 * (n + 2))
        try:
            L = np.linalg.cholesky(0.5 * (gram + gram.T))
        except np.linalg.LinAlgError:
            raise ConstructionError(f"{label}: -kappa is not positive on the horizontal part", identity="metric")
        horizontal = np.linalg.solve(L, horizontal)
    M = np.vstack([xi, horizontal]) if len(horizontal) else np.asarray(xi, dtype=float)
    lu, m_bracket, h_bracket, h_action, reductivity = _split_brackets(g, H, M)
    dm = len(M)

    residuals = {"reductivity": reductivity}
    residuals["jacobi"] = g.check_jacobi(tol=tol, exhaustive=True).max_violation
    residuals["h_commutes_sp1"] = float(np.abs(g.bracket_many(H, xi)).max(initial=0.0)) if len(H) else 0.0
    residuals["killing_orthogonality"] = float(np.abs(H @ kappa @ M.T).max(initial=0.0)) if len(H) else 0.0
    residuals["sp1_structure"] = max(
        float(np.abs(m_bracket[:3, :3, :3] - 2.0 * EPSILON).max()),
        float(np.abs(m_bracket[:3, :3, 3:]).max(initial=0.0)),
        float(np.abs(h_bracket[:3, :3]).max(initial=0.0)),
    )
    kxi = xi @ kappa @ xi.T
    residuals["killing_xi"] = float(np.abs(kxi - (-8.0 - 4.0 * n) * np.eye(3)).max())
    ad2 = 0.0
    if dm > 3:
        for i in range(3):
            A = m_bracket[i, 3:, 3:].T
            leak = max(float(np.abs(m_bracket[i, 3:, :3]).max()), float(np.abs(h_bracket[i, 3:]).max(initial=0.0)))
            ad2 = max(ad2, float(np.abs(A @ A + np.eye(dm - 3)).max()), leak)
    residuals["ad2_xi"] = ad2

    metric = np.zeros((dm, dm))
    metric[:3, :3] = -kxi / (4.0 * (n + 2))
    if dm > 3:
        metric[3:, 3:] = -(horizontal @ kappa @ horizontal.T) / (8.0 * (n + 2))
    residuals["metric_orthonormal"] = float(np.abs(metric - np.eye(dm)).max())

    failed = {k: v for k, v in residuals.items() if v > tol}
    if failed:
        key = max(failed, key=failed.get)
        raise ConstructionError(f"{label}: identity {key} fails with residual {failed[key]:.3e}",
                                identity=key, residual=failed[key])

    sigma = None
    if sigma_g is not None:
        images = (sigma_g @ M.T).T
        coords = lu_solve(lu, images.T).T
        h_part, sigma_m = coords[:, :len(H)], coords[:, len(H):]
        residuals["sigma_preserves_m"] = float(np.abs(h_part).max(initial=0.0))
        sigma = sigma_m.T

    pair = ReductivePair(
        family=family, size=size, n=n, g=g,
        h=Subspace(g, H, name="h"), m=Subspace(g, M, name="m"),
        metric=BilinearForm(metric), m_bracket=m_bracket, h_bracket=h_bracket, h_action=h_action,
        label=label, large=large, residuals=residuals, m_labels=m_labels,
        phi0_element=phi0_element, sigma=sigma, decomposition=lu,
    )
    logger.info(f"Built {label}: dim g={g.dim}, h={pair.dim_h}, m={dm} (n={n}), "
                f"max residual {max(residuals.values()):.2e}")
    return pair


def _quaternion_block(q) -> np.ndarray:
    a, b, c, d = q
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])


def _quaternionic_matrix(entries: dict, size: int) -> np.ndarray:
    X = np.zeros((2 * size, 2 * size), dtype=complex)
    for (p, q), value in entries.items():
        X[2 * p:2 * p + 2, 2 * q:2 * q + 2] += _quaternion_block(value)
    return X


def _sp_pair(n: int) -> ReductivePair:
    size = n + 1
    units = np.eye(4)
    names = ["1", "i", "j", "k"]
    conj = np.diag([1.0, -1.0, -1.0, -1.0])
    h_mats, xi_mats, hor_mats, hor_labels = [], [], [], []
    for p in range(n):
        for u in range(1, 4):
            h_mats.append(_quaternionic_matrix({(p, p): units[u]}, size))
        for q in range(p + 1, n):
            for u in range(4):
                h_mats.append(_quaternionic_matrix({(p, q): units[u], (q, p): -conj @ units[u]}, size))
    for u in range(1, 4):
        xi_mats.append(_quaternionic_matrix({(n, n): units[u]}, size))
    for p in range(n):
        for z in range(4):
            hor_mats.append(_quaternionic_matrix({(p, n): units[z], (n, p): -conj @ units[z]}, size))
            hor_labels.append(f"z{p + 1}.{names[z]}")

    g = matrix_algebra_from_generators(np.array(h_mats + xi_mats + hor_mats), name=f"sp({size})")
    dh = len(h_mats)
    eye = np.eye(g.dim)
    sigma = np.diag([1.0] * (2 * n) + [-1.0, -1.0]).astype(complex)
    sigma_g = g.coordinates(np.array([sigma @ X @ sigma for X in g.matrices])).T
    return _assemble("Sp", n, n, g, eye[:dh], eye[dh:dh + 3], eye[dh + 3:],
                     label=f"Sp({size})/Sp({n})", m_labels=["xi1", "xi2", "xi3"] + hor_labels, sigma_g=sigma_g)


def _imaginary_quaternion_matrix(a, sign: int) -> np.ndarray:
    """4x4 matrices of left (sign=+1, I+) or right (sign=-1, I-) multiplication structure."""
    a1, a2, a3 = a
    if sign > 0:
        return np.array([[0, -a1, -a2, -a3], [a1, 0, -a3, a2], [a2, a3, 0, -a1], [a3, -a2, a1, 0]], dtype=float)
    return np.array([[0, a1, a2, a3], [-a1, 0, -a3, a2], [-a2, a3, 0, -a1], [-a3, -a2, a1, 0]], dtype=float)


def _so_pair(k: int) -> ReductivePair:
    n = k - 4
    h_mats, xi_mats, hor_mats, hor_labels = [], [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            X = np.zeros((k, k))
            X[j, i], X[i, j] = 1.0, -1.0
            h_mats.append(X)
    for e in np.eye(3):
        X = np.zeros((k, k))
        X[n:, n:] = _imaginary_quaternion_matrix(e, -1)
        h_mats.append(X)
    for e in np.eye(3):
        X = np.zeros((k, k))
        X[n:, n:] = _imaginary_quaternion_matrix(e, +1)
        xi_mats.append(X)
    for p in range(n):
        for c in range(4):
            X = np.zeros((k, k))
            X[p, n + c], X[n + c, p] = 1.0, -1.0
            hor_mats.append(X)
            hor_labels.append(f"D{p + 1}{c + 1}")
    g = matrix_algebra_from_generators(np.array(h_mats + xi_mats + hor_mats), name=f"so({k})")
    dh = len(h_mats)
    eye = np.eye(g.dim)
    return _assemble("SO", k, n, g, eye[:dh], eye[dh:dh + 3], eye[dh + 3:],
                     label=f"SO({k})/(SO({n})xSp(1))", m_labels=["xi1", "xi2", "xi3"] + hor_labels)


def _su_pair(m: int) -> ReductivePair:
    n = m - 2
    last = m - 1

    def unit(entries):
        X = np.zeros((m, m), dtype=complex)
        for (p, q), v in entries.items():
            X[p, q] += v
        return X

    def embed(B):
        X = np.zeros((m, m), dtype=complex)
        X[1:last, 1:last] = B
        X[0, 0] = X[last, last] = -np.trace(B) / 2.0
        return X

    h_mats = []
    for a in range(n):
        B = np.zeros((n, n), dtype=complex)
        B[a, a] = 1j
        h_mats.append(embed(B))
        for b in range(a + 1, n):
            B = np.zeros((n, n), dtype=complex)
            B[a, b], B[b, a] = 1.0, -1.0
            h_mats.append(embed(B))
            B = np.zeros((n, n), dtype=complex)
            B[a, b], B[b, a] = 1j, 1j
            h_mats.append(embed(B))
    xi_mats = [
        unit({(0, 0): 1j, (last, last): -1j}),
        unit({(0, last): -1.0, (last, 0): 1.0}),
        unit({(0, last): -1j, (last, 0): -1j}),
    ]
    hor_mats, hor_labels = [], []
    for k in range(1, last):
        hor_mats.append(unit({(k, last): 1.0, (last, k): -1.0}))
        hor_mats.append(unit({(k, last): 1j, (last, k): 1j}))
        hor_labels += [f"z1_{k}.re", f"z1_{k}.im"]
    for k in range(1, last):
        hor_mats.append(unit({(0, k): 1.0, (k, 0): -1.0}))
        hor_mats.append(unit({(0, k): 1j, (k, 0): 1j}))
        hor_labels += [f"z2_{k}.re", f"z2_{k}.im"]

    g = matrix_algebra_from_generators(np.array(h_mats + xi_mats + hor_mats), name=f"su({m})")
    dh = len(h_mats)
    eye = np.eye(g.dim)
    h0 = np.diag([-n * 1j / 2.0] + [1j] * n + [-n * 1j / 2.0]) / (1.0 + n / 2.0)
    return _assemble("SU", m, n, g, eye[:dh], eye[dh:dh + 3], eye[dh + 3:],
                     label=f"SU({m})/S(U({n})xU(1))", m_labels=["xi1", "xi2", "xi3"] + hor_labels,
                     phi0_element=g.coordinates(h0))


def _exceptional_pair(s: int) -> ReductivePair:
    O = build_octonions()
    jordan_base = {1: None, 2: "R", 3: "C", 4: "H", 5: "O"}[s]
    if jordan_base is None:
        J = build_jordan(None)
    else:
        C = {"R": build_reals, "C": build_complexes, "H": build_quaternions, "O": build_octonions}[jordan_base]()
        J = build_jordan(C)
    minus, plus, mixed = octonion_split_derivations(O)
    der_basis = np.concatenate([minus, plus, mixed])
    g, layout = build_tits(O, J, der_basis=der_basis, name=EXCEPTIONAL_NAMES[s])
    eye = np.eye(g.dim)
    kj0 = layout.dim_j0
    quaternion_part = [layout.tensor_index(a, q) for a in range(3) for q in range(kj0)]
    l_part = [layout.tensor_index(a, q) for a in range(3, 7) for q in range(kj0)]
    h_idx = list(range(0, 3)) + list(range(layout.der_j.start, layout.der_j.stop)) + quaternion_part
    xi_idx = list(range(3, 6))
    hor_idx = list(range(6, 14)) + l_part
    n = (len(xi_idx) + len(hor_idx) - 3) // 4
    labels = ["xi1", "xi2", "xi3"] + [f"D{i + 1}" for i in range(8)] + \
        [f"{O.labels[a + 1]}x{q + 1}" for a in range(3, 7) for q in range(kj0)]
    family = EXCEPTIONAL_NAMES[s].upper()
    return _assemble(family, s, n, g, eye[h_idx], eye[xi_idx], eye[hor_idx],
                     label=EXCEPTIONAL_LABELS[s], m_labels=labels, large=s >= 4)


def build_pair(family: Union[str, SpaceId], size: Optional[int] = None, allow_n0: bool = False) -> ReductivePair:
    """Build the reductive pair of a homogeneous 3-Sasakian space.

    Args:
        family: "Sp", "SO", "SU", an exceptional tag ("G2" .. "E8"), a space id
            string such as "sp:1", or a parsed SpaceId
        size: n for Sp, k for SO, m for SU; ignored for exceptional tags
        allow_n0: permit Sp with n = 0

    Raises:
        UsageError: unknown family or size out of range
    """
    if isinstance(family, SpaceId):
        space = family
    elif size is None:
        space = parse_space_id(family, allow_n0=allow_n0)
    else:
        space = parse_space_id(f"{family.lower()}:{size}" if family.lower() in ("sp", "so", "su") else family,
                               allow_n0=allow_n0)
    if space.family == "Sp":
        return _sp_pair(space.size)
    if space.family == "SO":
        return _so_pair(space.size)
    if space.family == "SU":
        return _su_pair(space.size)
    return _exceptional_pair(space.size)


def build_toy_pair(kind: str, dim: int = 3) -> ReductivePair:
    """Non-Sasakian pairs for sanity checks: "abelian" (h = 0) or "euclidean" (so(3) + R^3)."""
    if kind == "abelian":
        g = LieAlgebra([], [], [], [], dim, name=f"R^{dim}")
        H, M = np.zeros((0, dim)), np.eye(dim)
    elif kind == "euclidean":
        dim = 3
        c = np.zeros((6, 6, 6))
        c[:3, :3, :3] = EPSILON
        c[:3, 3:, 3:] = EPSILON
        c[3:, :3, 3:] = -EPSILON.transpose(1, 0, 2)
        g = LieAlgebra.from_dense(c, labels=["L1", "L2", "L3", "P1", "P2", "P3"], name="e(3)")
        H, M = np.eye(6)[:3], np.eye(6)[3:]
    else:
        raise UsageError(f"Unknown toy pair {kind!r}")
    lu, m_bracket, h_bracket, h_action, reductivity = _split_brackets(g, H, M)
    return ReductivePair(
        family="toy", size=dim, n=None, g=g, h=Subspace(g, H, name="h"), m=Subspace(g, M, name="m"),
        metric=BilinearForm(np.eye(dim)), m_bracket=m_bracket, h_bracket=h_bracket, h_action=h_action,
        label=kind, sasakian=False, residuals={"reductivity": reductivity},
        m_labels=[f"e{i + 1}" for i in range(dim)], decomposition=lu,
    )


@dataclass
class ProjectiveReport:
    passed: bool
    max_residual: float
    involution_residual: float
    checked: int

    def to_dict(self) -> dict:
        return {"pass": self.passed, "max_residual": self.max_residual,
                "involution_residual": self.involution_residual, "checked": self.checked}


def transform_bilinear(alpha: np.ndarray, S: np.ndarray) -> np.ndarray:
    """S alpha(S^-1 X, S^-1 Y) for an invertible S acting on m coordinates."""
    Sinv = np.linalg.inv(S)
    return np.einsum("ai,bj,kc,...abc->...ijk", Sinv, Sinv, S, alpha, optimize=True)


def check_projective_invariance(pair: ReductivePair, basis: Optional[np.ndarray] = None,
                                tol: Optional[float] = None) -> ProjectiveReport:
    """Check that Ad(sigma), sigma = diag(I_n, -1), fixes every invariant bilinear map.

    Args:
        pair: an Sp pair
        basis: stack of invariant bilinear maps ``(d, m, m, m)``; computed when omitted
    """
    if pair.family != "Sp" or pair.sigma is None:
        raise UsageError("The projective check applies to the Sp family only")
    tol = tolerance("exact") if tol is None else tol
    if basis is None:
        from equivariant.hom_spaces import dim_hom_bilinear
        basis = dim_hom_bilinear(pair).basis
    S = pair.sigma
    involution = float(np.abs(S @ S - np.eye(pair.dim_m)).max())
    moved = transform_bilinear(basis, S)
    residual = float(np.abs(moved - basis).max(initial=0.0))
    logger.info(f"Ad(sigma) on {pair.label}: {len(basis)} maps, residual {residual:.2e}")
    return ProjectiveReport(passed=residual <= tol and involution <= tol, max_residual=residual,
                            involution_residual=involution, checked=len(basis))

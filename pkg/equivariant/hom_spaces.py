# equivariant/hom_spaces.py
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import permutations
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse

from algebra.algebra_zoo import ReductivePair
from algebra.lie_core import reduce_to_basis
from utils.config_loader import settings, tolerance
from utils.exceptions import BudgetExceededError, ConsistencyError, UsageError

logger = logging.getLogger(__name__)

VECTOR, DUAL = 1, -1

# slot types and the antisymmetric slot group of each kind
KINDS = {
    "bilinear": {"slots": (DUAL, DUAL, VECTOR), "antisym": (), "source": "m⊗m", "target": "m"},
    "lambda2": {"slots": (DUAL, VECTOR, VECTOR), "antisym": (1, 2), "source": "m", "target": "Λ²m"},
    "lambda3": {"slots": (DUAL, DUAL, DUAL), "antisym": (0, 1, 2), "source": "Λ³m", "target": "ℝ"},
}


@dataclass
class HomSpaceResult:
    """Invariant tensors of one kind on one pair.

    ``basis`` has shape ``(dimension, m, m, m)``; the slot convention is
    ``basis[d, i, j, k]`` = k-th coordinate of alpha_d(x_i, x_j) for bilinear maps,
    the (j, k) entry of the 2-vector image of x_i for lambda2, and
    omega_d(x_i, x_j, x_k) for lambda3.
    """
    kind: str
    source: str
    target: str
    space: str
    dimension: int
    basis: np.ndarray
    gap: Optional[float]
    sigma_max: float
    unknowns: int
    reduced_unknowns: int
    rows: int
    equivariance_residual: float
    method: str

    @property
    def clean(self) -> bool:
        return self.gap is None or self.gap >= tolerance("min_gap")

    def packed_basis(self) -> np.ndarray:
        """Basis in the independent coordinates, antisymmetric groups ordered lexicographically."""
        dm = self.basis.shape[1] if self.dimension else 0
        if self.kind == "bilinear" or not self.dimension:
            return self.basis.reshape(self.dimension, -1)
        if self.kind == "lambda2":
            j, k = np.triu_indices(dm, 1)
            return self.basis[:, :, j, k].reshape(self.dimension, -1)
        triples = _strict_triples(dm)
        return self.basis[:, triples[:, 0], triples[:, 1], triples[:, 2]]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "source": self.source,
            "target": self.target,
            "space": self.space,
            "dimension": self.dimension,
            "gap": None if self.gap is None or not np.isfinite(self.gap) else float(self.gap),
            "sigma_max": float(self.sigma_max),
            "unknowns": self.unknowns,
            "reduced_unknowns": self.reduced_unknowns,
            "rows": self.rows,
            "equivariance_residual": float(self.equivariance_residual),
            "method": self.method,
        }


def _strict_triples(dm: int) -> np.ndarray:
    i, j, k = np.meshgrid(np.arange(dm), np.arange(dm), np.arange(dm), indexing="ij")
    mask = (i < j) & (j < k)
    return np.stack([i[mask], j[mask], k[mask]], axis=1)


def unknown_count(kind: str, dim_m: int) -> int:
    if kind == "bilinear":
        return dim_m ** 3
    if kind == "lambda2":
        return dim_m * comb(dim_m, 2)
    if kind == "lambda3":
        return comb(dim_m, 3)
    raise UsageError(f"Unknown hom-space kind {kind!r}; expected one of {sorted(KINDS)}")


def check_budget(label: str, dim_m: int, large: bool, kind: str, force: bool = False,
                 budget: Optional[int] = None) -> int:
    """Refuse systems above the unknown-count budget, and lambda3 on e7/e8, unless forced.

    Raises:
        BudgetExceededError: the system is refused
    """
    config = settings()["equivariant"]
    budget = int(config["budget"]) if budget is None else int(budget)
    unknowns = unknown_count(kind, dim_m)
    if force:
        return unknowns
    if unknowns > budget:
        raise BudgetExceededError(
            f"{kind} on {label} needs {unknowns:,} unknowns, above the budget of {budget:,} "
            f"(pass --force or raise SASAKI_BUDGET)", unknowns=unknowns, budget=budget)
    if kind == "lambda3" and large and config["refuse_large_lambda3"]:
        raise BudgetExceededError(
            f"lambda3 on {label} ({unknowns:,} unknowns) is refused by default; pass --force to run it",
            unknowns=unknowns, budget=budget)
    return unknowns


def _canonicalize(tuples: np.ndarray, group: Tuple[int, ...]):
    """Sort the antisymmetric group of each tuple; return (tuples, sign), sign 0 for repeated indices."""
    sign = np.ones(len(tuples))
    if len(group) < 2:
        return tuples, sign
    cols = list(group)
    block = tuples[:, cols]
    inversions = np.zeros(len(tuples), dtype=int)
    for a in range(len(cols)):
        for b in range(a + 1, len(cols)):
            inversions += block[:, a] > block[:, b]
    block = np.sort(block, axis=1)
    repeated = np.any(block[:, 1:] == block[:, :-1], axis=1)
    sign = np.where(inversions % 2, -1.0, 1.0)
    sign[repeated] = 0.0
    out = tuples.copy()
    out[:, cols] = block
    return out, sign


def _zero_weight_tuples(mu: np.ndarray, kind: str, rtol: float) -> np.ndarray:
    spec = KINDS[kind]
    dm = len(mu)
    s0, s1, s2 = spec["slots"]
    total = s0 * mu[:, None, None] + s1 * mu[None, :, None] + s2 * mu[None, None, :]
    i, j, k = np.meshgrid(np.arange(dm), np.arange(dm), np.arange(dm), indexing="ij")
    mask = np.abs(total) <= rtol * max(1.0, float(np.abs(mu).max(initial=0.0)))
    if kind == "lambda2":
        mask &= j < k
    elif kind == "lambda3":
        mask &= (i < j) & (j < k)
    return np.stack([i[mask], j[mask], k[mask]], axis=1)


def _constraint_entries(At: np.ndarray, taus: np.ndarray, kind: str, offset: int, cutoff: float = 1e-14):
    """Row keys, columns and coefficients of one generator's constraints on the zero-weight unknowns."""
    spec = KINDS[kind]
    dm = At.shape[0]
    Z = len(taus)
    columns = np.repeat(np.arange(Z), dm)
    keys, cols, data = [], [], []
    for s, slot in enumerate(spec["slots"]):
        if slot == VECTOR:
            coef = At[:, taus[:, s]].T
        else:
            coef = -At[taus[:, s], :]
        moved = np.repeat(taus, dm, axis=0)
        moved[:, s] = np.tile(np.arange(dm), Z)
        moved, sign = _canonicalize(moved, spec["antisym"])
        values = coef.reshape(-1) * sign
        keep = np.abs(values) > cutoff
        moved = moved[keep]
        keys.append(offset + (moved[:, 0] * dm + moved[:, 1]) * dm + moved[:, 2])
        cols.append(columns[keep])
        data.append(values[keep])
    return np.concatenate(keys), np.concatenate(cols), np.concatenate(data)


def _torus(pair: ReductivePair, rng: np.random.Generator):
    dh = pair.dim_h
    actions = np.transpose(pair.h_action, (0, 2, 1))  # D_a[k, i] = h_action[a, i, k]
    weights = rng.standard_normal(dh)
    D = np.einsum("a,akl->kl", weights, actions)
    skew = float(np.abs(D + D.T).max(initial=0.0))
    if skew > tolerance("chained") * max(1.0, float(np.abs(D).max(initial=0.0))):
        raise UsageError(f"Isotropy action on {pair.label} is not skew ({skew:.2e}); an orthonormal m basis is required")
    mu, U = np.linalg.eigh(1j * D)
    return actions, mu, U


def _singular_split(M: sparse.csr_matrix, rank_rtol: float, gram_rtol: float, dense_entries: float):
    """Kernel vectors of M and (sigma_max, smallest kept, largest dropped, method)."""
    rows, Z = M.shape
    if rows == 0:
        return np.eye(Z, dtype=complex), 0.0, np.inf, 0.0, "empty"
    if rows * Z <= dense_entries:
        _, s, vh = np.linalg.svd(M.toarray(), full_matrices=True)
        sigma = np.zeros(Z)
        sigma[:len(s)] = s
        sigma_max = float(sigma.max(initial=0.0))
        dropped = sigma <= rank_rtol * max(sigma_max, 1e-300)
        kernel = vh.conj().T[:, dropped]
        kept = sigma[~dropped]
        return kernel, sigma_max, float(kept.min(initial=np.inf)), float(sigma[dropped].max(initial=0.0)), "svd"

    gram = (M.conj().T @ M).toarray()
    eig, V = np.linalg.eigh(gram)
    sigma = np.sqrt(np.clip(eig, 0.0, None))
    sigma_max = float(sigma.max(initial=0.0))
    dropped = sigma <= gram_rtol * max(sigma_max, 1e-300)
    kernel = V[:, dropped]
    kept = sigma[~dropped]
    refined = np.linalg.svd(M @ kernel, compute_uv=False) if kernel.shape[1] else np.zeros(0)
    return kernel, sigma_max, float(kept.min(initial=np.inf)), float(refined.max(initial=0.0)), "gram"


def _scatter(kernel: np.ndarray, taus: np.ndarray, kind: str, dm: int) -> np.ndarray:
    group = KINDS[kind]["antisym"]
    d = kernel.shape[1]
    full = np.zeros((d, dm, dm, dm), dtype=complex)
    if not group:
        full[:, taus[:, 0], taus[:, 1], taus[:, 2]] = kernel.T
        return full
    base = list(group)
    for perm in permutations(range(len(base))):
        inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
        sign = -1.0 if inversions % 2 else 1.0
        idx = taus.copy()
        idx[:, base] = taus[:, [base[p] for p in perm]]
        full[:, idx[:, 0], idx[:, 1], idx[:, 2]] = sign * kernel.T
    return full


def _to_real_basis(full: np.ndarray, U: np.ndarray, kind: str) -> np.ndarray:
    F = full
    for s, slot in enumerate(KINDS[kind]["slots"]):
        change = U if slot == VECTOR else U.conj()
        F = np.moveaxis(np.tensordot(F, change, axes=([s + 1], [1])), -1, s + 1)
    d = F.shape[0]
    stacked = np.concatenate([F.real, F.imag]).reshape(2 * d, -1)
    basis = reduce_to_basis(stacked, rtol=1e-6)
    if len(basis) != d:
        raise ConsistencyError(f"Real invariant span has rank {len(basis)}, complex kernel has dimension {d}")
    return basis.reshape((d,) + F.shape[1:])


def _standard_basis(kind: str, dm: int) -> np.ndarray:
    if kind == "bilinear":
        return np.eye(dm ** 3).reshape(-1, dm, dm, dm)
    taus = _zero_weight_tuples(np.zeros(dm), kind, 1.0)
    full = _scatter(np.eye(len(taus)), taus, kind, dm).real
    norms = np.sqrt(np.einsum("dijk,dijk->d", full, full))
    return full / norms[:, None, None, None]


def tensor_action(tensor: np.ndarray, action: np.ndarray, kind: str) -> np.ndarray:
    """Infinitesimal action of one isotropy generator on stacked tensors ``(d, m, m, m)``.

    Args:
        tensor: stacked tensors of the given kind
        action: ``h_action[a]``, so that [A_a, x_i] = sum_k action[i, k] x_k
    """
    out = np.zeros_like(tensor)
    for s, slot in enumerate(KINDS[kind]["slots"]):
        if slot == VECTOR:
            out += np.moveaxis(np.tensordot(tensor, action, axes=([s + 1], [0])), -1, s + 1)
        else:
            out -= np.moveaxis(np.tensordot(tensor, action, axes=([s + 1], [1])), -1, s + 1)
    return out


def max_tensor_residual(pair: ReductivePair, basis: np.ndarray, kind: str) -> float:
    if not len(basis) or not pair.dim_h:
        return 0.0
    return max(float(np.abs(tensor_action(basis, pair.h_action[a], kind)).max()) for a in range(pair.dim_h))


def invariant_tensors(pair: ReductivePair, kind: str, force: bool = False, seed: Optional[int] = None,
                      budget: Optional[int] = None) -> HomSpaceResult:
    """Basis of the isotropy-invariant tensors of ``kind`` on m.

    A generic torus element of h fixes the zero-weight tuples in its eigenbasis; the
    remaining generators (all of them for small h, a few random combinations otherwise)
    give a sparse complex system whose kernel is read off from its singular values.

    Raises:
        UsageError: unknown kind, or m is not orthonormal for the isotropy action
        BudgetExceededError: the system exceeds the budget and ``force`` is not set
        ConsistencyError: the real basis fails to reproduce the kernel or the action check
    """
    if kind not in KINDS:
        raise UsageError(f"Unknown hom-space kind {kind!r}; expected one of {sorted(KINDS)}")
    config = settings()["equivariant"]
    unknowns = check_budget(pair.label, pair.dim_m, pair.large, kind, force=force, budget=budget)
    spec = KINDS[kind]
    dm, dh = pair.dim_m, pair.dim_h

    if dh == 0:
        basis = _standard_basis(kind, dm)
        logger.info(f"{kind} on {pair.label}: trivial isotropy, dimension {len(basis)}")
        return HomSpaceResult(kind=kind, source=spec["source"], target=spec["target"], space=pair.space_id,
                              dimension=len(basis), basis=basis, gap=None, sigma_max=0.0, unknowns=unknowns,
                              reduced_unknowns=unknowns, rows=0, equivariance_residual=0.0, method="trivial")

    rng = np.random.default_rng(config["weight_seed"] if seed is None else seed)
    actions, mu, U = _torus(pair, rng)
    taus = _zero_weight_tuples(mu, kind, float(config["zero_weight_rtol"]))
    Z = len(taus)
    logger.debug(f"{kind} on {pair.label}: {Z} zero-weight unknowns of {unknowns}")

    if dh <= 4:
        generators = list(actions)
    else:
        combos = rng.standard_normal((int(config["random_generators"]), dh))
        generators = list(np.einsum("ga,akl->gkl", combos, actions))
    rotated = [U.conj().T @ D @ U for D in generators]

    block = dm ** 3
    with ThreadPoolExecutor(max_workers=int(config["max_workers"])) as executor:
        futures = [executor.submit(_constraint_entries, At, taus, kind, g * block) for g, At in enumerate(rotated)]
        parts = [future.result(timeout=settings()["sweep"]["timeout"]) for future in futures]
    keys = np.concatenate([p[0] for p in parts])
    cols = np.concatenate([p[1] for p in parts])
    data = np.concatenate([p[2] for p in parts])
    unique_keys, rows = np.unique(keys, return_inverse=True)
    M = sparse.coo_matrix((data, (rows, cols)), shape=(len(unique_keys), Z)).tocsr()
    logger.debug(f"{kind} on {pair.label}: constraint matrix {M.shape}, {M.nnz} nonzeros")

    kernel, sigma_max, kept_min, dropped_max, method = _singular_split(
        M, tolerance("rank_rtol"), float(config["gram_rtol"]), float(config["dense_entries"]))
    d = kernel.shape[1]
    gap = np.inf if dropped_max == 0.0 else kept_min / dropped_max
    if d == Z:
        gap = None

    basis = _to_real_basis(_scatter(kernel, taus, kind, dm), U, kind) if d else np.zeros((0, dm, dm, dm))
    residual = max_tensor_residual(pair, basis, kind)
    limit = tolerance("exact") * max(1.0, float(np.abs(pair.h_action).max()))
    if residual > limit:
        raise ConsistencyError(f"{kind} basis on {pair.label} fails the isotropy action check ({residual:.2e})",
                               residual=residual)

    result = HomSpaceResult(kind=kind, source=spec["source"], target=spec["target"], space=pair.space_id,
                            dimension=d, basis=basis, gap=gap, sigma_max=sigma_max, unknowns=unknowns,
                            reduced_unknowns=Z, rows=M.shape[0], equivariance_residual=residual, method=method)
    if not result.clean:
        logger.warning(f"{kind} on {pair.label}: singular-value gap {gap:.2e} below {tolerance('min_gap'):.0e}")
    logger.info(f"dim Hom_h({spec['source']}, {spec['target']}) on {pair.label} = {d}")
    return result


def dim_hom_bilinear(pair: ReductivePair, force: bool = False, seed: Optional[int] = None) -> HomSpaceResult:
    """Invariant bilinear maps m x m -> m, i.e. Nomizu maps of invariant connections."""
    return invariant_tensors(pair, "bilinear", force=force, seed=seed)


def dim_hom_m_to_lambda2(pair: ReductivePair, force: bool = False, seed: Optional[int] = None) -> HomSpaceResult:
    return invariant_tensors(pair, "lambda2", force=force, seed=seed)


def dim_hom_lambda3(pair: ReductivePair, force: bool = False, seed: Optional[int] = None) -> HomSpaceResult:
    """Invariant 3-forms on m, i.e. lowered torsions of invariant skew-torsion connections."""
    return invariant_tensors(pair, "lambda3", force=force, seed=seed)


DIM_FUNCTIONS = {"bilinear": dim_hom_bilinear, "lambda2": dim_hom_m_to_lambda2, "lambda3": dim_hom_lambda3}


def dim_hom_all(pair: ReductivePair, kinds: Optional[List[str]] = None, force: bool = False,
                seed: Optional[int] = None) -> Dict[str, HomSpaceResult]:
    kinds = kinds or list(KINDS)
    return {kind: DIM_FUNCTIONS[kind](pair, force=force, seed=seed) for kind in kinds}

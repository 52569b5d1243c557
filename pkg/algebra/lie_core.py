# algebra/lie_core.py
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sparse

from utils.config_loader import settings
from utils.exceptions import ConstructionError, UsageError

logger = logging.getLogger(__name__)


@dataclass
class JacobiReport:
    """Result of a Jacobi identity sweep."""
    max_violation: float
    passed: bool
    tol: float
    antisymmetry: float = 0.0
    mode: str = "exhaustive"
    rows_checked: int = 0
    worst_triple: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "pass": self.passed,
            "tol": self.tol,
            "antisymmetry": self.antisymmetry,
            "mode": self.mode,
            "rows_checked": self.rows_checked,
        }


@dataclass
class BilinearForm:
    """A real bilinear form given by its Gram matrix in some basis."""
    matrix: np.ndarray

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self.matrix @ np.asarray(y))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T), initial=0.0))

    def is_symmetric(self, tol: float = 1e-9) -> bool:
        return self.symmetry_residual() <= tol

    def is_negative_definite(self, tol: float = 1e-9) -> bool:
        if self.dim == 0:
            return True
        eigenvalues = np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))
        return bool(eigenvalues.max() < -tol)

    def restrict(self, basis: np.ndarray) -> "BilinearForm":
        """Gram matrix of the form on the span of the rows of ``basis``."""
        basis = np.atleast_2d(basis)
        return BilinearForm(basis @ self.matrix @ basis.T)


@dataclass
class Subspace:
    """Linear span of coordinate vectors (rows of ``basis``) in a parent algebra."""
    parent: "LieAlgebra"
    basis: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if self.basis.size == 0:
            self.basis = np.zeros((0, self.parent.dim))
            return
        if self.basis.shape[1] != self.parent.dim:
            raise UsageError(
                f"Subspace {self.name or '?'}: vectors of length {self.basis.shape[1]} "
                f"in an algebra of dim {self.parent.dim}"
            )
        rank = np.linalg.matrix_rank(self.basis, tol=1e-9 * max(1.0, np.abs(self.basis).max()))
        if rank != self.basis.shape[0]:
            raise ConstructionError(
                f"Subspace {self.name or '?'} has {self.basis.shape[0]} vectors but rank {rank}",
                identity="independence",
            )

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Least-squares coordinates of ``vectors`` (rows) in this basis."""
        vectors = np.atleast_2d(vectors)
        coords, *_ = np.linalg.lstsq(self.basis.T, vectors.T, rcond=None)
        return coords.T

    def distance(self, vectors: np.ndarray) -> np.ndarray:
        """Distance of each row of ``vectors`` to the subspace."""
        vectors = np.atleast_2d(vectors)
        if self.dim == 0:
            return np.linalg.norm(vectors, axis=1)
        return np.linalg.norm(vectors - self.coordinates(vectors) @ self.basis, axis=1)


class LieAlgebra:
    """Finite-dimensional real Lie algebra stored by structure constants.

    ``[x_i, x_j] = sum_k c[i, j, k] x_k``. Constants are kept as COO triplets
    together with three CSR views, and as a dense cube when the dimension is
    small enough (``lie.dense_limit``).
    """

    def __init__(self, rows, cols, outs, values, dim: int,
                 labels: Optional[Sequence[str]] = None, name: str = ""):
        self.dim = int(dim)
        if self.dim <= 0:
            raise UsageError("A Lie algebra needs a positive dimension")
        self.name = name
        self.labels = list(labels) if labels is not None else [f"x{i}" for i in range(self.dim)]
        if len(self.labels) != self.dim:
            raise UsageError(f"{len(self.labels)} labels for an algebra of dim {self.dim}")

        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        outs = np.asarray(outs, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        N = self.dim
        # (N, N*N) with [i, j*N+k] = c_ijk; row i reshaped is the matrix of [x_i, x_j] in x_k
        self._left = sparse.csr_matrix((values, (rows, cols * N + outs)), shape=(N, N * N))
        self._left.sum_duplicates()
        coo = self._left.tocoo()
        self._i = coo.row
        self._j = coo.col // N
        self._k = coo.col % N
        self._v = coo.data
        # [i*N+j, k] = c_ijk
        self._pair = sparse.csr_matrix((self._v, (self._i * N + self._j, self._k)), shape=(N * N, N))
        # [j, i*N+k] = c_ijk, row a reshaped gives c[:, a, :]
        self._mid = sparse.csr_matrix((self._v, (self._j, self._i * N + self._k)), shape=(N, N * N))
        # [i, k*N+j] = c_ijk, pairs with _left to give trace(ad x ad y)
        self._swap = sparse.csr_matrix((self._v, (self._i, self._k * N + self._j)), shape=(N, N * N))

        self._dense = None
        if N <= settings()["lie"]["dense_limit"]:
            self._dense = np.zeros((N, N, N))
            np.add.at(self._dense, (self._i, self._j, self._k), self._v)
        self._killing = None

    @classmethod
    def from_dense(cls, structure: np.ndarray, labels=None, name: str = "", cutoff: float = 1e-13):
        """Build from a dense ``(N, N, N)`` array; entries below ``cutoff`` are dropped."""
        structure = np.asarray(structure, dtype=float)
        if structure.ndim != 3 or len(set(structure.shape)) != 1:
            raise UsageError(f"Structure constants must be a cube, got shape {structure.shape}")
        i, j, k = np.nonzero(np.abs(structure) > cutoff)
        return cls(i, j, k, structure[i, j, k], structure.shape[0], labels=labels, name=name)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name='{self.name}', dim={self.dim}, nnz={self.nnz})"

    @property
    def nnz(self) -> int:
        return int(self._v.size)

    def structure_constants(self) -> np.ndarray:
        """Dense copy of ``c[i, j, k]``."""
        if self._dense is not None:
            return self._dense.copy()
        dense = np.zeros((self.dim,) * 3)
        np.add.at(dense, (self._i, self._j, self._k), self._v)
        return dense

    def triplets(self):
        return self._i.copy(), self._j.copy(), self._k.copy(), self._v.copy()

    def _check_vector(self, x, what: str = "vector") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise UsageError(f"{what} has length {x.shape[-1]}, algebra {self.name or ''} has dim {self.dim}")
        return x

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def ad(self, x) -> np.ndarray:
        """Matrix of ad x acting on coordinate columns."""
        x = self._check_vector(x)
        return np.asarray(self._left.T @ x).reshape(self.dim, self.dim).T

    def bracket(self, x, y) -> np.ndarray:
        x = self._check_vector(x, "x")
        y = self._check_vector(y, "y")
        return self.ad(x) @ y

    def bracket_many(self, X, Y) -> np.ndarray:
        """All brackets ``[X_p, Y_q]`` as an array of shape ``(p, q, dim)``."""
        X = np.atleast_2d(self._check_vector(X, "X"))
        Y = np.atleast_2d(self._check_vector(Y, "Y"))
        left = np.asarray((self._left.T @ X.T).T).reshape(X.shape[0], self.dim, self.dim)
        return np.tensordot(left, Y, axes=([1], [1])).transpose(0, 2, 1)

    def killing_form(self) -> BilinearForm:
        if self._killing is None:
            gram = np.asarray((self._left @ self._swap.T).todense())
            self._killing = BilinearForm(0.5 * (gram + gram.T))
        return self._killing

    def ad_invariance_residual(self, form: BilinearForm) -> float:
        """max over basis z of |B([z,x],y) + B(x,[z,y])|."""
        worst = 0.0
        for z in range(self.dim):
            adz = self.ad(self.basis_vector(z))
            worst = max(worst, float(np.abs(adz.T @ form.matrix + form.matrix @ adz).max(initial=0.0)))
        return worst

    def antisymmetry_residual(self) -> float:
        sym = self._pair + self._swap_pair()
        return float(np.abs(sym.data).max(initial=0.0)) if sym.nnz else 0.0

    def _swap_pair(self):
        N = self.dim
        return sparse.csr_matrix((self._v, (self._j * N + self._i, self._k)), shape=(N * N, N))

    def jacobi_rows(self, a: int) -> np.ndarray:
        """Jacobiator ``J[b, c, m]`` of ``(x_a, x_b, x_c)`` for all b, c."""
        N = self.dim
        left_a = np.asarray(self._left[a].todense()).reshape(N, N)   # c[a, b, k]
        mid_a = np.asarray(self._mid[a].todense()).reshape(N, N)     # c[k, a, m]
        first = np.asarray((self._left.T @ left_a.T).T).reshape(N, N, N)
        second = np.asarray(self._pair @ mid_a).reshape(N, N, N)
        third = np.asarray((self._left.T @ mid_a.T).T).reshape(N, N, N).transpose(1, 0, 2)
        return first + second + third

    def check_jacobi(self, tol: float = 1e-9, exhaustive: Optional[bool] = None,
                     seed: Optional[int] = None) -> JacobiReport:
        """Largest Jacobi residual over basis triples.

        Every triple is checked when the dimension is at most
        ``lie.jacobi_exhaustive_limit`` (or ``exhaustive=True``); otherwise
        all triples through a seeded sample of first indices are checked.
        """
        cfg = settings()["lie"]
        if exhaustive is None:
            exhaustive = self.dim <= cfg["jacobi_exhaustive_limit"]
        if exhaustive:
            rows = np.arange(self.dim)
        else:
            rng = np.random.default_rng(cfg["jacobi_seed"] if seed is None else seed)
            rows = np.sort(rng.choice(self.dim, size=min(self.dim, cfg["jacobi_samples"]), replace=False))

        worst, worst_triple = 0.0, None
        for a in rows:
            residual = np.linalg.norm(self.jacobi_rows(int(a)), axis=2)
            b, c = np.unravel_index(np.argmax(residual), residual.shape)
            if residual[b, c] > worst:
                worst, worst_triple = float(residual[b, c]), (int(a), int(b), int(c))

        antisym = self.antisymmetry_residual()
        passed = worst <= tol and antisym <= tol
        mode = "exhaustive" if exhaustive else "sampled"
        logger.debug(f"Jacobi check on {self.name or 'algebra'} ({mode}, {len(rows)} rows): {worst:.3e}")
        return JacobiReport(max_violation=worst, passed=passed, tol=tol, antisymmetry=antisym,
                            mode=mode, rows_checked=len(rows), worst_triple=worst_triple)

    def change_basis(self, P: np.ndarray, labels=None, name: str = None) -> "LieAlgebra":
        """Algebra in the basis ``y_a = sum_i P[a, i] x_i`` (``P`` invertible)."""
        P = np.asarray(P, dtype=float)
        Pinv = np.linalg.inv(P)
        brackets = self.bracket_many(P, P)
        return LieAlgebra.from_dense(brackets @ Pinv, labels=labels, name=name or self.name)


class MatrixLieAlgebra(LieAlgebra):
    """Lie algebra spanned by explicit (real or complex) square matrices."""

    def __init__(self, matrices: np.ndarray, structure: np.ndarray, labels=None, name: str = ""):
        self.matrices = matrices
        self._flat = _realify(matrices)
        i, j, k = np.nonzero(np.abs(structure) > 1e-13)
        super().__init__(i, j, k, structure[i, j, k], len(matrices), labels=labels, name=name)

    def coordinates(self, M: np.ndarray) -> np.ndarray:
        """Coordinates of matrix (or stack of matrices) ``M`` in the generator basis."""
        M = np.asarray(M)
        single = M.ndim == 2
        stack = M[None] if single else M
        coords, *_ = np.linalg.lstsq(self._flat.T, _realify(stack).T, rcond=None)
        coords = coords.T
        return coords[0] if single else coords

    def to_matrix(self, x) -> np.ndarray:
        return np.tensordot(self._check_vector(x), self.matrices, axes=1)


def _realify(matrices: np.ndarray) -> np.ndarray:
    flat = np.asarray(matrices).reshape(len(matrices), -1)
    if np.iscomplexobj(flat):
        return np.hstack([flat.real, flat.imag])
    return flat.astype(float)


def matrix_algebra_from_generators(matrices, labels=None, name: str = "", tol: float = 1e-9) -> MatrixLieAlgebra:
    """Structure constants of the span of ``matrices`` under the commutator.

    Raises:
        ConstructionError: generators are dependent, or some commutator leaves
            the span (``where`` holds the offending pair of indices).
    """
    matrices = np.asarray(matrices)
    if matrices.ndim != 3 or matrices.shape[1] != matrices.shape[2]:
        raise UsageError(f"Expected a stack of square matrices, got shape {matrices.shape}")
    N = len(matrices)
    flat = _realify(matrices)
    scale = max(1.0, float(np.abs(flat).max()))
    rank = np.linalg.matrix_rank(flat, tol=1e-10 * scale)
    if rank != N:
        raise ConstructionError(f"{N} generators span only {rank} dimensions",
                                identity="independence", residual=float(N - rank))
    pinv = np.linalg.pinv(flat.T)

    structure = np.zeros((N, N, N))
    for a in range(N):
        comm = matrices[a] @ matrices - matrices @ matrices[a]
        vecs = _realify(comm)
        coeffs = vecs @ pinv.T
        residual = np.linalg.norm(coeffs @ flat - vecs, axis=1)
        bad = np.flatnonzero(residual > tol * scale * scale)
        if bad.size:
            b = int(bad[0])
            raise ConstructionError(
                f"[{a}, {b}] leaves the span of the generators (residual {residual[b]:.3e})",
                identity="closure", where=(a, b), residual=float(residual[b]),
            )
        structure[a] = coeffs
    structure = 0.5 * (structure - structure.transpose(1, 0, 2))
    return MatrixLieAlgebra(matrices, structure, labels=labels, name=name)


def bracket(algebra: LieAlgebra, x, y) -> np.ndarray:
    return algebra.bracket(x, y)


def killing_form(algebra: LieAlgebra) -> BilinearForm:
    return algebra.killing_form()


def check_jacobi(algebra: LieAlgebra, tol: float = 1e-9) -> JacobiReport:
    return algebra.check_jacobi(tol=tol)


def span_rank(vectors: np.ndarray, rtol: float = 1e-9) -> int:
    vectors = np.atleast_2d(vectors)
    if vectors.size == 0:
        return 0
    s = np.linalg.svd(vectors, compute_uv=False)
    return int(np.sum(s > rtol * max(1.0, s[0])))


def reduce_to_basis(vectors: np.ndarray, rtol: float = 1e-9, metric: np.ndarray = None) -> np.ndarray:
    """Orthonormal basis (rows) of the span of ``vectors``.

    Orthonormal for the Euclidean product, or for ``metric`` when given.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if metric is None:
        u, s, vt = np.linalg.svd(vectors, full_matrices=False)
        rank = int(np.sum(s > rtol * max(1.0, s[0] if s.size else 0.0)))
        return vt[:rank]
    L = np.linalg.cholesky(metric)
    half = reduce_to_basis(vectors @ L, rtol=rtol)
    return np.linalg.solve(L.T, half.T).T

# algebra/jordan.py
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from algebra.composition import CompositionAlgebra
from algebra.lie_core import reduce_to_basis

logger = logging.getLogger(__name__)

OFF_DIAGONAL = [(0, 1), (1, 2), (0, 2)]


@dataclass(frozen=True)
class JordanAlgebra:
    """Jordan algebra with its traceless part and derivation algebra.

    Attributes:
        name: Short tag, e.g. "H3(O)"
        prod: ``x_p . x_q = sum_r prod[p, q, r] x_r``
        trace: trace functional on the basis
        unit: coordinates of the identity
        traceless: rows are a ``tr(x.y)``-orthonormal basis of J_0
        star: ``x_q * x_s = sum_u star[q, s, u] x_u`` inside J_0
        derivations: Frobenius-orthonormal basis of Der(J) acting on J
        labels: basis names
    """
    name: str
    prod: np.ndarray
    trace: np.ndarray
    unit: np.ndarray
    traceless: np.ndarray
    star: np.ndarray
    derivations: np.ndarray
    labels: List[str]

    @property
    def dim(self) -> int:
        return self.prod.shape[0]

    @property
    def dim_traceless(self) -> int:
        return self.traceless.shape[0]

    def multiply(self, x, y) -> np.ndarray:
        return np.einsum("p,q,pqr->r", x, y, self.prod)

    def trace_form(self) -> np.ndarray:
        """Gram matrix of tr(x . y) on the basis of J."""
        return self.prod @ self.trace

    def right_mult(self, x) -> np.ndarray:
        """Matrix of y -> y . x."""
        return np.einsum("x,qxr->rq", x, self.prod)

    def traceless_coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of J_0 elements (rows, in J coordinates) in ``traceless``."""
        gram = self.trace_form()
        return np.atleast_2d(vectors) @ gram @ self.traceless.T

    def jordan_identity_residual(self, samples: int = 20, seed: int = 0) -> float:
        """max |(x^2 y) x - x^2 (y x)| over basis pairs and seeded random pairs."""
        rng = np.random.default_rng(seed)
        basis = np.eye(self.dim)
        pairs = [(basis[p], basis[q]) for p in range(self.dim) for q in range(self.dim)]
        pairs += [(rng.integers(-3, 4, self.dim).astype(float), rng.integers(-3, 4, self.dim).astype(float))
                  for _ in range(samples)]
        worst = 0.0
        for x, y in pairs:
            x2 = self.multiply(x, x)
            lhs = self.multiply(self.multiply(x2, y), x)
            rhs = self.multiply(x2, self.multiply(y, x))
            worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst


def _hermitian_basis(C: CompositionAlgebra):
    d = C.dim
    basis, labels = [], []
    for i in range(3):
        E = np.zeros((3, 3, d))
        E[i, i, 0] = 1.0
        basis.append(E)
        labels.append(f"E{i + 1}{i + 1}")
    conj = C.conjugation_matrix()
    for (i, j) in OFF_DIAGONAL:
        for u in range(d):
            X = np.zeros((3, 3, d))
            X[i, j, u] = 1.0
            X[j, i, :] = conj[:, u]
            basis.append(X)
            labels.append(f"X{i + 1}{j + 1}({C.labels[u]})")
    return np.array(basis), labels


def build_jordan(C: Optional[CompositionAlgebra], rtol: float = 1e-9) -> JordanAlgebra:
    """H_3(C) with x.y = (xy + yx)/2, or the one-dimensional Jordan algebra R when ``C`` is None."""
    if C is None:
        return JordanAlgebra(
            name="R", prod=np.ones((1, 1, 1)), trace=np.ones(1), unit=np.ones(1),
            traceless=np.zeros((0, 1)), star=np.zeros((0, 0, 0)),
            derivations=np.zeros((0, 1, 1)), labels=["1"],
        )

    B, labels = _hermitian_basis(C)
    N = len(B)
    products = np.einsum("pija,qjkb,abc->pqikc", B, B, C.mult, optimize=True)
    products = 0.5 * (products + products.transpose(1, 0, 2, 3, 4))
    flat = B.reshape(N, -1)
    coords, *_ = np.linalg.lstsq(flat.T, products.reshape(N * N, -1).T, rcond=None)
    prod = coords.T.reshape(N, N, N)
    prod[np.abs(prod) < 1e-14] = 0.0

    trace = np.zeros(N)
    trace[:3] = 1.0
    unit = np.zeros(N)
    unit[:3] = 1.0
    gram = prod @ trace

    # traceless part, orthonormal for tr(x . y)
    spanning = np.zeros((N - 1, N))
    spanning[0, 0], spanning[0, 1] = 1.0, -1.0
    spanning[1, 1], spanning[1, 2] = 1.0, -1.0
    spanning[2:, 3:] = np.eye(N - 3)
    traceless = reduce_to_basis(spanning, rtol=rtol, metric=gram)

    k = len(traceless)
    pairs = np.einsum("qa,sb,abr->qsr", traceless, traceless, prod)
    pairs -= np.einsum("qs,r->qsr", traceless @ gram @ traceless.T, unit) / 3.0
    star = pairs @ gram @ traceless.T

    rights = np.einsum("xa,qar->xrq", np.eye(N), prod)
    commutators = np.einsum("xab,ybc->xyac", rights, rights)
    commutators = commutators - commutators.transpose(1, 0, 2, 3)
    derivations = reduce_to_basis(commutators.reshape(N * N, N * N), rtol=rtol).reshape(-1, N, N)

    name = f"H3({C.name})"
    logger.debug(f"{name}: dim {N}, traceless {k}, derivations {len(derivations)}")
    return JordanAlgebra(name=name, prod=prod, trace=trace, unit=unit, traceless=traceless,
                         star=star, derivations=derivations, labels=labels)


def derivation_residual(D: np.ndarray, J: JordanAlgebra) -> float:
    """max |D(x.y) - D(x).y - x.D(y)| over basis pairs."""
    lhs = np.einsum("abp,cp->abc", J.prod, D)
    rhs = np.einsum("pa,pbc->abc", D, J.prod) + np.einsum("pb,apc->abc", D, J.prod)
    return float(np.abs(lhs - rhs).max(initial=0.0))

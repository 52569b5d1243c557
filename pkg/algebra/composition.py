# algebra/composition.py
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from algebra.lie_core import reduce_to_basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompositionAlgebra:
    """Unital composition algebra over the reals in a basis starting with 1.

    ``e_a e_b = sum_c mult[a, b, c] e_c``; the basis is orthonormal for the
    norm and ``e_1 .. e_{d-1}`` span the trace-zero part ``C_0``.
    """
    name: str
    mult: np.ndarray
    labels: List[str]

    @property
    def dim(self) -> int:
        return self.mult.shape[0]

    def unit(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[0] = 1.0
        return e

    def element(self, label: str) -> np.ndarray:
        e = np.zeros(self.dim)
        e[self.labels.index(label)] = 1.0
        return e

    def multiply(self, x, y) -> np.ndarray:
        return np.einsum("a,b,abc->c", x, y, self.mult)

    def norm(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ x)

    def trace(self, x) -> float:
        """t(a) = n(a + 1) - n(a) - n(1)."""
        return 2.0 * float(np.asarray(x)[0])

    def conjugate(self, x) -> np.ndarray:
        """a-bar = t(a) 1 - a."""
        return self.trace(x) * self.unit() - np.asarray(x, dtype=float)

    def conjugation_matrix(self) -> np.ndarray:
        return np.diag([1.0] + [-1.0] * (self.dim - 1))

    def left_mult(self, a) -> np.ndarray:
        """Matrix of x -> a x."""
        return np.einsum("a,abc->cb", a, self.mult)

    def right_mult(self, a) -> np.ndarray:
        """Matrix of x -> x a."""
        return np.einsum("a,bac->cb", a, self.mult)

    def imaginary_basis(self) -> np.ndarray:
        return np.eye(self.dim)[1:]

    def invariant_residuals(self) -> dict:
        """Multiplicativity of the norm and the quadratic equation on basis elements."""
        basis = np.eye(self.dim)
        multiplicativity = 0.0
        quadratic = 0.0
        for a in basis:
            square = self.multiply(a, a)
            quadratic = max(quadratic, float(np.abs(square - self.trace(a) * a + self.norm(a) * self.unit()).max()))
            for b in basis:
                multiplicativity = max(multiplicativity, abs(self.norm(self.multiply(a, b)) - self.norm(a) * self.norm(b)))
        return {"multiplicativity": multiplicativity, "quadratic": quadratic}


def build_reals() -> CompositionAlgebra:
    return CompositionAlgebra("R", np.ones((1, 1, 1)), ["1"])


def cayley_dickson(base: CompositionAlgebra, new_unit: str, name: str) -> CompositionAlgebra:
    """Double ``base`` with a new unit l, l^2 = -1.

    (a + b l)(c + d l) = (a c - d-bar b) + (d a + b c-bar) l, which contains
    q1 (q2 l) = (q2 q1) l, (q1 l) q2 = (q1 q2-bar) l and (q1 l)(q2 l) = -q2-bar q1.
    """
    d = base.dim
    conj = base.conjugation_matrix()
    mult = np.zeros((2 * d, 2 * d, 2 * d))
    m = base.mult
    # a c
    mult[:d, :d, :d] = m
    # a (d l) = (d a) l
    mult[:d, d:, d:] = m.transpose(1, 0, 2)
    # (b l) c = (b c-bar) l
    mult[d:, :d, d:] = np.einsum("abc,bB->aBc", m, conj)
    # (b l)(d l) = -(d-bar b)
    mult[d:, d:, :d] = -np.einsum("dbc,dD->bDc", m, conj)
    labels = list(base.labels) + [
        new_unit if lab == "1" else f"{lab}{new_unit}" for lab in base.labels
    ]
    return CompositionAlgebra(name, mult, labels)


def build_complexes() -> CompositionAlgebra:
    return cayley_dickson(build_reals(), "i", "C")


def build_quaternions() -> CompositionAlgebra:
    """Quaternions in the basis 1, j1, j2, j3 with j_a j_b = -delta_ab + eps_abc j_c."""
    mult = np.zeros((4, 4, 4))
    mult[0, :, :] = np.eye(4)
    mult[:, 0, :] = np.eye(4)
    eps = _levi_civita()
    for a in range(3):
        mult[a + 1, a + 1, 0] = -1.0
        for b in range(3):
            for c in range(3):
                if eps[a, b, c]:
                    mult[a + 1, b + 1, c + 1] = eps[a, b, c]
    return CompositionAlgebra("H", mult, ["1", "i", "j", "k"])


def build_octonions() -> CompositionAlgebra:
    """Octonions as quaternion doubles, basis 1, i, j, k, l, il, jl, kl."""
    return cayley_dickson(build_quaternions(), "l", "O")


def _levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for a, b, c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[a, b, c] = 1.0
        eps[b, a, c] = -1.0
    return eps


def derivation_D(a, b, C: CompositionAlgebra) -> np.ndarray:
    """D_{a,b} = [l_a, l_b] + [l_a, r_b] + [r_a, r_b] as a matrix on C."""
    la, lb = C.left_mult(a), C.left_mult(b)
    ra, rb = C.right_mult(a), C.right_mult(b)
    return (la @ lb - lb @ la) + (la @ rb - rb @ la) + (ra @ rb - rb @ ra)


def derivation_residual(D: np.ndarray, C: CompositionAlgebra) -> float:
    """max |D(xy) - D(x)y - xD(y)| over basis pairs."""
    m = C.mult
    lhs = np.einsum("abp,cp->abc", m, D)
    rhs = np.einsum("pa,pbc->abc", D, m) + np.einsum("pb,apc->abc", D, m)
    return float(np.abs(lhs - rhs).max())


def derivation_identity_residuals(C: CompositionAlgebra, a, b, c, d: Optional[np.ndarray] = None) -> dict:
    """Residuals of D_{a,a} = 0, the cyclic identity and [d, D_{a,b}] = D_{d(a),b} + D_{a,d(b)}."""
    mul = C.multiply
    cyclic = (derivation_D(mul(a, b), c, C) + derivation_D(mul(b, c), a, C)
              + derivation_D(mul(c, a), b, C))
    result = {
        "skew": float(np.abs(derivation_D(a, b, C) + derivation_D(b, a, C)).max()),
        "diagonal": float(np.abs(derivation_D(a, a, C)).max()),
        "cyclic": float(np.abs(cyclic).max()),
    }
    if d is not None:
        Dab = derivation_D(a, b, C)
        lhs = d @ Dab - Dab @ d
        rhs = derivation_D(d @ a, b, C) + derivation_D(a, d @ b, C)
        result["equivariance"] = float(np.abs(lhs - rhs).max())
    return result


def derivation_algebra_basis(C: CompositionAlgebra, rtol: float = 1e-9) -> np.ndarray:
    """Frobenius-orthonormal basis of span{D_{a,b}} as a stack of matrices."""
    basis = np.eye(C.dim)
    spanning = [derivation_D(basis[a], basis[b], C).ravel()
                for a in range(1, C.dim) for b in range(a + 1, C.dim)]
    if not spanning:
        return np.zeros((0, C.dim, C.dim))
    reduced = reduce_to_basis(np.array(spanning), rtol=rtol)
    return reduced.reshape(-1, C.dim, C.dim)


def octonion_split_derivations(O: CompositionAlgebra):
    """Derivations of O adapted to O = H + H l.

    Returns ``(minus, plus, mixed)``: for a in {i, j, k},
    ``minus[a]``: q -> [a, q], q l -> -(q a) l;
    ``plus[a]``: q -> 0, q l -> (a q) l;
    ``mixed``: orthonormal basis of span{D_{a, q l}} (8 matrices).
    """
    H = build_quaternions()
    minus, plus = [], []
    for a in range(1, 4):
        unit = np.eye(4)[a]
        La, Ra = H.left_mult(unit), H.right_mult(unit)
        dm = np.zeros((8, 8))
        dm[:4, :4] = La - Ra
        dm[4:, 4:] = -Ra
        dp = np.zeros((8, 8))
        dp[4:, 4:] = La
        minus.append(dm)
        plus.append(dp)
    basis = np.eye(8)
    spanning = [derivation_D(basis[a], basis[4 + q], O).ravel() for a in range(1, 4) for q in range(4)]
    mixed = reduce_to_basis(np.array(spanning)).reshape(-1, 8, 8)
    logger.debug(f"Octonion derivations split as {len(minus)} + {len(plus)} + {len(mixed)}")
    return np.array(minus), np.array(plus), mixed

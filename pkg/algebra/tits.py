# algebra/tits.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from algebra.composition import CompositionAlgebra, derivation_D, derivation_algebra_basis
from algebra.jordan import JordanAlgebra
from algebra.lie_core import LieAlgebra
from utils.config_loader import tolerance
from utils.exceptions import ConstructionError, UsageError

logger = logging.getLogger(__name__)


@dataclass
class TitsLayout:
    """Index ranges of Der(C), C_0 (x) J_0 and Der(J) inside T(C, J)."""
    der_c: slice
    tensor: slice
    der_j: slice
    dim_c0: int
    dim_j0: int

    def tensor_index(self, a: int, q: int) -> int:
        """Index of e_{a+1} (x) x_q, with ``a`` counted inside C_0."""
        return self.tensor.start + a * self.dim_j0 + q


def _frobenius_coordinates(basis: np.ndarray, matrices: np.ndarray) -> np.ndarray:
    """Coordinates of ``matrices`` in the span of ``basis`` (least squares, Frobenius product)."""
    gram = np.einsum("pij,qij->pq", basis, basis)
    return np.einsum("pij,...ij->...p", basis, matrices) @ np.linalg.inv(gram)


def build_tits(C: CompositionAlgebra, J: JordanAlgebra, der_basis: Optional[np.ndarray] = None,
               check: bool = True, name: str = None):
    """Tits algebra T(C, J) = Der(C) + C_0 (x) J_0 + Der(J).

    Mixed bracket:
    [a (x) x, b (x) y] = 1/3 tr(x.y) D_{a,b} + [a, b] (x) (x * y) + 2 t(ab) [R_x, R_y].

    Args:
        C: Composition algebra (quaternions or octonions)
        J: Jordan algebra
        der_basis: Frobenius-orthonormal basis of Der(C) to use instead of the default
        check: run the Jacobi check and raise on failure
        name: Label of the resulting algebra

    Returns:
        ``(LieAlgebra, TitsLayout)``
    """
    if C.dim not in (4, 8):
        raise UsageError(f"Tits construction needs the quaternions or the octonions, got {C.name}")
    der_c = derivation_algebra_basis(C) if der_basis is None else np.asarray(der_basis)
    kc, d0, kj0, kdj = len(der_c), C.dim - 1, J.dim_traceless, len(J.derivations)
    dim = kc + d0 * kj0 + kdj
    layout = TitsLayout(slice(0, kc), slice(kc, kc + d0 * kj0), slice(kc + d0 * kj0, dim), d0, kj0)
    name = name or f"T({C.name},{J.name})"
    logger.info(f"Building {name}: {kc} + {d0}x{kj0} + {kdj} = {dim}")

    S = np.zeros((dim, dim, dim))
    imag = C.imaginary_basis()

    # Der(C) and its action on C_0
    comm_c = np.einsum("pab,qbc->pqac", der_c, der_c)
    comm_c = comm_c - comm_c.transpose(1, 0, 2, 3)
    S[:kc, :kc, :kc] = _frobenius_coordinates(der_c, comm_c)
    act_c = der_c[:, 1:, 1:].transpose(0, 2, 1)                     # act_c[p, a, c]
    tensor_c = np.einsum("pac,qu->paqcu", act_c, np.eye(kj0)).reshape(kc, d0 * kj0, d0 * kj0)
    S[:kc, layout.tensor, layout.tensor] = tensor_c
    S[layout.tensor, :kc, layout.tensor] = -tensor_c.transpose(1, 0, 2)

    # Der(J) and its action on J_0
    if kdj:
        comm_j = np.einsum("pab,qbc->pqac", J.derivations, J.derivations)
        comm_j = comm_j - comm_j.transpose(1, 0, 2, 3)
        S[layout.der_j, layout.der_j, layout.der_j] = _frobenius_coordinates(J.derivations, comm_j)
        moved = np.einsum("rij,qj->rqi", J.derivations, J.traceless)
        act_j = J.traceless_coordinates(moved.reshape(-1, J.dim)).reshape(kdj, kj0, kj0)
        tensor_j = np.einsum("ac,rqu->raqcu", np.eye(d0), act_j).reshape(kdj, d0 * kj0, d0 * kj0)
        S[layout.der_j, layout.tensor, layout.tensor] = tensor_j
        S[layout.tensor, layout.der_j, layout.tensor] = -tensor_j.transpose(1, 0, 2)

    # C_0 (x) J_0 with itself
    if kj0:
        DC = np.array([[_frobenius_coordinates(der_c, derivation_D(x, y, C)) for y in imag] for x in imag])
        ab = np.einsum("xa,yb,abc->xyc", imag, imag, C.mult)
        comm = (ab - ab.transpose(1, 0, 2))[:, :, 1:]
        tt = 2.0 * ab[:, :, 0]
        trj = J.traceless @ J.trace_form() @ J.traceless.T

        rights = np.array([J.right_mult(x) for x in J.traceless])
        rr = np.einsum("qab,sbc->qsac", rights, rights)
        rr = rr - rr.transpose(1, 0, 2, 3)
        RR = _frobenius_coordinates(J.derivations, rr) if kdj else np.zeros((kj0, kj0, 0))

        block = slice(layout.tensor.start, layout.tensor.stop)
        to_der_c = np.einsum("qs,abp->aqbsp", trj, DC).reshape(d0 * kj0, d0 * kj0, kc) / 3.0
        to_tensor = np.einsum("abc,qsu->aqbscu", comm, J.star).reshape(d0 * kj0, d0 * kj0, d0 * kj0)
        S[block, block, :kc] = to_der_c
        S[block, block, block] = to_tensor
        if kdj:
            to_der_j = 2.0 * np.einsum("ab,qsr->aqbsr", tt, RR).reshape(d0 * kj0, d0 * kj0, kdj)
            S[block, block, layout.der_j] = to_der_j

    algebra = LieAlgebra.from_dense(S, name=name)
    if check:
        report = algebra.check_jacobi(tol=tolerance("exact"), exhaustive=True)
        if not report.passed:
            raise ConstructionError(
                f"{name} fails the Jacobi identity ({report.max_violation:.3e} at {report.worst_triple})",
                identity="jacobi", where=report.worst_triple, residual=report.max_violation,
            )
        logger.info(f"{name}: Jacobi residual {report.max_violation:.2e} ({report.mode})")
    return algebra, layout

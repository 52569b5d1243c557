# equivariant/named_bases.py
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from algebra.algebra_zoo import EPSILON
from equivariant.hom_spaces import HomSpaceResult
from geometry.sasaki_geometry import SasakiFrame, fundamental_two_forms
from utils.config_loader import tolerance
from utils.exceptions import UsageError

logger = logging.getLogger(__name__)


@dataclass
class NamedFitReport:
    """How the named generators sit inside a numerically computed invariant space.

    Attributes:
        named: number of named generators
        rank: rank of the named set
        dimension: dimension of the numeric space
        residual: largest component of a named generator outside the numeric span
        independent: the named generators are linearly independent
        spans: the named generators span the numeric space
        coefficients: named generators expressed in the numeric basis, ``(named, dimension)``
    """
    kind: str
    named: int
    rank: int
    dimension: int
    residual: float
    independent: bool
    spans: bool
    labels: List[str] = field(default_factory=list)
    coefficients: np.ndarray = None

    @property
    def passed(self) -> bool:
        return self.independent and self.spans and self.residual <= tolerance("chained")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "named": self.named, "rank": self.rank, "dimension": self.dimension,
                "residual": self.residual, "independent": self.independent, "spans": self.spans,
                "pass": self.passed}


def _horizontal_endomorphisms(frame: SasakiFrame) -> List[Tuple[str, np.ndarray]]:
    dm = frame.dim
    ops = [("id", np.eye(dm))] + [(f"phi{r + 1}", frame.phi[r]) for r in range(3)]
    if frame.phi0 is not None:
        ops.append(("phi0", frame.phi0))
        ops += [(f"phi0phi{r + 1}", frame.phi0 @ frame.phi[r]) for r in range(3)]
    h = frame.horizontal
    restricted = []
    for name, E in ops:
        block = np.zeros((dm, dm))
        block[h, h] = E[h, h]
        restricted.append((name, block))
    return restricted


def named_bilinear(frame: SasakiFrame) -> Tuple[List[str], np.ndarray]:
    """alpha_rst, beta_Es and their swaps, gamma_Fs; 63 maps, 99 on the SU family."""
    dm = frame.dim
    h = frame.horizontal
    labels, tensors = [], []

    for r in range(3):
        for s in range(3):
            for t in range(3):
                alpha = np.zeros((dm, dm, dm))
                alpha[r, s, t] = 1.0
                labels.append(f"alpha_{r + 1}{s + 1}{t + 1}")
                tensors.append(alpha)

    betas = []
    for name, E in _horizontal_endomorphisms(frame):
        for s in range(3):
            beta = np.zeros((dm, dm, dm))
            # beta(x_s, Y) = E(Y^h)
            beta[s] = E.T
            betas.append((f"beta_{name}_{s + 1}", beta))
    for label, beta in betas:
        labels.append(label)
        tensors.append(beta)
    for label, beta in betas:
        labels.append(f"theta({label})")
        tensors.append(beta.transpose(1, 0, 2))

    forms = [("g", frame.metric)]
    forms += [(f"bracket{r + 1}", frame.pair.m_bracket[:, :, r]) for r in range(3)]
    if frame.phi0 is not None:
        G = frame.metric
        forms.append(("Phi0", G @ frame.phi0))
        forms += [(f"g_phi0phi{r + 1}", G @ frame.phi0 @ frame.phi[r]) for r in range(3)]
    for name, F in forms:
        for s in range(3):
            gamma = np.zeros((dm, dm, dm))
            gamma[h, h, s] = F[h, h]
            labels.append(f"gamma_{name}_{s + 1}")
            tensors.append(gamma)
    return labels, np.array(tensors)


def eta_wedge(eta: np.ndarray, form: np.ndarray) -> np.ndarray:
    """(eta ^ F)(X, Y, Z) = eta(X) F(Y, Z) + eta(Y) F(Z, X) + eta(Z) F(X, Y)."""
    t = np.einsum("i,jk->ijk", eta, form)
    return t + t.transpose(2, 0, 1) + t.transpose(1, 2, 0)


def named_three_forms(frame: SasakiFrame) -> Tuple[List[str], np.ndarray]:
    """eta_123 and eta_r ^ Phi_s; 10 forms, 13 with Phi_0 on the SU family."""
    eta = frame.eta
    volume = np.einsum("abc,ai,bj,ck->ijk", EPSILON, eta, eta, eta)
    labels, tensors = ["eta_123"], [volume]
    forms = fundamental_two_forms(frame, include_phi0=frame.phi0 is not None)
    for s in sorted(forms):
        for r in range(3):
            labels.append(f"eta_{r + 1}^Phi_{s}")
            tensors.append(eta_wedge(eta[r], forms[s]))
    return labels, np.array(tensors)


def named_generators(frame: SasakiFrame, kind: str) -> Tuple[List[str], np.ndarray]:
    if kind == "bilinear":
        return named_bilinear(frame)
    if kind == "lambda3":
        return named_three_forms(frame)
    raise UsageError(f"No named generators for {kind!r}; use bilinear or lambda3")


def match_named_generators(frame: SasakiFrame, result: HomSpaceResult) -> NamedFitReport:
    """Express the named generators in the numeric basis and test independence and spanning.

    Raises:
        UsageError: the result is of a kind without named generators, or belongs to another pair
    """
    if result.space != frame.pair.space_id:
        raise UsageError(f"Result computed on {result.space}, frame is on {frame.pair.space_id}")
    labels, named = named_generators(frame, result.kind)
    flat = named.reshape(len(named), -1)
    basis = result.basis.reshape(result.dimension, -1)
    # basis rows are orthonormal
    coefficients = flat @ basis.T
    residual = float(np.abs(flat - coefficients @ basis).max(initial=0.0))
    scale = max(1.0, float(np.abs(flat).max()))
    singular = np.linalg.svd(flat, compute_uv=False)
    rank = int(np.sum(singular > tolerance("rank_rtol") * singular[0]))
    report = NamedFitReport(kind=result.kind, named=len(named), rank=rank, dimension=result.dimension,
                            residual=residual / scale, independent=rank == len(named),
                            spans=rank == result.dimension, labels=labels, coefficients=coefficients)
    if report.passed:
        logger.info(f"{len(named)} named {result.kind} generators fit the numeric basis on {frame.pair.label}")
    else:
        logger.warning(f"Named {result.kind} fit on {frame.pair.label}: rank {rank} of {len(named)}, "
                       f"dimension {result.dimension}, residual {report.residual:.2e}")
    return report

# controls/sweep_controller.py
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, TypedDict

import numpy as np
from langgraph.graph import END, StateGraph
from tqdm import tqdm

from geometry.nomizu import levi_civita, ricci, s_tensor, skew_residual, sym_skew_ricci, torsion
from geometry.sasaki_geometry import SasakiFrame
from geometry.torsions import (closed_form_s, closed_form_scalar, closed_form_skew_ricci, closed_form_sym_ricci,
                               connection_from_spec, random_spec)
from memory.session_memory import remember_residual
from utils.config_loader import settings, tolerance

logger = logging.getLogger(__name__)

IDENTITIES = ["s_tensor", "sym_ricci", "scalar", "skew_ricci", "ricci_split", "skew_torsion"]


class SweepState(TypedDict):
    count: int
    seed: int
    batch_size: int
    done: int
    maxima: Dict[str, float]
    history: List[dict]
    continue_: bool


@dataclass
class SweepReport:
    space: str
    count: int
    seed: int
    maxima: Dict[str, float]
    tolerance: float
    history: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(value <= self.tolerance for value in self.maxima.values())

    def to_dict(self) -> dict:
        return {"space": self.space, "count": self.count, "seed": self.seed, "maxima": dict(self.maxima),
                "tolerance": self.tolerance, "pass": self.passed, "batches": len(self.history)}


def spec_for(frame: SasakiFrame, seed: int, index: int):
    """The index-th spec of a sweep; depends only on (seed, index)."""
    rng = np.random.default_rng([seed, index])
    return random_spec(rng, with_c=frame.phi0 is not None)


def closed_form_residuals(frame: SasakiFrame, spec, alpha_g=None) -> Dict[str, float]:
    """Brute-force tensors of one connection against their closed forms."""
    alpha_g = alpha_g or levi_civita(frame)
    alpha = connection_from_spec(frame, spec)
    T = torsion(alpha).array
    ric = ricci(alpha).array
    sym = 0.5 * (ric + ric.T)
    split = sym_skew_ricci(alpha, alpha_g, tol=np.inf)
    s = float(np.trace(np.linalg.solve(frame.metric, ric)))
    return {
        "s_tensor": float(np.abs(s_tensor(T, frame.metric).array - closed_form_s(frame, spec)).max()),
        "sym_ricci": float(np.abs(sym - closed_form_sym_ricci(frame, spec)).max()),
        "scalar": abs(s - closed_form_scalar(frame.n, spec)),
        "skew_ricci": float(np.abs(0.5 * (ric - ric.T) - closed_form_skew_ricci(frame, spec)).max()),
        "ricci_split": max(split.sym_residual, split.skew_residual),
        "skew_torsion": skew_residual(alpha),
    }


def build_sweep_loop(frame: SasakiFrame, progress: Optional[tqdm] = None):
    alpha_g = levi_civita(frame)
    space = frame.pair.space_id

    def batch_step(state: SweepState) -> SweepState:
        done, count = state["done"], state["count"]
        stop = min(count, done + state["batch_size"])
        maxima = dict(state["maxima"])
        batch_max = {name: 0.0 for name in IDENTITIES}
        for index in range(done, stop):
            residuals = closed_form_residuals(frame, spec_for(frame, state["seed"], index), alpha_g)
            for name, value in residuals.items():
                batch_max[name] = max(batch_max[name], value)
                maxima[name] = max(maxima.get(name, 0.0), value)
            if progress is not None:
                progress.update(1)
        history = state["history"] + [{"start": done, "stop": stop, **batch_max}]
        logger.debug(f"Sweep {space}: specs {done}..{stop - 1}, worst {max(batch_max.values()):.2e}")
        return {
            "count": count,
            "seed": state["seed"],
            "batch_size": state["batch_size"],
            "done": stop,
            "maxima": maxima,
            "history": history,
            "continue_": stop < count,
        }

    def should_continue(state: SweepState) -> Literal["batch", "end"]:
        return "batch" if state.get("continue_", False) else "end"

    graph = StateGraph(SweepState)
    graph.add_node("batch", batch_step)
    graph.set_entry_point("batch")
    graph.add_conditional_edges("batch", should_continue, {
        "batch": "batch",
        "end": END
    })
    return graph.compile()


def run_sweep(frame: SasakiFrame, count: Optional[int] = None, seed: Optional[int] = None,
              batch_size: Optional[int] = None, show_progress: bool = False) -> SweepReport:
    """Compare closed forms with brute force on ``count`` seeded random specs."""
    config = settings()["sweep"]
    count = config["default_count"] if count is None else int(count)
    seed = config["seed"] if seed is None else int(seed)
    batch_size = batch_size or config["batch_size"]
    tol = tolerance("scaled")
    space = frame.pair.space_id

    if count <= 0:
        return SweepReport(space=space, count=0, seed=seed, maxima={}, tolerance=tol)

    with tqdm(total=count, desc=f"sweep {space}", disable=not show_progress) as progress:
        loop = build_sweep_loop(frame, progress)
        batches = -(-count // batch_size)
        final = loop.invoke({"count": count, "seed": seed, "batch_size": batch_size, "done": 0,
                             "maxima": {}, "history": [], "continue_": True},
                            config={"recursion_limit": batches + 5})

    report = SweepReport(space=space, count=count, seed=seed, maxima=final["maxima"], tolerance=tol,
                         history=final["history"])
    for name, value in report.maxima.items():
        remember_residual(f"sweep.{name}", space, value, value <= tol, tol)
    logger.info(f"Sweep {space}: {count} specs, worst residual {max(report.maxima.values()):.2e}")
    return report

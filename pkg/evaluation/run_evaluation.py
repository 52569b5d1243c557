# evaluation/run_evaluation.py
import argparse
import json
import logging
import os
import sys

import pandas as pd
from dotenv import load_dotenv
from tqdm import tqdm

from algebra.algebra_zoo import build_pair
from evaluation import metrics_calculator as metrics
from geometry.sasaki_geometry import make_frame
from memory.session_memory import clear_session
from utils.config_loader import settings

logger = logging.getLogger(__name__)

SEVEN_DIMENSIONAL = ["sp:1", "su:3"]
NOT_SEVEN_DIMENSIONAL = ["sp:2", "so:7", "g2"]
QUICK_FAMILIES = ["sp:1", "sp:2", "so:7", "su:3", "g2"]


class EvaluationRunner:
    """Runs the acceptance matrix and writes one JSON per criterion plus a CSV summary."""

    def __init__(self, families=None, results_dir=None, sweep_count=None):
        config = settings()
        self.families = families or config["evaluation"]["families"]
        self.results_dir = results_dir or config["evaluation"]["results_dir"]
        self.sweep_count = config["sweep"]["default_count"] if sweep_count is None else sweep_count
        self.frames = {}
        os.makedirs(self.results_dir, exist_ok=True)

    def frame(self, space: str):
        if space not in self.frames:
            self.frames[space] = make_frame(build_pair(space))
        return self.frames[space]

    def _criteria(self):
        """(name, spaces, metric function) for every acceptance criterion."""
        small = [s for s in self.families if self.frame(s).n <= 7]
        named = [s for s in small if not s.startswith("su:") or s == "su:3"]
        return [
            ("dimensions", self.families, metrics.dimension_metrics),
            ("kashiwada", small, metrics.kashiwada_metrics),
            ("closed_forms", small, lambda f: metrics.sweep_metrics(f, count=self.sweep_count)),
            ("einstein_7d", [s for s in SEVEN_DIMENSIONAL if s in self.families], metrics.einstein_family_metrics),
            ("non_einstein", [s for s in NOT_SEVEN_DIMENSIONAL if s in self.families], metrics.non_einstein_metrics),
            ("divergence", small, metrics.divergence_metrics),
            ("ricci_symmetry", small, metrics.ricci_symmetry_metrics),
            ("parallel_torsion", [s for s in ["sp:1", "sp:2"] if s in self.families],
             metrics.parallel_torsion_metrics),
            ("reeb_parallel", small, metrics.reeb_metrics),
            ("named_bases", named, metrics.named_basis_metrics),
        ]

    def _run_safely(self, name, space, function):
        clear_session()
        try:
            return function(self.frame(space))
        except Exception as e:
            logger.error(f"{name} on {space} failed: {e}")
            return [{"criterion": name, "space": space, "metric": "error", "value": None, "target": str(e),
                     "pass": False}]

    def run(self) -> pd.DataFrame:
        rows = []
        criteria = self._criteria()
        total = sum(len(spaces) for _, spaces, _ in criteria)
        with tqdm(total=total, desc="acceptance") as progress:
            for name, spaces, function in criteria:
                criterion_rows = []
                for space in spaces:
                    criterion_rows.extend(self._run_safely(name, space, function))
                    progress.update(1)
                with open(os.path.join(self.results_dir, f"{name}.json"), "w") as f:
                    json.dump(criterion_rows, f, indent=2, sort_keys=True)
                rows.extend(criterion_rows)

        df = pd.DataFrame(rows, columns=["criterion", "space", "metric", "value", "target", "pass"])
        df.to_csv(os.path.join(self.results_dir, "summary.csv"), index=False)
        summary = df.groupby("criterion")["pass"].agg(["sum", "count"])
        with open(os.path.join(self.results_dir, "summary.json"), "w") as f:
            json.dump({name: {"passed": int(row["sum"]), "total": int(row["count"])}
                       for name, row in summary.iterrows()}, f, indent=2, sort_keys=True)

        print(f"\n{'=' * 80}\n📊 ACCEPTANCE SUMMARY\n{'=' * 80}")
        for name, row in summary.iterrows():
            icon = "✅" if row["sum"] == row["count"] else "❌"
            print(f"{icon} {name}: {int(row['sum'])}/{int(row['count'])}")
        failed = df[~df["pass"]]
        if not failed.empty:
            print(f"\n{'=' * 80}\n🔴 FAILURES\n{'=' * 80}")
            print(failed.to_string(index=False))
        print(f"{'=' * 80}")
        return df


def main():
    load_dotenv()
    parser = argparse.ArgumentParser(description="Run the acceptance matrix")
    parser.add_argument("--quick", action="store_true", help=f"Only {', '.join(QUICK_FAMILIES)}")
    parser.add_argument("--families", nargs="+", help="Space ids to evaluate")
    parser.add_argument("--sweep-count", type=int)
    args = parser.parse_args()
    logging.basicConfig(level=settings()["logging"]["level"], stream=sys.stderr)

    families = args.families or (QUICK_FAMILIES if args.quick else None)
    df = EvaluationRunner(families=families, sweep_count=args.sweep_count).run()
    sys.exit(0 if df["pass"].all() else 1)


if __name__ == "__main__":
    main()

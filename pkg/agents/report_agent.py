"""
ReportAgent: Result Export Agent

AGENT ROLE: Writes every artifact of an experiment into its output directory
and keeps the list of files it wrote, so a failed run can be rolled back.

OUTPUTS:
- front.csv              final front (genomes, objectives, stderrs, generation)
- solutions.csv          genomes of the front members only
- snapshots/gen_<t>.csv  nondominated archive members after generation t
- explored.csv           every evaluation made during the search
- objective_space.csv    random objective-space sample (optional)
- landscape.csv          objective surfaces (landscape command)
- summary.txt            run parameters and front statistics
- sensitivity.csv        one summary row per system (sweep command)

No file carries a timestamp, so identical runs produce identical bytes.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from tools.experiment_config import ExperimentSpec
from tools.export_tools import (
    FrontRecord,
    FrontSummary,
    export_front,
    format_summary,
    records_to_frame,
    summarize_front,
    write_table,
)
from utils.logger import get_logger

logger = get_logger(__name__)


class ReportAgent:
    """
    Agent responsible for writing results.

    Attributes:
        output_dir (Path): directory receiving all files
        written (list): every file written so far, in order
        name (str): Agent identifier for logging and tracking
    """

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)
        self.written: List[Path] = []
        self.name = "ReportAgent"

    def _track(self, path: Path) -> Path:
        self.written.append(Path(path))
        return Path(path)

    def adopt(self, paths: Sequence[Path]) -> None:
        """Track files another reporter wrote below this output directory."""
        self.written.extend(Path(p) for p in paths)

    def write_front(self, front: Sequence[FrontRecord], filename: str = "front.csv") -> Path:
        return self._track(export_front(front, self.output_dir / filename))

    def write_solutions(self, front: Sequence[FrontRecord]) -> Path:
        frame = records_to_frame(front)
        genome_cols = [c for c in frame.columns if c.startswith("S_")]
        return self._track(write_table(frame[genome_cols], self.output_dir / "solutions.csv"))

    def write_snapshots(self, snapshots: Sequence[Sequence[FrontRecord]]) -> List[Path]:
        return [
            self._track(export_front(records, self.output_dir / "snapshots" / f"gen_{t}.csv"))
            for t, records in enumerate(snapshots)
        ]

    def write_table(self, frame: pd.DataFrame, filename: str) -> Path:
        return self._track(write_table(frame, self.output_dir / filename))

    def write_summary(
        self,
        spec: ExperimentSpec,
        summary: FrontSummary,
        optimization: Optional[Dict[str, Any]] = None,
    ) -> Path:
        """Write summary.txt for an optimization run."""
        spea = spec.spea
        policy = "resampled per generation" if spec.resample_per_generation else "common random numbers"
        lines = [
            f"Experiment: {spec.name} {spec.label}",
            f"Locations: {spec.system.n}",
            f"Holding cost: {', '.join(f'{h:g}' for h in spec.system.holding)}",
            f"Shortage cost: {', '.join(f'{p:g}' for p in spec.system.shortage)}",
            "Expected demand: "
            + ", ".join(f"{loc.demand.expected_value():.6g}" for loc in spec.system.locations),
            f"Period duration: {spec.system.period_duration:g}",
            f"Scenarios: N={spec.N} seed={spec.scenario_seed} ({policy})",
            f"SPEA2: population={spea.population_size} archive={spea.archive_size} "
            f"generations={spea.generations} crossover={spea.crossover_rate:g} "
            f"mutation={spea.mutation_rate:g} s_max={spea.s_max:g} "
            f"eta_c={spea.eta_crossover:g} eta_m={spea.eta_mutation:g} seed={spea.seed}",
        ]
        if optimization is not None:
            lines.append(f"Evaluations: {optimization['evaluations']}")
            lines.append(f"Archive sizes: {', '.join(str(s) for s in optimization['archive_sizes'])}")
        lines.append("")

        path = self.output_dir / "summary.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n" + format_summary(summary), encoding="utf-8")
        return self._track(path)

    def write_optimization(
        self,
        spec: ExperimentSpec,
        optimization: Dict[str, Any],
        objective_space: Optional[pd.DataFrame] = None,
    ) -> Dict[str, Any]:
        """
        Write every artifact of an optimization run.

        Returns:
            Dictionary with agent name, the front summary and the written paths
        """
        front = optimization["front"]
        summary = summarize_front(front)

        self.write_front(front)
        self.write_solutions(front)
        self.write_snapshots(optimization["snapshots"])
        self.write_table(records_to_frame(optimization["explored"]), "explored.csv")
        if objective_space is not None:
            self.write_table(objective_space, "objective_space.csv")
        self.write_summary(spec, summary, optimization)

        logger.info(f"{self.name}: wrote {len(self.written)} files to {self.output_dir}")
        return {"agent": self.name, "summary": summary, "files": list(self.written)}

    def cleanup(self) -> int:
        """Delete every file written so far and any subdirectory left empty."""
        removed = 0
        for path in reversed(self.written):
            try:
                path.unlink()
                removed += 1
            except FileNotFoundError:
                pass
            parent = path.parent
            while self.output_dir in parent.parents and parent.exists() and not any(parent.iterdir()):
                parent.rmdir()
                parent = parent.parent
        self.written = []
        logger.warning(f"{self.name}: removed {removed} partial output files from {self.output_dir}")
        return removed

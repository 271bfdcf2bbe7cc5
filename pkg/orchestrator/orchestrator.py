"""
Orchestrator for the transshipment front optimizer.

DESIGN PATTERN: Sequential Agent Pipeline
Coordinates three agents to turn an ExperimentSpec into result files.

AGENT PIPELINE:
1. LandscapeAgent  -> Objective-space sample (only when requested)
2. OptimizerAgent  -> SPEA2 search on the selected objective subset
3. ReportAgent     -> front, solutions, snapshots, explored points, summary

Every file the ReportAgent writes is tracked; if any stage fails, the files
of the failed run are deleted before the error propagates.
"""

import datetime
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd

from agents.landscape_agent import LandscapeAgent
from agents.optimizer_agent import OptimizerAgent
from agents.report_agent import ReportAgent
from tools.experiment_config import SENSITIVITY_PRESETS, ExperimentSpec, preset_system
from tools.export_tools import FrontRecord, FrontSummary
from tools.sampling import ObjectiveEstimate
from utils.logger import get_logger, stage_timer
from utils.validators import sanitize_filename

logger = get_logger(__name__)

Estimator = Callable[[np.ndarray, int], ObjectiveEstimate]


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


class ExperimentOutcome(NamedTuple):
    front: List[FrontRecord]
    snapshots: List[List[FrontRecord]]
    summary: FrontSummary
    files: List[Path]
    trace: Dict[str, Any]


class ExperimentOrchestrator:
    """Coordinates the agent pipeline for one experiment."""

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.landscape = LandscapeAgent(spec)
        self.optimizer = OptimizerAgent(spec)
        self.reporter = ReportAgent(spec.output_dir)

    def run(self, estimator: Optional[Estimator] = None) -> Dict[str, Any]:
        """
        Execute the optimization pipeline.

        PIPELINE FLOW:
        1. Sample the objective space (if run.objective_space_samples > 0)
        2. Optimize with SPEA2
        3. Write all result files

        Args:
            estimator: replaces the scenario-pool estimator (tests)

        Returns:
            trace: Dictionary containing results from each agent
        """
        spec = self.spec
        trace: Dict[str, Any] = {"pipeline_start": _now(), "experiment": spec.name, "objectives": spec.label}

        try:
            objective_space = None
            if spec.objective_space_samples > 0:
                with stage_timer(logger, "objective_space", points=spec.objective_space_samples):
                    sampled = self.landscape.objective_space()
                trace["objective_space"] = {"agent": sampled["agent"], "points": sampled["points"]}
                objective_space = sampled["table"]

            with stage_timer(logger, "optimization", experiment=spec.name, objectives=spec.label) as stats:
                optimization = self.optimizer.optimize(estimator)
                stats["front"] = len(optimization["front"])
                stats["evaluations"] = optimization["evaluations"]
            trace["optimization"] = optimization

            with stage_timer(logger, "report", output_dir=str(spec.output_dir)) as stats:
                trace["report"] = self.reporter.write_optimization(spec, optimization, objective_space)
                stats["files"] = len(trace["report"]["files"])
        except Exception as e:
            logger.error(f"Experiment {spec.name} {spec.label} failed: {e}")
            self.reporter.cleanup()
            raise

        trace["pipeline_end"] = _now()
        return trace

    def run_landscape(self, count: Optional[int] = None, grid: Optional[bool] = None) -> Dict[str, Any]:
        """Sample the objective surfaces and write landscape.csv."""
        trace: Dict[str, Any] = {"pipeline_start": _now(), "experiment": self.spec.name}
        try:
            with stage_timer(logger, "landscape", experiment=self.spec.name) as stats:
                sampled = self.landscape.sample(count=count, grid=grid)
                stats["points"] = sampled["points"]
            trace["landscape"] = sampled
            trace["path"] = self.reporter.write_table(sampled["table"], "landscape.csv")
        except Exception as e:
            logger.error(f"Landscape sampling for {self.spec.name} failed: {e}")
            self.reporter.cleanup()
            raise
        trace["pipeline_end"] = _now()
        return trace


def run_experiment(spec: ExperimentSpec, estimator: Optional[Estimator] = None) -> ExperimentOutcome:
    """
    Optimize one experiment and write its files.

    Returns:
        ExperimentOutcome with the final front, per-generation snapshots,
        front summary, written files and the pipeline trace

    Raises:
        Whatever a stage raises, after removing the run's partial files
    """
    trace = ExperimentOrchestrator(spec).run(estimator)
    optimization = trace["optimization"]
    report = trace["report"]
    return ExperimentOutcome(
        front=optimization["front"],
        snapshots=optimization["snapshots"],
        summary=report["summary"],
        files=report["files"],
        trace=trace,
    )


def run_landscape(spec: ExperimentSpec, count: Optional[int] = None, grid: Optional[bool] = None):
    """Sample the landscape; returns (table, path of landscape.csv)."""
    trace = ExperimentOrchestrator(spec).run_landscape(count=count, grid=grid)
    return trace["landscape"]["table"], trace["path"]


def run_sensitivity(
    spec: ExperimentSpec,
    presets: Sequence[str] = SENSITIVITY_PRESETS,
    estimator: Optional[Estimator] = None,
) -> pd.DataFrame:
    """
    Run the same objective subset on several preset systems.

    Each system keeps the experiment's SPEA2 parameters, scenario count and seeds and
    writes its files into <output_dir>/<preset>/. One summary row per system
    goes to <output_dir>/sensitivity.csv. A failing system removes the files
    of every system already run.
    """
    rows = []
    reporter = ReportAgent(spec.output_dir)
    try:
        for name in presets:
            key = name.strip().lower()
            sub_spec = replace(
                spec,
                system=preset_system(key),
                name=key,
                output_dir=spec.output_dir / sanitize_filename(key),
            )
            logger.info(f"Sensitivity run {key} ({spec.label})")
            outcome = run_experiment(sub_spec, estimator)
            reporter.adopt(outcome.files)
            rows.append({"system": key, "objectives": spec.label, **outcome.summary.as_dict()})

        table = pd.DataFrame(rows)
        reporter.write_table(table, "sensitivity.csv")
    except Exception as e:
        logger.error(f"Sensitivity sweep ({spec.label}) failed: {e}")
        reporter.cleanup()
        raise
    return table

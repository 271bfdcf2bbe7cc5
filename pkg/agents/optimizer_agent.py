"""
OptimizerAgent: SPEA2 Search Agent

AGENT ROLE: Searches base-stock vectors for the Pareto front of the selected
objective subset (C/F, C/L, F/L or C/F/L).

RESPONSIBILITIES:
- Own the run's scenario policy through an ObjectiveEvaluator (common random
  numbers by default, a fresh pool per generation in resample mode)
- Project every Monte Carlo estimate onto the selected objectives, so
  unselected objectives never reach dominance or selection
- Run SPEA2 and convert the final front and per-generation snapshots into
  FrontRecords

INTEGRATION:
- Uses tools.sampling.ObjectiveEvaluator for estimates
- Uses tools.evolve.run_spea2 for the search
- Called by the orchestrator; its output feeds ReportAgent
"""

from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from tools.evolve import Evaluation, run_spea2
from tools.experiment_config import ExperimentSpec
from tools.export_tools import records_from_individuals
from tools.sampling import ObjectiveEstimate, ObjectiveEvaluator
from utils.logger import get_logger, log_with_context

logger = get_logger(__name__)


def subset_evaluator(
    estimator: Callable[[np.ndarray, int], ObjectiveEstimate],
    objectives: Sequence[str],
) -> Callable[[np.ndarray, int], Evaluation]:
    """Wrap an estimator so that it reports only the selected objectives."""
    names = tuple(objectives)

    def evaluate(genome: np.ndarray, generation: int) -> Evaluation:
        estimate = estimator(genome, generation)
        return Evaluation(objectives=estimate.vector(names), payload=estimate)

    return evaluate


class OptimizerAgent:
    """
    Agent responsible for the multiobjective search.

    Attributes:
        spec (ExperimentSpec): experiment to optimize
        name (str): Agent identifier for logging and tracking
    """

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.name = "OptimizerAgent"
        self.estimator = ObjectiveEvaluator(
            spec.system,
            spec.N,
            spec.scenario_seed,
            resample_per_generation=spec.resample_per_generation,
        )

    def optimize(self, estimator: Optional[Callable[[np.ndarray, int], ObjectiveEstimate]] = None) -> Dict[str, Any]:
        """
        Run SPEA2 on the experiment's system and objective subset.

        Args:
            estimator: replaces the scenario-pool estimator (tests)

        Returns:
            Dictionary containing:
                - agent: Agent name
                - objectives: selected objective names
                - result: the SpeaResult
                - front: FrontRecords of the final front
                - snapshots: FrontRecords per generation
                - evaluations: number of evaluations
        """
        spec = self.spec
        evaluator = subset_evaluator(estimator or self.estimator, spec.objectives)

        log_with_context(
            logger, "info", f"Optimizing {spec.label} on {spec.name}",
            locations=spec.system.n, scenarios=spec.N, seed=spec.spea.seed,
        )
        result = run_spea2(
            spec.spea,
            evaluator,
            spec.orientation,
            spec.system.n,
            reevaluate_archive=spec.resample_per_generation,
        )

        last = len(result.snapshots) - 1
        front = records_from_individuals(result.front, spec.objectives, generation=last)
        snapshots = [
            records_from_individuals(members, spec.objectives, generation=t)
            for t, members in enumerate(result.snapshots)
        ]
        explored = records_from_individuals(result.explored, spec.objectives)

        logger.info(f"{self.name}: front of {len(front)} after {result.evaluations} evaluations")
        return {
            "agent": self.name,
            "objectives": list(spec.objectives),
            "result": result,
            "front": front,
            "snapshots": snapshots,
            "explored": explored,
            "archive_sizes": list(result.archive_sizes),
            "evaluations": result.evaluations,
        }

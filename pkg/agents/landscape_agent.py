"""
LandscapeAgent: Objective Surface Sampling Agent

AGENT ROLE: Tabulates the cost, fill rate and lead time surfaces over the
base-stock space, and the cloud of reachable points in the selected
objective space.

RESPONSIBILITIES:
- Random or grid sampling of S in [0, S_max]^n
- Objective-space sampling restricted to the selected objectives

INTEGRATION:
- Uses tools.landscape_tools
- Called by the orchestrator for the `landscape` command and, when
  run.objective_space_samples > 0, during optimization runs
"""

from typing import Any, Dict, Optional

from tools.experiment_config import ExperimentSpec
from tools.landscape_tools import sample_landscape, sample_objective_space
from utils.logger import get_logger

logger = get_logger(__name__)


class LandscapeAgent:
    """
    Agent responsible for surface and objective-space sampling.

    Attributes:
        spec (ExperimentSpec): experiment whose system is sampled
        name (str): Agent identifier for logging and tracking
    """

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.name = "LandscapeAgent"

    def sample(self, count: Optional[int] = None, grid: Optional[bool] = None) -> Dict[str, Any]:
        """
        Sample all three objectives.

        Args:
            count: random points, or levels per axis on a grid (spec default when None)
            grid: grid instead of random points (spec default when None)

        Returns:
            Dictionary with agent name, point count and the table
        """
        grid = self.spec.grid if grid is None else grid
        table = sample_landscape(self.spec, count=count, grid=grid)
        logger.info(f"{self.name}: sampled {len(table)} points")
        return {"agent": self.name, "points": len(table), "grid": grid, "table": table}

    def objective_space(self, count: Optional[int] = None) -> Dict[str, Any]:
        """Sample the selected objectives at random base-stock vectors."""
        count = self.spec.objective_space_samples if count is None else count
        table = sample_objective_space(self.spec, count)
        logger.info(f"{self.name}: sampled {len(table)} objective-space points")
        return {"agent": self.name, "points": len(table), "table": table}

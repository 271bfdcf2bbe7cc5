"""
Landscape Sampling Tools

Estimates the three objectives over many base-stock vectors, either drawn
uniformly from [0, S_max]^n or laid out on a regular grid. Every point is
evaluated on the same scenario pool, so neighboring points differ only
through S and the tables redraw the objective surfaces directly.
"""

import itertools
from typing import Optional

import numpy as np
import pandas as pd

from tools.experiment_config import OBJECTIVES, ExperimentSpec
from tools.sampling import estimate_objectives, sample_scenarios
from utils.logger import get_logger
from utils.validators import validate_count

logger = get_logger(__name__)

_PROGRESS_EVERY = 5000


def genome_columns(n: int) -> list:
    return [f"S_{i + 1}" for i in range(n)]


def grid_points(n: int, per_axis: int, s_max: float) -> np.ndarray:
    """All points of a regular grid with ``per_axis`` levels from 0 to s_max per location."""
    per_axis = validate_count(per_axis, name="grid points per axis", min_val=2)
    levels = np.linspace(0.0, s_max, per_axis)
    return np.array(list(itertools.product(levels, repeat=n)), dtype=float)


def sample_landscape(
    spec: ExperimentSpec,
    count: Optional[int] = None,
    seed: Optional[int] = None,
    grid: bool = False,
    points: Optional[np.ndarray] = None,
) -> pd.DataFrame:
    """
    Estimate cost, fill rate and lead time at many base-stock vectors.

    Args:
        spec: experiment (system, scenario N and seed, s_max)
        count: random points, or levels per axis when ``grid`` is set
        seed: seed for the random points (defaults to the SPEA2 seed)
        grid: evaluate a regular grid instead of random points
        points: explicit (m, n) base-stock vectors; overrides count and grid

    Returns:
        DataFrame with columns S_1..S_n, cost, fill, lead and their stderrs

    Raises:
        ValidationError: If count is 0
    """
    n = spec.system.n
    s_max = spec.spea.s_max

    if points is not None:
        S = np.atleast_2d(np.asarray(points, dtype=float))
    elif grid:
        S = grid_points(n, count if count is not None else 9, s_max)
    else:
        count = validate_count(count if count is not None else spec.landscape_samples, name="count")
        rng = np.random.default_rng(spec.spea.seed if seed is None else seed)
        S = rng.uniform(0.0, s_max, size=(count, n))

    pool = sample_scenarios(spec.system, spec.N, spec.scenario_seed)
    logger.info(f"Sampling landscape: {len(S)} points, n={n}, N={spec.N}, grid={grid}")

    rows = []
    for idx, s in enumerate(S):
        estimate = estimate_objectives(spec.system, s, pool)
        rows.append(
            [*s, estimate.cost_mean, estimate.fill_mean, estimate.lead_mean,
             estimate.cost_stderr, estimate.fill_stderr, estimate.lead_stderr]
        )
        if (idx + 1) % _PROGRESS_EVERY == 0:
            logger.info(f"  {idx + 1}/{len(S)} points evaluated")

    columns = genome_columns(n) + list(OBJECTIVES) + [f"{name}_stderr" for name in OBJECTIVES]
    return pd.DataFrame(rows, columns=columns)


def sample_objective_space(spec: ExperimentSpec, count: int, seed: Optional[int] = None) -> pd.DataFrame:
    """Random-S sample restricted to the experiment's selected objectives."""
    table = sample_landscape(spec, count=count, seed=seed)
    n = spec.system.n
    keep = genome_columns(n) + list(spec.objectives) + [f"{name}_stderr" for name in spec.objectives]
    return table[keep]

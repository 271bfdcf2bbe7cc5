"""
Scenario Sampling and Monte Carlo Estimation

Expected cost, fill rate and lead time have no closed form once
transshipment is involved, so they are estimated as sample averages over N
demand scenarios. Each average comes with its standard error
sample_std / sqrt(N), which shrinks by sqrt(N).

COMMON RANDOM NUMBERS:
A ScenarioSet is drawn once and reused for every candidate base-stock
vector, which makes the estimate a deterministic function of S and keeps
comparisons between candidates free of sampling noise. ObjectiveEvaluator can
instead draw a fresh pool per generation (resample mode).

STREAMS:
SeedSequence(seed) spawns one child per location; each child drives its own
PCG64 generator. Scenario k takes the k-th draw of every location stream, so
scenario k is the same whatever N is, and the pool is bit-identical for
identical (config, N, seed).
"""

import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from tools.model import ScenarioBatch, SystemConfig, evaluate_scenarios
from utils.logger import get_logger
from utils.validators import ValidationError, validate_count

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    """
    N demand realizations drawn once per run.

    Attributes:
        demands: (N, n) read-only array, row k is scenario D^k
        seed: seed the pool was drawn from
    """
    demands: np.ndarray
    seed: int

    def __post_init__(self):
        demands = np.array(self.demands, dtype=float)
        if demands.ndim != 2 or demands.shape[0] == 0:
            raise ValidationError(f"scenario pool must be a non-empty (N, n) array, got {demands.shape}")
        demands.setflags(write=False)
        object.__setattr__(self, "demands", demands)

    @property
    def N(self) -> int:
        return int(self.demands.shape[0])

    @property
    def scenarios(self) -> list:
        return [row for row in self.demands]

    def permuted(self, order: Sequence[int]) -> "ScenarioSet":
        """The same scenarios with location columns reordered."""
        return ScenarioSet(demands=self.demands[:, list(order)], seed=self.seed)


@dataclass(frozen=True)
class ObjectiveEstimate:
    """Sample means and standard errors of the three objectives."""
    cost_mean: float
    fill_mean: float
    lead_mean: float
    cost_stderr: float
    fill_stderr: float
    lead_stderr: float
    N: int

    def mean_of(self, objective: str) -> float:
        return getattr(self, f"{objective}_mean")

    def stderr_of(self, objective: str) -> float:
        return getattr(self, f"{objective}_stderr")

    def vector(self, objectives: Sequence[str] = ("cost", "fill", "lead")) -> np.ndarray:
        """Means of the selected objectives in the given order."""
        return np.array([self.mean_of(name) for name in objectives], dtype=float)


def sample_scenarios(config: SystemConfig, N: int, seed: int) -> ScenarioSet:
    """
    Draw N i.i.d. demand vectors.

    Raises:
        ValidationError: If N < 1
    """
    N = validate_count(N, name="N")
    children = np.random.SeedSequence(int(seed)).spawn(config.n)
    columns = [
        loc.demand.sample(np.random.Generator(np.random.PCG64(child)), N)
        for loc, child in zip(config.locations, children)
    ]
    return ScenarioSet(demands=np.column_stack(columns), seed=int(seed))


def _mean_and_stderr(values: np.ndarray) -> Tuple[float, float]:
    # Constant samples: return the value itself so that degenerate demand is exact
    if values.size == 1 or np.all(values == values[0]):
        return float(values[0]), 0.0
    return math.fsum(values) / values.size, float(np.std(values, ddof=1) / np.sqrt(values.size))


def _evaluate_pool(config: SystemConfig, S, pool: ScenarioSet) -> ScenarioBatch:
    if not isinstance(pool, ScenarioSet) or pool.N == 0:
        raise ValidationError("scenario pool is empty")
    return evaluate_scenarios(config, S, pool.demands)


def estimate_objectives(config: SystemConfig, S, pool: ScenarioSet) -> ObjectiveEstimate:
    """Sample-average estimate of expected cost, fill rate and lead time."""
    batch = _evaluate_pool(config, S, pool)
    cost, cost_se = _mean_and_stderr(batch.cost)
    fill, fill_se = _mean_and_stderr(batch.fill_rate)
    lead, lead_se = _mean_and_stderr(batch.lead_time)
    return ObjectiveEstimate(
        cost_mean=cost,
        fill_mean=fill,
        lead_mean=lead,
        cost_stderr=cost_se,
        fill_stderr=fill_se,
        lead_stderr=lead_se,
        N=pool.N,
    )


def estimate_decomposition(config: SystemConfig, S, pool: ScenarioSet) -> Tuple[float, float]:
    """
    Split the expected cost into newsvendor cost and transshipment income.

    Returns:
        (newsvendor_mean, transship_income_mean)
    """
    batch = _evaluate_pool(config, S, pool)
    newsvendor, _ = _mean_and_stderr(batch.newsvendor_cost)
    income, _ = _mean_and_stderr(batch.transship_income)
    return newsvendor, income


class ObjectiveEvaluator:
    """
    Evaluates base-stock vectors under the run's scenario policy.

    With common random numbers every call uses the same pool. In resample
    mode generation t uses a pool drawn from SeedSequence([seed, t]).
    """

    def __init__(self, config: SystemConfig, N: int, seed: int, resample_per_generation: bool = False):
        self.config = config
        self.N = validate_count(N, name="N")
        self.seed = int(seed)
        self.resample_per_generation = resample_per_generation
        self._pools: Dict[int, ScenarioSet] = {}
        self.calls = 0

    def pool(self, generation: int = 0) -> ScenarioSet:
        key = generation if self.resample_per_generation else 0
        if key not in self._pools:
            if self.resample_per_generation:
                seed = int(np.random.SeedSequence([self.seed, key]).generate_state(1, dtype=np.uint64)[0])
            else:
                seed = self.seed
            self._pools = {key: sample_scenarios(self.config, self.N, seed)}
            logger.debug(f"drew scenario pool generation={key} N={self.N}")
        return self._pools[key]

    def evaluate(self, S, generation: int = 0) -> ObjectiveEstimate:
        self.calls += 1
        return estimate_objectives(self.config, S, self.pool(generation))

    def __call__(self, S, generation: int = 0) -> ObjectiveEstimate:
        return self.evaluate(S, generation)

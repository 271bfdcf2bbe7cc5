"""
SPEA2 Evolution Engine

Strength Pareto evolutionary algorithm over real-valued genomes in
[0, S_max]^n, generic over any evaluator that maps a genome to a vector of
objective values.

KEY FEATURES:
- Per-objective orientation: objectives are reported in their natural sense
  (fill rate maximized) and negated internally so the engine only minimizes
- Fine-grained fitness: strength, raw fitness and k-th nearest neighbor density
  in min-max normalized objective space
- Environmental selection: all nondominated individuals, truncated
  lexicographically by nearest-neighbor distances, or filled with the best
  dominated ones
- Binary tournament mating selection with replacement
- Simulated binary crossover and per-gene polynomial mutation, clamped to bounds
- One seeded generator drives initialization, selection and variation, so a
  run is a pure function of its seed and evaluator

MAIN LOOP:
    P_0 <- uniform random genomes, A_0 <- empty
    for t in 0..T-1:
        assign fitness on P_t + A_t
        A_{t+1} <- environmental selection
        stop after the last generation
        mating pool <- N_P binary tournaments on A_{t+1}
        P_{t+1} <- crossover + mutation of consecutive pairs

Every generation evaluates N_P genomes, so a run costs N_P * T evaluations.
"""

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.spatial.distance import cdist

from config import Config
from utils.logger import get_logger, log_with_context
from utils.validators import ValidationError, validate_probability

logger = get_logger(__name__)

# Genes closer than this are treated as equal and skipped by crossover
_CROSSOVER_EPS = 1e-14


class Sense(str, enum.Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


@dataclass(frozen=True)
class ObjectiveOrientation:
    """
    Optimization sense of every objective, fixed for a run.

    The default orientation is (minimize cost, maximize fill, minimize lead).
    """
    senses: Tuple[Sense, ...]

    def __post_init__(self):
        object.__setattr__(self, "senses", tuple(Sense(s) for s in self.senses))
        if not self.senses:
            raise ValidationError("orientation needs at least one objective")

    @classmethod
    def default(cls) -> "ObjectiveOrientation":
        return cls((Sense.MINIMIZE, Sense.MAXIMIZE, Sense.MINIMIZE))

    @classmethod
    def minimize_all(cls, k: int) -> "ObjectiveOrientation":
        return cls(tuple(Sense.MINIMIZE for _ in range(k)))

    @property
    def k(self) -> int:
        return len(self.senses)

    @property
    def signs(self) -> np.ndarray:
        return np.array([1.0 if s is Sense.MINIMIZE else -1.0 for s in self.senses])

    def to_minimization(self, values) -> np.ndarray:
        """Flip maximized columns so that smaller is always better."""
        return np.asarray(values, dtype=float) * self.signs

    def subset(self, indices: Sequence[int]) -> "ObjectiveOrientation":
        return ObjectiveOrientation(tuple(self.senses[i] for i in indices))


def _check_vector(values, k: int, label: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size != k:
        raise ValidationError(f"{label} must have {k} objectives, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{label} contains non-finite objective values: {arr.tolist()}")
    return arr


def dominates(a, b, orient: Optional[ObjectiveOrientation] = None) -> bool:
    """
    Pareto dominance under an orientation.

    Returns:
        True iff a is no worse than b everywhere and strictly better somewhere

    Raises:
        ValidationError: On dimension mismatch or non-finite values
    """
    a = np.asarray(a, dtype=float)
    if orient is None:
        orient = ObjectiveOrientation.minimize_all(a.size)
    a = orient.to_minimization(_check_vector(a, orient.k, "a"))
    b = orient.to_minimization(_check_vector(b, orient.k, "b"))
    return bool(np.all(a <= b) and np.any(a < b))


@dataclass
class Evaluation:
    """Objective vector plus an opaque payload (e.g. the full estimate)."""
    objectives: np.ndarray
    payload: Any = None


@dataclass(eq=False)
class Individual:
    """
    A genome with its evaluation and SPEA2 fitness values.

    fitness = raw_fitness + density, and fitness < 1 exactly when nothing in
    the combined population and archive dominates the individual.
    """
    genome: np.ndarray
    objectives: np.ndarray
    payload: Any = None
    generation: int = 0
    raw_fitness: float = 0.0
    density: float = 0.0
    fitness: float = 0.0

    @property
    def nondominated(self) -> bool:
        return self.fitness < 1.0


Evaluator = Callable[[np.ndarray, int], Union[Evaluation, Sequence[float], np.ndarray]]


class SpeaParams(BaseModel):
    """SPEA2 parameters with the reference experiment's defaults."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    population_size: int = Field(Config.DEFAULT_POPULATION_SIZE, ge=1, description="N_P")
    archive_size: int = Field(Config.DEFAULT_ARCHIVE_SIZE, ge=1, description="N_A")
    generations: int = Field(Config.DEFAULT_GENERATIONS, ge=1, description="T")
    crossover_rate: float = Field(Config.DEFAULT_CROSSOVER_RATE)
    mutation_rate: float = Field(Config.DEFAULT_MUTATION_RATE, description="Per-gene probability")
    s_max: float = Field(Config.DEFAULT_S_MAX, gt=0, allow_inf_nan=False, description="Upper genome bound")
    eta_crossover: float = Field(Config.DEFAULT_ETA_CROSSOVER, ge=0, allow_inf_nan=False)
    eta_mutation: float = Field(Config.DEFAULT_ETA_MUTATION, ge=0, allow_inf_nan=False)
    seed: int = Config.DEFAULT_SEED
    k_neighbors: Optional[int] = Field(None, ge=1, description="Density neighbor index; default floor(sqrt(N_P + N_A))")

    @field_validator("crossover_rate", "mutation_rate")
    @classmethod
    def validate_rate(cls, v, info):
        """Validate rates."""
        try:
            return validate_probability(v, name=info.field_name)
        except ValidationError as e:
            raise ValueError(str(e)) from e

    @property
    def k(self) -> int:
        if self.k_neighbors is not None:
            return self.k_neighbors
        return math.isqrt(self.population_size + self.archive_size)


@dataclass
class SpeaResult:
    """Outcome of a SPEA2 run."""
    front: List[Individual]
    archive: List[Individual]
    snapshots: List[List[Individual]]
    archive_sizes: List[int]
    explored: List[Individual]
    evaluations: int
    reevaluations: int = 0
    orientation: Optional[ObjectiveOrientation] = field(default=None, repr=False)


def _objective_matrix(individuals: Sequence[Individual], orient: ObjectiveOrientation) -> np.ndarray:
    if not individuals:
        return np.empty((0, orient.k))
    return orient.to_minimization(np.vstack([ind.objectives for ind in individuals]))


def _dominance_matrix(F: np.ndarray) -> np.ndarray:
    """D[i, j] is True when row i dominates row j (minimization)."""
    no_worse = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    better = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return no_worse & better


def _bounds(F: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Column minimum and range; constant columns get a range of 1."""
    lo = F.min(axis=0)
    span = F.max(axis=0) - lo
    return lo, np.where(span > 0, span, 1.0)


def _normalize(F: np.ndarray, bounds: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> np.ndarray:
    """Min-max scale each column to [0, 1], by default over F itself."""
    lo, span = _bounds(F) if bounds is None else bounds
    return (F - lo) / span


def nondominated(individuals: Sequence[Individual], orient: ObjectiveOrientation) -> List[Individual]:
    """Members no other member dominates, in their original order."""
    F = _objective_matrix(individuals, orient)
    if F.shape[0] == 0:
        return []
    dominated = _dominance_matrix(F).any(axis=0)
    return [ind for ind, d in zip(individuals, dominated) if not d]


def assign_fitness(
    individuals: List[Individual],
    orient: ObjectiveOrientation,
    k: Optional[int] = None,
) -> List[Individual]:
    """
    Set strength-based raw fitness, density and fitness on every individual.

    strength(i) counts the individuals i dominates; raw_fitness(i) sums the
    strengths of those dominating i; density(i) = 1 / (sigma_k + 2) with sigma_k
    the distance to the k-th nearest neighbor in normalized objective space.

    Args:
        individuals: combined population and archive, evaluated
        orient: objective orientation
        k: neighbor index; floor(sqrt(len(individuals))) when not given

    Returns:
        The same list, updated in place
    """
    m = len(individuals)
    if m == 0:
        return individuals

    F = _objective_matrix(individuals, orient)
    D = _dominance_matrix(F)
    strength = D.sum(axis=1).astype(float)
    raw = D.T.astype(float) @ strength

    if k is None:
        k = math.isqrt(m)
    if m > 1:
        distances = np.sort(cdist(_normalize(F), _normalize(F)), axis=1)
        # column 0 is the distance to itself
        sigma = distances[:, min(k, m - 1)]
    else:
        sigma = np.zeros(1)
    density = 1.0 / (sigma + 2.0)

    for ind, r, d in zip(individuals, raw, density):
        ind.raw_fitness = float(r)
        ind.density = float(d)
        ind.fitness = float(r + d)
    return individuals


def _truncation_victim(distances: np.ndarray) -> int:
    """Index whose sorted distance row is lexicographically smallest (lowest index on ties)."""
    rows = np.sort(distances, axis=1)
    order = np.lexsort(rows[:, ::-1].T)
    return int(order[0])


def truncate(
    archive: List[Individual],
    capacity: int,
    orient: ObjectiveOrientation,
    bounds: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> List[Individual]:
    """
    Shrink an archive to ``capacity`` by nearest-neighbor truncation.

    Each step removes the individual whose distances to the others, sorted
    ascending, are lexicographically smallest; distances are recomputed over
    the survivors after every removal.

    Args:
        bounds: (lower, range) per minimized objective used for min-max
            scaling; defaults to the archive's own range
    """
    if len(archive) <= capacity:
        return list(archive)

    F = _normalize(_objective_matrix(archive, orient), bounds)
    distances = cdist(F, F)
    np.fill_diagonal(distances, np.inf)
    keep = list(range(len(archive)))

    while len(keep) > capacity:
        victim = _truncation_victim(distances)
        distances = np.delete(np.delete(distances, victim, axis=0), victim, axis=1)
        del keep[victim]

    return [archive[i] for i in keep]


def environmental_selection(
    individuals: List[Individual],
    capacity: int,
    orient: ObjectiveOrientation,
) -> List[Individual]:
    """
    Build the next archive from a fitness-assigned combined set.

    Nondominated individuals (fitness < 1) are copied first. An overfull
    archive is truncated; an underfull one is filled with the best dominated
    individuals by fitness.
    """
    front = [ind for ind in individuals if ind.fitness < 1.0]

    if len(front) > capacity:
        # same scale as the density term: the whole combined set
        bounds = _bounds(_objective_matrix(individuals, orient))
        return truncate(front, capacity, orient, bounds)

    if len(front) < capacity:
        dominated = [ind for ind in individuals if ind.fitness >= 1.0]
        order = np.argsort([ind.fitness for ind in dominated], kind="stable")
        front = front + [dominated[i] for i in order[: capacity - len(front)]]

    return front


def binary_tournament(archive: Sequence[Individual], rng: np.random.Generator) -> Individual:
    """
    Draw two members with replacement and return the lower fitness one.

    Raises:
        ValidationError: If the archive is empty
    """
    if len(archive) == 0:
        raise ValidationError("binary tournament needs a nonempty archive")
    i, j = rng.integers(0, len(archive), size=2)
    a, b = archive[int(i)], archive[int(j)]
    if a.fitness < b.fitness:
        return a
    if b.fitness < a.fitness:
        return b
    return a if rng.random() < 0.5 else b


def _sbx(p1: np.ndarray, p2: np.ndarray, eta: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    c1, c2 = p1.copy(), p2.copy()
    u = rng.random(p1.size)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    cross = np.abs(p1 - p2) > _CROSSOVER_EPS
    c1[cross] = 0.5 * ((1.0 + beta[cross]) * p1[cross] + (1.0 - beta[cross]) * p2[cross])
    c2[cross] = 0.5 * ((1.0 - beta[cross]) * p1[cross] + (1.0 + beta[cross]) * p2[cross])
    return c1, c2


def _polynomial_mutation(
    genome: np.ndarray, rate: float, eta: float, upper: float, rng: np.random.Generator
) -> np.ndarray:
    child = genome.copy()
    mutate = rng.random(genome.size) < rate
    for j in np.flatnonzero(mutate):
        x = child[j]
        r = rng.random()
        power = 1.0 / (eta + 1.0)
        if r < 0.5:
            xy = 1.0 - x / upper
            val = 2.0 * r + (1.0 - 2.0 * r) * xy ** (eta + 1.0)
            delta = val ** power - 1.0
        else:
            xy = 1.0 - (upper - x) / upper
            val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * xy ** (eta + 1.0)
            delta = 1.0 - val ** power
        child[j] = x + delta * upper
    return child


def vary(
    parents: Tuple[np.ndarray, np.ndarray],
    params: SpeaParams,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Produce two offspring from two parents.

    With probability crossover_rate the parents are recombined by simulated
    binary crossover; each gene of each child is then mutated with probability
    mutation_rate. Children are clamped to [0, s_max].
    """
    p1 = np.asarray(parents[0], dtype=float)
    p2 = np.asarray(parents[1], dtype=float)
    upper = params.s_max

    if rng.random() < params.crossover_rate:
        c1, c2 = _sbx(p1, p2, params.eta_crossover, rng)
    else:
        c1, c2 = p1.copy(), p2.copy()

    c1 = _polynomial_mutation(np.clip(c1, 0.0, upper), params.mutation_rate, params.eta_mutation, upper, rng)
    c2 = _polynomial_mutation(np.clip(c2, 0.0, upper), params.mutation_rate, params.eta_mutation, upper, rng)
    return np.clip(c1, 0.0, upper), np.clip(c2, 0.0, upper)


def _evaluate(
    evaluator: Evaluator,
    genome: np.ndarray,
    generation: int,
    orient: ObjectiveOrientation,
) -> Individual:
    result = evaluator(genome, generation)
    if not isinstance(result, Evaluation):
        result = Evaluation(objectives=np.asarray(result, dtype=float))
    objectives = _check_vector(result.objectives, orient.k, "evaluator result")
    return Individual(genome=genome, objectives=objectives, payload=result.payload, generation=generation)


def _snapshot(archive: Sequence[Individual]) -> List[Individual]:
    # copies, since later fitness assignment mutates archive members
    return [replace(ind) for ind in archive if ind.fitness < 1.0]


def run_spea2(
    params: SpeaParams,
    evaluator: Evaluator,
    orient: ObjectiveOrientation,
    dimension: int,
    reevaluate_archive: bool = False,
) -> SpeaResult:
    """
    Run SPEA2 for params.generations generations.

    Args:
        params: engine parameters
        evaluator: callable (genome, generation) -> Evaluation or objective vector
        orient: orientation of the evaluator's objectives
        dimension: genome length n
        reevaluate_archive: re-estimate archive members every generation
            (meaningful only when the evaluator resamples per generation)

    Returns:
        SpeaResult; front holds the nondominated members of the final archive

    Raises:
        Whatever the evaluator raises
    """
    rng = np.random.default_rng(params.seed)
    k = params.k
    n_p, n_a = params.population_size, params.archive_size

    logger.info(
        f"SPEA2 start: n={dimension} N_P={n_p} N_A={n_a} T={params.generations} "
        f"objectives={orient.k} seed={params.seed}"
    )

    genomes = rng.uniform(0.0, params.s_max, size=(n_p, dimension))
    population = [_evaluate(evaluator, g, 0, orient) for g in genomes]
    explored = list(population)
    evaluations = len(population)
    reevaluations = 0

    archive: List[Individual] = []
    snapshots: List[List[Individual]] = []
    archive_sizes: List[int] = []

    for t in range(params.generations):
        if reevaluate_archive and t > 0:
            archive = [_evaluate(evaluator, ind.genome, t, orient) for ind in archive]
            reevaluations += len(archive)

        combined = assign_fitness(population + archive, orient, k)
        archive = environmental_selection(combined, n_a, orient)
        snapshots.append(_snapshot(archive))
        archive_sizes.append(len(archive))

        log_with_context(
            logger, "info", f"generation {t} done",
            generation=t, archive=len(archive), nondominated=len(snapshots[-1]), evaluations=evaluations,
        )

        if t == params.generations - 1:
            break

        pool = [binary_tournament(archive, rng) for _ in range(n_p)]
        offspring: List[np.ndarray] = []
        for i in range(0, n_p, 2):
            mate = pool[i + 1] if i + 1 < n_p else pool[0]
            offspring.extend(vary((pool[i].genome, mate.genome), params, rng))
        offspring = offspring[:n_p]

        population = [_evaluate(evaluator, g, t + 1, orient) for g in offspring]
        explored.extend(population)
        evaluations += len(population)

    front = nondominated(archive, orient)
    logger.info(f"SPEA2 done: front={len(front)} evaluations={evaluations}")

    return SpeaResult(
        front=front,
        archive=archive,
        snapshots=snapshots,
        archive_sizes=archive_sizes,
        explored=explored,
        evaluations=evaluations,
        reevaluations=reevaluations,
        orientation=orient,
    )

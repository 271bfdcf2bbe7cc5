"""
Inventory System Model

Domain types and exact single-period evaluation for an n-location
single-product system with lateral transshipment.

PERIOD SEQUENCE:
1. Every location starts the period at its order-up-to level S_i.
2. Demand D_i is observed and served from local stock.
3. Locations left with surplus ship to locations left with shortage along the
   income-maximizing plan (complete pooling over profitable routes).
4. Remaining surplus pays holding cost h_i, remaining shortage is lost and pays
   shortage cost p_j.

Because replenishment is order-up-to and unmet demand is lost, each period
starts again at exactly S, so periods are i.i.d. and a single period is all
that needs to be evaluated.

OBJECTIVES PER SCENARIO:
- cost      = sum h_i (S_i - D_i)^+ + sum p_j (D_j - S_j)^+ - K
- fill rate = sum_j min(D_j, S_j + sum_i T_ij) / sum_j D_j   (1 when no demand)
- lead time = sum_ij T_ij * L_ij

The first two sums form the newsvendor cost (no transshipment) and K is the
transshipment income, so cost = newsvendor_cost - transship_income holds in
every scenario.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from tools.transship import TransshipmentPlan, solve_transshipment, solve_two_location_batch
from utils.logger import get_logger
from utils.validators import (
    ConfigValidationError,
    ValidationError,
    validate_nonnegative_vector,
    validate_square_matrix,
)

logger = get_logger(__name__)

DEMAND_KINDS = ("normal",)


@dataclass(frozen=True)
class DemandSpec:
    """Normal demand clamped at zero."""
    mean: float
    std_dev: float
    kind: str = "normal"

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` demands; negative draws are clamped to 0."""
        return np.maximum(rng.normal(self.mean, self.std_dev, size), 0.0)

    def expected_value(self) -> float:
        """E[max(X, 0)] for X ~ N(mean, std_dev)."""
        if self.std_dev == 0:
            return max(self.mean, 0.0)
        z = self.mean / self.std_dev
        return float(self.mean * stats.norm.cdf(z) + self.std_dev * stats.norm.pdf(z))


@dataclass(frozen=True)
class LocationParams:
    holding_cost: float
    shortage_cost: float
    demand: DemandSpec


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """
    An n-location system.

    Attributes:
        locations: per-location costs and demand
        transship_cost: n x n per-unit shipping cost tau_ij
        lead_time: n x n per-unit shipping lead time L_ij
        period_duration: review period length; defaults to max(L_ij) + 1
    """
    locations: Tuple[LocationParams, ...]
    transship_cost: np.ndarray
    lead_time: np.ndarray
    period_duration: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "locations", tuple(self.locations))
        for name in ("transship_cost", "lead_time"):
            matrix = np.array(getattr(self, name), dtype=float)
            matrix.setflags(write=False)
            object.__setattr__(self, name, matrix)
        if self.period_duration is None:
            lead = self.lead_time
            longest = 0.0
            if lead.ndim == 2 and lead.shape[0] == lead.shape[1] and lead.shape[0] > 1:
                longest = float(np.max(lead[~np.eye(lead.shape[0], dtype=bool)]))
            object.__setattr__(self, "period_duration", longest + 1.0)
        else:
            object.__setattr__(self, "period_duration", float(self.period_duration))

    @property
    def n(self) -> int:
        return len(self.locations)

    @property
    def holding(self) -> np.ndarray:
        return np.array([loc.holding_cost for loc in self.locations], dtype=float)

    @property
    def shortage(self) -> np.ndarray:
        return np.array([loc.shortage_cost for loc in self.locations], dtype=float)

    def profit_matrix(self) -> np.ndarray:
        """Per-unit route profit h_i + p_j - tau_ij with a zero diagonal."""
        profit = self.holding[:, None] + self.shortage[None, :] - self.transship_cost
        np.fill_diagonal(profit, 0.0)
        return profit

    def permuted(self, order: Sequence[int]) -> "SystemConfig":
        """The same system with locations reordered."""
        order = list(order)
        return SystemConfig(
            locations=tuple(self.locations[i] for i in order),
            transship_cost=self.transship_cost[np.ix_(order, order)],
            lead_time=self.lead_time[np.ix_(order, order)],
            period_duration=self.period_duration,
        )


@dataclass(frozen=True, eq=False)
class ScenarioOutcome:
    cost: float
    fill_rate: float
    lead_time: float
    plan: TransshipmentPlan
    newsvendor_cost: float
    transship_income: float


@dataclass(frozen=True, eq=False)
class ScenarioBatch:
    """Per-scenario outcome arrays for a whole scenario pool."""
    cost: np.ndarray
    fill_rate: np.ndarray
    lead_time: np.ndarray
    newsvendor_cost: np.ndarray
    transship_income: np.ndarray
    shipped: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.cost.shape[0])


def validate_config(config: SystemConfig) -> SystemConfig:
    """
    Check every invariant of a system configuration.

    Returns:
        The same config when valid

    Raises:
        ConfigValidationError: Naming the first violated invariant and its indices
    """
    if not isinstance(config, SystemConfig):
        raise ValidationError(f"expected SystemConfig, got {type(config).__name__}")

    n = config.n
    if n < 1:
        raise ConfigValidationError("at least one location is required", field="locations")

    for i, loc in enumerate(config.locations):
        for name in ("holding_cost", "shortage_cost"):
            value = getattr(loc, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise ConfigValidationError("must be a finite number", field=f"locations[{i}].{name}")
            if value < 0:
                raise ConfigValidationError(f"must be >= 0, got {value}", field=f"locations[{i}].{name}")
        demand = loc.demand
        if demand.kind not in DEMAND_KINDS:
            raise ConfigValidationError(
                f"unsupported demand kind '{demand.kind}', expected one of {list(DEMAND_KINDS)}",
                field=f"locations[{i}].demand.kind",
            )
        for name in ("mean", "std_dev"):
            value = getattr(demand, name)
            if not math.isfinite(value) or value < 0:
                raise ConfigValidationError(
                    f"must be finite and >= 0, got {value}", field=f"locations[{i}].demand.{name}"
                )

    validate_square_matrix(config.transship_cost, "transship_cost", n)
    validate_square_matrix(config.lead_time, "lead_time", n)

    duration = config.period_duration
    if not math.isfinite(duration) or duration <= 0:
        raise ConfigValidationError(f"must be finite and > 0, got {duration}", field="period_duration")

    for i in range(n):
        for j in range(n):
            if i != j and config.lead_time[i, j] >= duration:
                raise ConfigValidationError(
                    f"lead time {config.lead_time[i, j]} must be shorter than the period ({duration})",
                    field="lead_time",
                    index=(i, j),
                )

    return config


def classify_inventory(S, D) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split end-of-demand inventory into surplus and shortage.

    Returns:
        (surplus, shortage) with surplus_i = (S_i - D_i)^+ and shortage_j = (D_j - S_j)^+
    """
    S = np.asarray(S, dtype=float)
    D = np.asarray(D, dtype=float)
    if S.shape != D.shape:
        raise ValidationError(f"base stock and demand lengths differ: {S.shape} vs {D.shape}")
    return np.maximum(S - D, 0.0), np.maximum(D - S, 0.0)


def _fill_rate(served: np.ndarray, demand_total) -> np.ndarray:
    demand_total = np.asarray(demand_total, dtype=float)
    return np.divide(
        served, demand_total, out=np.ones_like(demand_total), where=demand_total > 0
    )


def evaluate_scenario(config: SystemConfig, S, D) -> ScenarioOutcome:
    """
    Exact cost, fill rate and lead time of one demand realization.

    Args:
        config: a validated system
        S: base-stock levels, length n
        D: demand realization, length n

    Returns:
        ScenarioOutcome with the optimal transshipment plan
    """
    S = validate_nonnegative_vector(S, name="base stock", length=config.n)
    D = validate_nonnegative_vector(D, name="demand", length=config.n)
    surplus, shortage = classify_inventory(S, D)

    plan = solve_transshipment(config.profit_matrix(), surplus, shortage)

    newsvendor = math.fsum(config.holding * surplus) + math.fsum(config.shortage * shortage)
    income = plan.objective_value

    received = plan.quantities.sum(axis=0)
    served = float(np.minimum(D, S + received).sum())
    fill = float(_fill_rate(served, D.sum()))

    return ScenarioOutcome(
        cost=newsvendor - income,
        fill_rate=fill,
        lead_time=plan.lead_time(config.lead_time),
        plan=plan,
        newsvendor_cost=newsvendor,
        transship_income=income,
    )


def evaluate_scenarios(config: SystemConfig, S, demands: np.ndarray) -> ScenarioBatch:
    """
    Evaluate one base-stock vector against every row of a demand matrix.

    Two-location systems use the closed-form plan for all rows at once;
    larger systems solve one LP per row.
    """
    S = validate_nonnegative_vector(S, name="base stock", length=config.n)
    demands = np.asarray(demands, dtype=float)
    if demands.ndim != 2 or demands.shape[1] != config.n:
        raise ValidationError(f"demands must have shape (N, {config.n}), got {demands.shape}")

    if config.n == 2:
        surplus = np.maximum(S[None, :] - demands, 0.0)
        shortage = np.maximum(demands - S[None, :], 0.0)
        profit = config.profit_matrix()
        shipped = solve_two_location_batch(profit, surplus, shortage)

        # elementwise products then sums keep the result independent of location order
        newsvendor = (surplus * config.holding).sum(axis=1) + (shortage * config.shortage).sum(axis=1)
        income = (shipped * profit).sum(axis=(1, 2))
        received = shipped.sum(axis=1)
        served = np.minimum(demands, S[None, :] + received).sum(axis=1)
        return ScenarioBatch(
            cost=newsvendor - income,
            fill_rate=_fill_rate(served, demands.sum(axis=1)),
            lead_time=(shipped * config.lead_time).sum(axis=(1, 2)),
            newsvendor_cost=newsvendor,
            transship_income=income,
            shipped=shipped,
        )

    outcomes = [evaluate_scenario(config, S, row) for row in demands]
    return ScenarioBatch(
        cost=np.array([o.cost for o in outcomes]),
        fill_rate=np.array([o.fill_rate for o in outcomes]),
        lead_time=np.array([o.lead_time for o in outcomes]),
        newsvendor_cost=np.array([o.newsvendor_cost for o in outcomes]),
        transship_income=np.array([o.transship_income for o in outcomes]),
        shipped=np.stack([o.plan.quantities for o in outcomes]),
    )

"""
Experiment Configuration

Loads experiment files and expands the built-in system presets.

An experiment file is YAML with three sections:

    system:                       # or just a preset name: "system: table1"
      preset: table1              # optional base, fields below override it
      locations:
        - {holding_cost: 3, shortage_cost: 2, demand: {mean: 100, std_dev: 20}}
        - {holding_cost: 3, shortage_cost: 2, demand: {mean: 100, std_dev: 20}}
      tau:  [[0, 0.5], [0.5, 0]]
      lead: [[0, 5], [5, 0]]
      period_duration: 6          # optional, defaults to max lead + 1
    spea:                         # SpeaParams keys, all optional
      population_size: 200
      archive_size: 100
      generations: 15
    run:
      objectives: [cost, fill]
      N: 500
      seed: 42

PRESETS:
- table1: h=3, p=2, tau=0.5, L=5, demand N(100, 20) at both locations
- s1: expensive holding (h=4, p=1), N(100, 20)
- s2: expensive shortage (h=1, p=4), N(100, 20)
- s3: high demand variance (h=1, p=2), N(100, 80)
- s4: low demand variance (h=1, p=2), N(100, 5)

All presets are symmetric two-location systems with tau=0.5 and L=5.
"""

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic import ValidationError as SchemaError

from config import Config
from tools.evolve import ObjectiveOrientation, Sense, SpeaParams
from tools.model import DemandSpec, LocationParams, SystemConfig, validate_config
from utils.logger import get_logger
from utils.validators import ValidationError, validate_count, validate_objectives

logger = get_logger(__name__)

OBJECTIVES = ("cost", "fill", "lead")
OBJECTIVE_SENSES = {"cost": Sense.MINIMIZE, "fill": Sense.MAXIMIZE, "lead": Sense.MINIMIZE}

# name -> (holding, shortage, demand std_dev); every preset has mean 100, tau 0.5, L 5
PRESETS: Dict[str, Tuple[float, float, float]] = {
    "table1": (3.0, 2.0, 20.0),
    "s1": (4.0, 1.0, 20.0),
    "s2": (1.0, 4.0, 20.0),
    "s3": (1.0, 2.0, 80.0),
    "s4": (1.0, 2.0, 5.0),
}
PRESET_DEMAND_MEAN = 100.0
PRESET_TRANSSHIP_COST = 0.5
PRESET_LEAD_TIME = 5.0
SENSITIVITY_PRESETS = ("s1", "s2", "s3", "s4")


def preset_system(name: str, n: int = 2) -> SystemConfig:
    """
    Build a preset system.

    Raises:
        ValidationError: For an unknown preset name
    """
    key = str(name).strip().lower()
    if key not in PRESETS:
        raise ValidationError(f"Unknown preset '{name}'; expected one of {sorted(PRESETS)}")

    holding, shortage, std_dev = PRESETS[key]
    off_diagonal = 1.0 - np.eye(n)
    location = LocationParams(
        holding_cost=holding,
        shortage_cost=shortage,
        demand=DemandSpec(mean=PRESET_DEMAND_MEAN, std_dev=std_dev),
    )
    return SystemConfig(
        locations=tuple(location for _ in range(n)),
        transship_cost=PRESET_TRANSSHIP_COST * off_diagonal,
        lead_time=PRESET_LEAD_TIME * off_diagonal,
    )


class DemandSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mean: float
    std_dev: float
    kind: str = "normal"


class LocationSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    holding_cost: float
    shortage_cost: float
    demand: DemandSection


class SystemSection(BaseModel):
    """The ``system`` section; any field left out comes from ``preset``."""
    model_config = ConfigDict(extra="forbid")

    preset: Optional[str] = None
    locations: Optional[List[LocationSection]] = None
    tau: Optional[List[List[float]]] = None
    lead: Optional[List[List[float]]] = None
    period_duration: Optional[float] = None

    def to_config(self) -> SystemConfig:
        base = preset_system(self.preset) if self.preset else None
        if base is None and (self.locations is None or self.tau is None or self.lead is None):
            raise ValidationError("system needs either a preset or all of locations, tau and lead")

        if self.locations is not None:
            locations = tuple(
                LocationParams(
                    holding_cost=loc.holding_cost,
                    shortage_cost=loc.shortage_cost,
                    demand=DemandSpec(**loc.demand.model_dump()),
                )
                for loc in self.locations
            )
        else:
            locations = base.locations

        try:
            return SystemConfig(
                locations=locations,
                transship_cost=self.tau if self.tau is not None else base.transship_cost,
                lead_time=self.lead if self.lead is not None else base.lead_time,
                period_duration=self.period_duration,
            )
        except ValueError as e:
            # ragged matrix rows
            raise ValidationError(f"system matrices must be rectangular: {e}") from e


class RunSection(BaseModel):
    """The ``run`` section."""
    model_config = ConfigDict(extra="forbid")

    objectives: Union[str, List[str]] = ["cost", "fill"]
    N: int = Field(Config.DEFAULT_SCENARIOS, ge=1, description="Scenarios per estimate")
    seed: int = Field(Config.DEFAULT_SCENARIO_SEED, description="Scenario pool seed")
    resample_per_generation: bool = False
    output_dir: Optional[str] = None
    landscape_samples: int = Field(Config.DEFAULT_LANDSCAPE_SAMPLES, ge=1)
    objective_space_samples: int = Field(0, ge=0)
    grid: bool = False

    @field_validator("objectives")
    @classmethod
    def validate_objective_names(cls, v):
        """Validate objective subset."""
        try:
            return list(validate_objectives(v, OBJECTIVES))
        except ValidationError as e:
            raise ValueError(str(e)) from e


class ExperimentFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    system: Union[str, SystemSection]
    spea: SpeaParams = SpeaParams()
    run: RunSection = RunSection()


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully validated experiment."""
    system: SystemConfig
    spea: SpeaParams
    objectives: Tuple[str, ...]
    N: int = Config.DEFAULT_SCENARIOS
    scenario_seed: int = Config.DEFAULT_SCENARIO_SEED
    output_dir: Path = Path(Config.OUTPUT_DIR)
    resample_per_generation: bool = False
    landscape_samples: int = Config.DEFAULT_LANDSCAPE_SAMPLES
    objective_space_samples: int = 0
    grid: bool = False
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "objectives", validate_objectives(self.objectives, OBJECTIVES))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        object.__setattr__(self, "N", validate_count(self.N, name="N"))
        object.__setattr__(self, "landscape_samples", validate_count(self.landscape_samples, name="landscape_samples"))
        object.__setattr__(
            self,
            "objective_space_samples",
            validate_count(self.objective_space_samples, name="objective_space_samples", min_val=0),
        )
        validate_config(self.system)

    @property
    def orientation(self) -> ObjectiveOrientation:
        return ObjectiveOrientation(tuple(OBJECTIVE_SENSES[name] for name in self.objectives))

    @property
    def label(self) -> str:
        short = {"cost": "C", "fill": "F", "lead": "L"}
        return "/".join(short[name] for name in self.objectives)

    def with_updates(self, **changes) -> "ExperimentSpec":
        """Copy with top-level fields replaced; ``spea`` keys are re-validated."""
        spea_changes = changes.pop("spea", None)
        if spea_changes:
            changes["spea"] = _update_params(self.spea, spea_changes)
        return replace(self, **changes)


def _update_params(params: SpeaParams, updates: Dict[str, Any]) -> SpeaParams:
    try:
        return SpeaParams(**{**params.model_dump(), **updates})
    except SchemaError as e:
        raise ValidationError(_describe_schema_error(e)) from e


def _describe_schema_error(error: SchemaError) -> str:
    parts = []
    for item in error.errors():
        path = ".".join(str(p) for p in item.get("loc", ())) or "<root>"
        parts.append(f"{path}: {item.get('msg')}")
    return "; ".join(parts)


def parse_experiment(data: Any, source: str = "<memory>") -> ExperimentSpec:
    """
    Validate a parsed experiment document.

    Raises:
        ValidationError: On schema errors, unknown presets or invalid systems
    """
    if not isinstance(data, dict):
        raise ValidationError(f"{source}: top level must be a mapping with a 'system' section")

    try:
        document = ExperimentFile(**data)
    except SchemaError as e:
        raise ValidationError(f"{source}: {_describe_schema_error(e)}") from e

    if isinstance(document.system, str):
        system = preset_system(document.system)
        name = document.system.strip().lower()
    else:
        system = document.system.to_config()
        name = document.system.preset or "custom"

    run = document.run
    return ExperimentSpec(
        system=system,
        spea=document.spea,
        objectives=tuple(run.objectives),
        N=run.N,
        scenario_seed=run.seed,
        output_dir=Path(run.output_dir) if run.output_dir else Path(Config.OUTPUT_DIR),
        resample_per_generation=run.resample_per_generation,
        landscape_samples=run.landscape_samples,
        objective_space_samples=run.objective_space_samples,
        grid=run.grid,
        name=name,
    )


def load_experiment(path: Union[str, Path]) -> ExperimentSpec:
    """
    Read and validate an experiment file.

    Args:
        path: YAML file

    Returns:
        ExperimentSpec with defaults applied

    Raises:
        ValidationError: On unreadable files, YAML syntax errors (with line and
            column), schema errors, unknown presets and invalid systems
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"Cannot read experiment file {path}: {e}") from e

    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
        problem = getattr(e, "problem", None) or str(e)
        raise ValidationError(f"{path}: YAML parse error{where}: {problem}") from e

    spec = parse_experiment(data, source=str(path))
    logger.info(f"Loaded experiment {path} ({spec.name}, {spec.label})")
    return spec


def build_spec(
    config_path: Optional[Union[str, Path]] = None,
    preset: Optional[str] = None,
    objectives: Optional[Union[str, List[str]]] = None,
    spea_overrides: Optional[Dict[str, Any]] = None,
    **run_overrides,
) -> ExperimentSpec:
    """
    Assemble a spec from an optional file or preset plus command-line overrides.

    ``None`` overrides are ignored. With neither a file nor a preset the
    ``table1`` system is used.
    """
    if config_path is not None:
        spec = load_experiment(config_path)
        if preset is not None:
            spec = replace(spec, system=preset_system(preset), name=preset.strip().lower())
    else:
        name = (preset or "table1").strip().lower()
        spec = ExperimentSpec(
            system=preset_system(name),
            spea=SpeaParams(),
            objectives=("cost", "fill"),
            name=name,
        )

    changes: Dict[str, Any] = {k: v for k, v in run_overrides.items() if v is not None}
    if objectives is not None:
        changes["objectives"] = objectives
    spea_changes = {k: v for k, v in (spea_overrides or {}).items() if v is not None}
    if spea_changes:
        changes["spea"] = spea_changes
    return spec.with_updates(**changes) if changes else spec

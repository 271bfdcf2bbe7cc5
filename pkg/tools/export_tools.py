"""
Front Export and Summary Tools

Writes Pareto fronts, snapshots and explored points as comma-separated tables
and computes the summary statistics used to compare fronts.

FILE FORMAT:
    S_1,...,S_n,<objective>...,<objective>_stderr...,generation
Values are printed with 9 significant digits. Rows are sorted by the
objective columns (first objective first) and then by genome, so exporting
the same front twice gives identical bytes.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pymoo.indicators.hv import HV
from scipy.spatial.distance import cdist

from config import Config
from tools.evolve import Individual, Sense
from tools.experiment_config import OBJECTIVE_SENSES, OBJECTIVES
from tools.sampling import ObjectiveEstimate
from utils.logger import get_logger
from utils.validators import ValidationError

logger = get_logger(__name__)

HV_REFERENCE = (1.1, 1.1)


@dataclass(frozen=True)
class FrontRecord:
    """One exported front member in natural orientation."""
    genome: Tuple[float, ...]
    objectives: Dict[str, float]
    stderrs: Dict[str, float] = field(default_factory=dict)
    generation: int = 0

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name in OBJECTIVES if name in self.objectives)


def records_from_individuals(
    individuals: Sequence[Individual],
    objectives: Sequence[str],
    generation: Optional[int] = None,
) -> List[FrontRecord]:
    """
    Convert engine individuals into records.

    Standard errors come from an ObjectiveEstimate payload when present.
    ``generation`` overrides each individual's evaluation generation.
    """
    records = []
    for ind in individuals:
        values = {name: float(v) for name, v in zip(objectives, ind.objectives)}
        stderrs = {}
        if isinstance(ind.payload, ObjectiveEstimate):
            stderrs = {name: ind.payload.stderr_of(name) for name in objectives}
        records.append(
            FrontRecord(
                genome=tuple(float(g) for g in ind.genome),
                objectives=values,
                stderrs=stderrs,
                generation=ind.generation if generation is None else generation,
            )
        )
    return records


def records_to_frame(records: Sequence[FrontRecord]) -> pd.DataFrame:
    """Tabulate records with a stable row order."""
    if not records:
        raise ValidationError("Cannot tabulate an empty front")

    names = records[0].names
    n = len(records[0].genome)
    genome_cols = [f"S_{i + 1}" for i in range(n)]
    stderr_cols = [f"{name}_stderr" for name in names]

    rows = []
    for rec in records:
        if rec.names != names or len(rec.genome) != n:
            raise ValidationError("All records in a front must share genome length and objectives")
        rows.append(
            [*rec.genome]
            + [rec.objectives[name] for name in names]
            + [rec.stderrs.get(name, np.nan) for name in names]
            + [rec.generation]
        )

    frame = pd.DataFrame(rows, columns=genome_cols + list(names) + stderr_cols + ["generation"])
    frame["generation"] = frame["generation"].astype(int)
    return frame.sort_values(list(names) + genome_cols, kind="mergesort").reset_index(drop=True)


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write any table in the export format."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=Config.FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise ValidationError(f"Cannot write {path}: {e}") from e
    return path


def export_front(front: Sequence[FrontRecord], path: Union[str, Path]) -> Path:
    """
    Write a front as a header plus one row per record.

    Raises:
        ValidationError: On an empty front or an unwritable path
    """
    frame = records_to_frame(front)
    written = write_table(frame, path)
    logger.debug(f"Exported {len(frame)} records to {written}")
    return written


def read_front(path: Union[str, Path]) -> List[FrontRecord]:
    """Parse a file written by export_front."""
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ValidationError(f"Cannot read front {path}: {e}") from e

    genome_cols = [c for c in frame.columns if c.startswith("S_")]
    names = [name for name in OBJECTIVES if name in frame.columns]
    if not genome_cols or not names:
        raise ValidationError(f"{path} is not a front export (columns: {list(frame.columns)})")

    records = []
    for row in frame.itertuples(index=False):
        data = row._asdict()
        records.append(
            FrontRecord(
                genome=tuple(float(data[c]) for c in genome_cols),
                objectives={name: float(data[name]) for name in names},
                stderrs={
                    name: float(data[f"{name}_stderr"])
                    for name in names
                    if f"{name}_stderr" in data
                },
                generation=int(data.get("generation", 0)),
            )
        )
    return records


@dataclass
class FrontSummary:
    """Extent, size and spread of a front."""
    count: int
    extents: Dict[str, Tuple[float, float]]
    spread: float
    hypervolume: Optional[float] = None

    def extent(self, name: str) -> float:
        lo, hi = self.extents[name]
        return hi - lo

    def as_dict(self) -> Dict[str, float]:
        row: Dict[str, float] = {"count": self.count, "spread": self.spread}
        for name, (lo, hi) in self.extents.items():
            row[f"{name}_min"] = lo
            row[f"{name}_max"] = hi
            row[f"{name}_extent"] = hi - lo
        row["hypervolume"] = np.nan if self.hypervolume is None else self.hypervolume
        return row


def _normalized_minimization(records: Sequence[FrontRecord], names: Sequence[str]) -> np.ndarray:
    signs = np.array([1.0 if OBJECTIVE_SENSES[name] is Sense.MINIMIZE else -1.0 for name in names])
    F = np.array([[rec.objectives[name] for name in names] for rec in records], dtype=float) * signs
    lo = F.min(axis=0)
    span = F.max(axis=0) - lo
    return (F - lo) / np.where(span > 0, span, 1.0)


def summarize_front(front: Sequence[FrontRecord]) -> FrontSummary:
    """
    Per-objective extent, record count, spread and (two objectives) hypervolume.

    Spread is the mean distance from each record to its nearest neighbor in
    min-max normalized objective space; a single record has spread 0.
    """
    if not front:
        raise ValidationError("Cannot summarize an empty front")

    names = front[0].names
    extents = {}
    for name in names:
        values = [rec.objectives[name] for rec in front]
        extents[name] = (float(min(values)), float(max(values)))

    F = _normalized_minimization(front, names)
    spread = 0.0
    if len(front) > 1:
        distances = cdist(F, F)
        np.fill_diagonal(distances, np.inf)
        spread = float(distances.min(axis=1).mean())

    hypervolume = None
    if len(names) == 2:
        hypervolume = float(HV(ref_point=np.array(HV_REFERENCE))(F))

    return FrontSummary(count=len(front), extents=extents, spread=spread, hypervolume=hypervolume)


def format_summary(summary: FrontSummary, title: str = "Front summary") -> str:
    """Render a summary as aligned text lines."""
    lines = [title, "=" * len(title), f"records: {summary.count}"]
    for name, (lo, hi) in summary.extents.items():
        lines.append(f"{name:>5}: min={lo:.6g} max={hi:.6g} extent={hi - lo:.6g}")
    lines.append(f"spread: {summary.spread:.6g}")
    if summary.hypervolume is not None:
        lines.append(f"hypervolume (normalized, ref {HV_REFERENCE}): {summary.hypervolume:.6g}")
    return "\n".join(lines) + "\n"

"""
Entry point for experiments.
Usage:
  python -m scripts.run_experiment validate --preset table1
  python -m scripts.run_experiment landscape --preset table1 --samples 30000
  python -m scripts.run_experiment landscape --preset table1 --grid --samples 9
  python -m scripts.run_experiment optimize --preset table1 --objectives cost,fill
  python -m scripts.run_experiment optimize --config experiments/table1_cf.yaml
  python -m scripts.run_experiment summarize results/front.csv
  python -m scripts.run_experiment sweep --objectives cost,lead --output-dir results/sweep

Exit codes: 0 success, 1 invalid input, 2 runtime failure.
"""

import argparse
import json
import sys
from typing import List, Optional

from config import Config
from orchestrator.orchestrator import run_experiment, run_landscape, run_sensitivity
from tools.experiment_config import ExperimentSpec, build_spec
from tools.export_tools import format_summary, read_front, summarize_front
from utils.logger import get_logger, setup_logging
from utils.validators import ValidationError

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment file")
    common.add_argument("--preset", help="System preset: table1, s1, s2, s3, s4")
    common.add_argument("--objectives", help="Comma-separated subset of cost,fill,lead")
    common.add_argument("--scenarios", type=int, help=f"Scenarios per estimate (default {Config.DEFAULT_SCENARIOS})")
    common.add_argument("--scenario-seed", type=int, help=f"Scenario pool seed (default {Config.DEFAULT_SCENARIO_SEED})")
    common.add_argument("--seed", type=int, help=f"SPEA2 seed (default {Config.DEFAULT_SEED})")
    common.add_argument("--population", type=int, help="SPEA2 population size N_P")
    common.add_argument("--archive", type=int, help="SPEA2 archive size N_A")
    common.add_argument("--generations", type=int, help="SPEA2 generations T")
    common.add_argument("--crossover-rate", type=float, help="Crossover probability")
    common.add_argument("--mutation-rate", type=float, help="Per-gene mutation probability")
    common.add_argument("--s-max", type=float, help="Upper bound of every base-stock level")
    common.add_argument("--samples", type=int, help="Landscape points (levels per axis with --grid)")
    common.add_argument("--grid", action="store_true", default=None, help="Sample a regular grid")
    common.add_argument(
        "--objective-space", type=int, nargs="?", const=Config.DEFAULT_OBJECTIVE_SPACE_SAMPLES, default=None,
        help=f"Also sample the selected objectives at random S points (default count {Config.DEFAULT_OBJECTIVE_SPACE_SAMPLES})",
    )
    common.add_argument(
        "--resample-per-generation", action="store_true", default=None,
        help="Draw a fresh scenario pool every generation instead of common random numbers",
    )
    common.add_argument("--output-dir", help=f"Output directory (default {Config.OUTPUT_DIR})")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        description="Multiobjective base-stock optimization with lateral transshipment."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="Validate an experiment and print it")
    sub.add_parser("landscape", parents=[common], help="Sample cost, fill rate and lead time surfaces")
    sub.add_parser("optimize", parents=[common], help="Run SPEA2 and export the front")
    summarize = sub.add_parser("summarize", parents=[common], help="Summarize an exported front")
    summarize.add_argument("front", help="Path to a front.csv")
    sub.add_parser("sweep", parents=[common], help="Run the objective subset on systems s1-s4")
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    return build_spec(
        config_path=args.config,
        preset=args.preset,
        objectives=args.objectives,
        spea_overrides={
            "seed": args.seed,
            "population_size": args.population,
            "archive_size": args.archive,
            "generations": args.generations,
            "crossover_rate": args.crossover_rate,
            "mutation_rate": args.mutation_rate,
            "s_max": args.s_max,
        },
        N=args.scenarios,
        scenario_seed=args.scenario_seed,
        output_dir=args.output_dir,
        resample_per_generation=args.resample_per_generation,
        landscape_samples=args.samples,
        objective_space_samples=args.objective_space,
        grid=args.grid,
    )


def _describe(spec: ExperimentSpec) -> dict:
    return {
        "experiment": spec.name,
        "objectives": list(spec.objectives),
        "locations": spec.system.n,
        "scenarios": spec.N,
        "scenario_seed": spec.scenario_seed,
        "objective_space_samples": spec.objective_space_samples,
        "spea": spec.spea.model_dump(),
        "output_dir": str(spec.output_dir),
        "defaults": Config.get_summary(),
    }


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "summarize":
        summary = summarize_front(read_front(args.front))
        print(format_summary(summary, title=f"Summary of {args.front}"), end="")
        return EXIT_OK

    spec = spec_from_args(args)

    if args.command == "validate":
        print(json.dumps(_describe(spec), indent=2, default=str))
        return EXIT_OK

    if args.command == "landscape":
        count = args.samples if args.samples is not None else (None if not spec.grid else 9)
        table, path = run_landscape(spec, count=count)
        print(f"Landscape finished: {len(table)} points written to {path}")
        return EXIT_OK

    if args.command == "optimize":
        outcome = run_experiment(spec)
        print("Optimization finished. Front summary:")
        print(format_summary(outcome.summary, title=f"{spec.name} {spec.label}"), end="")
        print(f"Files written to {spec.output_dir}")
        return EXIT_OK

    if args.command == "sweep":
        table = run_sensitivity(spec)
        print(table.to_string(index=False))
        return EXIT_OK

    raise ValidationError(f"Unknown command {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        setup_logging(level=args.log_level, log_dir=Config.LOG_DIR or None, json_format=Config.LOG_JSON)

    try:
        return _dispatch(args)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:
        logger.exception(f"Run failed: {e}")
        print(f"failed: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

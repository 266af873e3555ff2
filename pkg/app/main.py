"""
Command-line entry point.

    python -m app.main run --config configs/wall_jump.cfg
    python -m app.main compare --preset trials-jump --out results/jump
    python -m app.main landscape --out results/landscape
    python -m app.main sweep --config configs/sweep.cfg
"""

import argparse
import logging
import sys
from pathlib import Path

from app.core.config import get_settings
from app.core.errors import AnnealedMpcError, ConfigValidationError
from app.core.presets import preset_names
from app.domain.schemas import ExperimentConfig
from app.services.bench import (
    format_table,
    key_registry,
    resolve_config,
    run_comparison,
    run_experiment,
    run_sweep,
    write_bench_outputs,
    write_sweep,
)
from app.services.landscape import build_landscape_report, write_landscape_report

logger = logging.getLogger(__name__)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    # Suppress noisy library logs (only show warnings/errors)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("PIL").setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annealed-mpc", description="Annealed sampling MPC benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value experiment config")
    common.add_argument("--seed", type=int, help="run a single seed (unsigned 64-bit)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--solver", help="solver id (dial, mppi, cmaes)")
    common.add_argument("--env", help="environment id")
    common.add_argument(
        "--preset",
        action="append",
        default=[],
        choices=preset_names(),
        help="named preset, applied after 'desk' and before the config file; repeatable",
    )
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one config key; repeatable",
    )

    sub.add_parser("run", parents=[common], help="single experiment")
    sub.add_parser("compare", parents=[common], help="equal-budget multi-solver table")
    sub.add_parser("landscape", parents=[common], help="density, drift and oracle artifacts")
    sub.add_parser("sweep", parents=[common], help="grid over beta1, beta2, N, sigma_base")
    sub.add_parser("keys", help="list every config key")
    return parser


def cli_overrides(args: argparse.Namespace) -> dict[str, str]:
    overrides = {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigValidationError([{"path": "--set", "message": f"expected KEY=VALUE, got '{item}'"}])
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["experiment.seeds"] = str(args.seed)
    if args.solver:
        overrides["solver.id"] = args.solver
    if args.env:
        overrides["env.id"] = args.env
    return overrides


def output_dir(args: argparse.Namespace, config: ExperimentConfig) -> Path:
    if args.out is not None:
        return args.out
    return Path(config.output.dir or get_settings().output_dir) / config.experiment.name


def run_command(args: argparse.Namespace) -> int:
    if args.command == "keys":
        width = max(len(key) for key in key_registry())
        for key, kind in key_registry().items():
            print(f"{key.ljust(width)}  {kind}")
        return 0

    config = resolve_config(args.config, presets=args.preset, overrides=cli_overrides(args))
    out = output_dir(args, config)

    if args.command == "landscape":
        report = build_landscape_report(config.landscape, seed=config.experiment.seeds[0])
        write_landscape_report(report, out, plots=config.output.plots)
    elif args.command == "sweep":
        points = run_sweep(config)
        write_sweep(points, out)
        print(format_table([p.summary for p in points]), end="")
    else:
        if args.command == "compare":
            records = [r for group in run_comparison(config).values() for r in group]
        else:
            records = run_experiment(config)
        summaries = write_bench_outputs(records, out, timing=config.output.timing, plots=config.output.plots)
        print(format_table(summaries), end="")

    logger.info(f"Artifacts in {out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    configure_logging(get_settings().log_level)
    args = build_parser().parse_args(argv)
    try:
        return run_command(args)
    except ConfigValidationError as e:
        for error in e.errors:
            print(f"error: {error['path']}: {error['message']}", file=sys.stderr)
        return 2
    except AnnealedMpcError as e:
        print(f"error: {e.code}: {e.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

from app.services.bench.config import key_registry, parse_config_text, resolve_config, with_solver_variant
from app.services.bench.runner import (
    RunRecord,
    build_controller,
    check_budget_parity,
    run_comparison,
    run_episode,
    run_experiment,
)
from app.services.bench.summary import SolverSummary, format_table, summarize, write_bench_outputs
from app.services.bench.sweep import SweepPoint, run_sweep, write_sweep

__all__ = [
    "build_controller",
    "check_budget_parity",
    "format_table",
    "key_registry",
    "parse_config_text",
    "resolve_config",
    "run_comparison",
    "run_episode",
    "run_experiment",
    "run_sweep",
    "summarize",
    "with_solver_variant",
    "write_bench_outputs",
    "write_sweep",
    "RunRecord",
    "SolverSummary",
    "SweepPoint",
]

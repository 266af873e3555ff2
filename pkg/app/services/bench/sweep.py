"""Grid sweep of the DIAL schedule over (beta1, beta2, N, sigma_base)."""

import itertools
import logging
from dataclasses import dataclass
from pathlib import Path

from app.domain.schemas import ExperimentConfig
from app.services.artifacts import write_csv
from app.services.bench.runner import run_experiment
from app.services.bench.summary import SolverSummary, summarize

logger = logging.getLogger(__name__)

SWEEP_HEADER = [
    "beta1",
    "beta2",
    "iterations",
    "sigma_base",
    "trials",
    "mean_cost",
    "std_cost",
    "success_rate",
    "mean_tracking_error",
    "diverged",
    "rollouts_per_step",
]


@dataclass
class SweepPoint:
    beta1: float
    beta2: float
    iterations: int
    sigma_base: float
    summary: SolverSummary

    def row(self) -> list:
        s = self.summary
        return [
            self.beta1,
            self.beta2,
            self.iterations,
            self.sigma_base,
            s.trials,
            s.mean_cost,
            s.std_cost,
            s.success_rate,
            s.mean_tracking_error,
            s.diverged,
            s.rollouts_per_step,
        ]


def sweep_configs(config: ExperimentConfig):
    """(beta1, beta2, iterations, sigma_base, config) for every grid point, DIAL selected."""
    grid = config.sweep
    for beta1, beta2, iterations, sigma_base in itertools.product(
        grid.beta1, grid.beta2, grid.iterations, grid.sigma_base
    ):
        solver = config.solver.model_copy(
            update={"id": "dial", "beta1": beta1, "beta2": beta2, "sigma_base": sigma_base}
        )
        budget = config.budget.model_copy(update={"iterations": iterations})
        yield beta1, beta2, iterations, sigma_base, config.model_copy(update={"solver": solver, "budget": budget})


def run_sweep(config: ExperimentConfig) -> list[SweepPoint]:
    points = []
    for beta1, beta2, iterations, sigma_base, point_config in sweep_configs(config):
        logger.info(f"Sweep point beta1={beta1} beta2={beta2} N={iterations} sigma_base={sigma_base}")
        label = f"dial b1={beta1} b2={beta2} N={iterations} s={sigma_base}"
        summary = summarize(run_experiment(point_config, label=label))[0]
        points.append(SweepPoint(beta1, beta2, iterations, sigma_base, summary))
    return points


def write_sweep(points: list[SweepPoint], out_dir: Path) -> Path:
    return write_csv(out_dir / "sweep.csv", SWEEP_HEADER, (p.row() for p in points))

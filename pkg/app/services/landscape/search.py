"""
Sampler comparison on a static landscape.

Runs the same sampled score-ascent update the controllers use, but on a
low-dimensional cost with no dynamics, so the coverage/convergence trade-off
of a kernel schedule can be read off against the grid oracle.
"""

import logging
import math
from dataclasses import dataclass
from collections.abc import Sequence

import numpy as np

from app.core.errors import NoValidSampleError
from app.services.annealing import NoiseSchedule, kernel_sigma
from app.services.landscape.density import CostFn, OracleResult
from app.services.sampler import (
    RngStream,
    SamplerParams,
    estimate_score,
    sample_perturbations,
    score_ascent_step,
)

logger = logging.getLogger(__name__)

LANDSCAPE_MODES = ("dial", "mppi")


@dataclass
class LandscapeRun:
    label: str
    path: np.ndarray  # (updates + 1, dim), start first
    costs: np.ndarray  # cost at every path point
    oracle_gap: float | None = None

    @property
    def final(self) -> np.ndarray:
        return self.path[-1]

    @property
    def final_cost(self) -> float:
        return float(self.costs[-1])


def stage_sigmas(mode: str, sigma_base: float, iterations: int, beta1: float) -> list[tuple[int, float]]:
    """(stage, sigma) per update of one round; DIAL shrinks the kernel, MPPI keeps it."""
    if mode == "mppi":
        return [(i, sigma_base) for i in range(iterations, 0, -1)]
    if mode != "dial":
        raise ValueError(f"Unknown landscape mode: {mode}")
    schedule = NoiseSchedule(
        iterations=iterations, horizon=1, action_dim=1, beta1=beta1, beta2=math.inf, sigma_base=sigma_base
    )
    return [(i, kernel_sigma(i, 1, schedule)) for i in schedule.stages()]


def anneal_on_landscape(
    cost_fn: CostFn,
    start: Sequence[float],
    *,
    mode: str = "dial",
    sigma_base: float = 1.0,
    iterations: int = 4,
    rounds: int = 10,
    samples: int = 256,
    temperature: float = 0.1,
    beta1: float = 0.5,
    seed: int = 0,
    bounds: Sequence[tuple[float, float]] | None = None,
    oracle: OracleResult | None = None,
    label: str | None = None,
) -> LandscapeRun:
    """``rounds`` x ``iterations`` sampled score-ascent updates from ``start``.

    Candidates outside ``bounds`` are clamped before evaluation, like actions.
    """
    U = np.asarray(start, dtype=np.float64)[None, :]
    dim = U.shape[1]
    lo = hi = None
    if bounds is not None:
        lo, hi = np.array(bounds, dtype=np.float64).T

    def evaluate(points: np.ndarray) -> np.ndarray:
        if lo is not None:
            points = np.clip(points, lo, hi)
        return np.asarray(cost_fn(points), dtype=np.float64)

    path = [U[0].copy()]
    for round_index in range(rounds):
        for stage, sigma in stage_sigmas(mode, sigma_base, iterations, beta1):
            kernel = np.full((1, dim), sigma)
            batch = sample_perturbations(
                SamplerParams(temperature, kernel), samples, RngStream(seed=seed, step=round_index, stage=stage)
            )
            batch.with_costs(evaluate((U + batch.noises)[:, 0, :]))
            try:
                U = score_ascent_step(U, estimate_score(batch, temperature, kernel), kernel)
            except NoValidSampleError:
                logger.warning(f"[{mode}] round {round_index} stage {stage}: no finite sample")
            path.append(U[0].copy())

    path = np.array(path)
    gap = None
    if oracle is not None:
        gap = float(np.linalg.norm(path[-1] - oracle.global_location))
    return LandscapeRun(label=label or mode, path=path, costs=evaluate(path), oracle_gap=gap)

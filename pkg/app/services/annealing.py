"""
Noise-schedule algebra for the dual-loop annealing controller.

Stage i runs from N (first, widest kernel) down to 1. Within a stage the
kernel also grows with the horizon offset h, so actions further in the future
are explored more widely. Both effects share one exponential template:

    exp_schedule(i, N, beta, d) = exp(-((N - i) / (beta * N)) * d)

and the isotropic per-entry variance at (i, h) is

    sigma_base^2 * exp(-(N - i) / (beta1 * N) - (H - h) / (beta2 * H)).

Passing ``math.inf`` for beta1 and beta2 turns the schedule into a constant
kernel equal to sigma_base, exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from app.core.errors import ScheduleIndexError


@dataclass(frozen=True)
class NoiseSchedule:
    iterations: int  # N
    horizon: int  # H
    action_dim: int  # d_u
    beta1: float
    beta2: float
    sigma_base: float

    def __post_init__(self):
        if self.iterations < 1 or self.horizon < 1 or self.action_dim < 1:
            raise ValueError(
                f"iterations, horizon and action_dim must be >= 1, "
                f"got ({self.iterations}, {self.horizon}, {self.action_dim})"
            )
        for name in ("beta1", "beta2", "sigma_base"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def plan_rows(self) -> int:
        return self.horizon + 1

    def stages(self) -> range:
        """Stage indices in execution order, N down to 1."""
        return range(self.iterations, 0, -1)


def _check_stage(i: int, iterations: int) -> None:
    if not 1 <= i <= iterations:
        raise ScheduleIndexError("i", i, 1, iterations)


def exp_schedule(i: int, iterations: int, beta: float, dim: int) -> float:
    """Determinant factor of the generic exponential schedule at stage i."""
    _check_stage(i, iterations)
    return math.exp(-((iterations - i) / (beta * iterations)) * dim)


def kernel_exponent(i: int, h: float, schedule: NoiseSchedule) -> float:
    """The variance exponent at (i, h); ``h`` may be fractional for node-space plans."""
    _check_stage(i, schedule.iterations)
    if not 0 <= h <= schedule.horizon:
        raise ScheduleIndexError("h", h, 0, schedule.horizon)
    trajectory = (schedule.iterations - i) / (schedule.beta1 * schedule.iterations)
    action = (schedule.horizon - h) / (schedule.beta2 * schedule.horizon)
    return trajectory + action


def kernel_sigma(i: int, h: float, schedule: NoiseSchedule) -> float:
    """Per-dimension standard deviation at stage i, horizon offset h."""
    return schedule.sigma_base * math.exp(-0.5 * kernel_exponent(i, h, schedule))


def trajectory_kernel(i: int, schedule: NoiseSchedule, offsets=None) -> np.ndarray:
    """Standard deviations for a whole plan: (len(offsets), d_u).

    ``offsets`` defaults to 0..H, one per plan row; node-space plans pass the
    horizon positions of their nodes instead.
    """
    if offsets is None:
        offsets = range(schedule.horizon + 1)
    column = np.array([kernel_sigma(i, h, schedule) for h in offsets], dtype=np.float64)
    return np.repeat(column[:, None], schedule.action_dim, axis=1)


def log_det_kernel(i: int, schedule: NoiseSchedule) -> float:
    """log det of the block-diagonal plan covariance at stage i, summed over every row."""
    total = 0.0
    for h in range(schedule.horizon + 1):
        log_variance = 2.0 * math.log(schedule.sigma_base) - kernel_exponent(i, h, schedule)
        total += schedule.action_dim * log_variance
    return total

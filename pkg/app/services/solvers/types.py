"""Data types for the receding-horizon solvers."""

import math
from dataclasses import dataclass, field

import numpy as np

from app.services.annealing import NoiseSchedule

INTERPOLATIONS = ("linear", "cubic")


@dataclass(frozen=True)
class DialConfig:
    """Dual-loop annealing controller settings."""
    schedule: NoiseSchedule
    temperature: float  # lambda
    samples: int  # N_W
    dt: float
    seed: int = 0
    node_count: int | None = None  # spline reparameterization when set
    interpolation: str = "linear"
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.node_count is not None and not 2 <= self.node_count <= self.schedule.horizon:
            raise ValueError(
                f"node_count must lie in [2, {self.schedule.horizon}], got {self.node_count}"
            )
        if self.interpolation not in INTERPOLATIONS:
            raise ValueError(f"Unknown interpolation: {self.interpolation}")

    @property
    def horizon(self) -> int:
        return self.schedule.horizon

    @property
    def horizon_seconds(self) -> float:
        return self.schedule.horizon * self.dt

    @property
    def rollouts_per_step(self) -> int:
        return self.schedule.iterations * self.samples


@dataclass(frozen=True)
class FixedMppiConfig:
    """Constant-kernel MPPI; ``iterations`` inner updates per control step."""
    sigma_fixed: float
    temperature: float
    samples: int
    iterations: int
    horizon: int
    dt: float
    seed: int = 0
    node_count: int | None = None
    interpolation: str = "linear"
    workers: int = 1

    def __post_init__(self):
        if not self.sigma_fixed > 0:
            raise ValueError(f"sigma_fixed must be positive, got {self.sigma_fixed}")
        if self.iterations < 1 or self.samples < 1 or self.horizon < 1:
            raise ValueError("iterations, samples and horizon must be >= 1")

    @property
    def rollouts_per_step(self) -> int:
        return self.iterations * self.samples

    def as_dial(self, action_dim: int) -> DialConfig:
        """The DIAL configuration this baseline degenerates from (beta1 = beta2 = inf)."""
        schedule = NoiseSchedule(
            iterations=self.iterations,
            horizon=self.horizon,
            action_dim=action_dim,
            beta1=math.inf,
            beta2=math.inf,
            sigma_base=self.sigma_fixed,
        )
        return DialConfig(
            schedule=schedule,
            temperature=self.temperature,
            samples=self.samples,
            dt=self.dt,
            seed=self.seed,
            node_count=self.node_count,
            interpolation=self.interpolation,
            workers=self.workers,
        )


@dataclass(frozen=True)
class EvoStrategyConfig:
    """Covariance-adapting evolution strategy over the flattened plan."""
    population: int
    generations: int
    initial_step: float
    horizon: int
    dt: float
    selection_fraction: float = 0.5
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.population < 2:
            raise ValueError(f"population must be >= 2, got {self.population}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if not self.initial_step > 0:
            raise ValueError(f"initial_step must be positive, got {self.initial_step}")
        if not 0 < self.selection_fraction <= 1:
            raise ValueError(f"selection_fraction must lie in (0, 1], got {self.selection_fraction}")

    @property
    def parents(self) -> int:
        return max(1, int(self.population * self.selection_fraction))

    @property
    def rollouts_per_step(self) -> int:
        return self.population * self.generations


@dataclass
class StageDiagnostics:
    """One annealing stage (or one inner iteration / generation for the baselines)."""
    stage: int
    best_cost: float
    mean_cost: float  # over finite samples
    weight_entropy: float
    effective_sample_size: float
    valid_samples: int
    failed: bool = False


@dataclass
class StepDiagnostics:
    """Per-control-step record consumed by the bench harness."""
    step: int
    action: np.ndarray
    plan_cost: float  # J(U) of the optimized plan, before the shift
    stages: list[StageDiagnostics] = field(default_factory=list)
    held: bool = False
    applied_update_count: int = 0
    covariance_reset: bool = False
    wall_clock: float = 0.0

    @property
    def stage_best_costs(self) -> list[float]:
        return [stage.best_cost for stage in self.stages]


@dataclass
class ControllerState:
    """Plan carried between control steps.

    ``U`` is the decision variable: the dense (H+1, d_u) plan, or the
    (node_count, d_u) node plan under spline reparameterization.
    ``update_counts`` has one counter per dense plan row.
    """
    U: np.ndarray
    update_counts: np.ndarray
    t: int = 0
    diagnostics: list[StepDiagnostics] = field(default_factory=list)

    @property
    def last(self) -> StepDiagnostics | None:
        return self.diagnostics[-1] if self.diagnostics else None

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ============================================
# Experiment Schemas
# ============================================

class EnvSection(_Section):
    id: str = "wall-jump"
    randomize: bool = True
    params: dict[str, object] = {}  # env.<parameter> overrides, typed by the environment


class BudgetSection(_Section):
    samples: int = Field(default=128, ge=1)  # N_W
    horizon: int = Field(default=25, ge=1)  # H
    dt: float = Field(default=0.02, gt=0)
    iterations: int = Field(default=4, ge=1)  # N, and M for constant-kernel MPPI


class SolverSection(_Section):
    id: str = "dial"
    temperature: float = Field(gt=0)  # lambda; required
    beta1: float = Field(default=0.5, gt=0)
    beta2: float = Field(default=1.0, gt=0)
    sigma_base: float = Field(default=1.0, gt=0)
    sigma_fixed: float = Field(default=0.2, gt=0)
    node_count: Optional[int] = Field(default=None, ge=2)
    interpolation: Literal["linear", "cubic"] = "linear"
    population: Optional[int] = Field(default=None, ge=2)  # defaults to N_W
    generations: Optional[int] = Field(default=None, ge=1)  # defaults to N
    initial_step: float = Field(default=0.3, gt=0)
    selection_fraction: float = Field(default=0.5, gt=0, le=1)


class ExperimentSection(_Section):
    name: str = "experiment"
    seeds: list[int] = Field(default_factory=lambda: list(range(100)), min_length=1)
    steps: int = Field(default=100, ge=1)  # T

    @field_validator("seeds")
    @classmethod
    def seeds_unsigned(cls, v: list[int]) -> list[int]:
        if any(s < 0 or s >= 2**64 for s in v):
            raise ValueError("seeds must be unsigned 64-bit integers")
        if len(set(v)) != len(v):
            raise ValueError("seeds must be distinct")
        return v


class OutputSection(_Section):
    dir: Optional[str] = None  # falls back to Settings.output_dir
    timing: bool = False
    plots: bool = True


class CompareSection(_Section):
    solvers: list[str] = Field(
        default_factory=lambda: ["dial", "mppi-explore", "mppi-exploit", "cmaes"],
        min_length=1,
    )


class SweepSection(_Section):
    beta1: list[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0])
    beta2: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    iterations: list[int] = Field(default_factory=lambda: [2, 4])
    sigma_base: list[float] = Field(default_factory=lambda: [0.5, 1.0])


class LandscapeSection(_Section):
    dims: Literal[1, 2] = 1
    resolution: Optional[int] = Field(default=None, ge=16)  # falls back to Settings.landscape_resolution
    temperature: float = Field(default=1.0, gt=0)
    sigmas: list[float] = Field(default_factory=lambda: [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 1.5], min_length=1)
    lower: list[float] = Field(default_factory=lambda: [-3.0, 0.0])
    upper: list[float] = Field(default_factory=lambda: [5.2, 4.0])
    start: list[float] = Field(default_factory=lambda: [0.0, 2.0])
    samples: int = Field(default=256, ge=1)
    rounds: int = Field(default=10, ge=1)
    iterations: int = Field(default=4, ge=1)
    sampler_temperature: float = Field(default=0.1, gt=0)
    explore_sigma: float = Field(default=1.5, gt=0)
    exploit_sigma: float = Field(default=0.05, gt=0)

    @field_validator("sigmas")
    @classmethod
    def sigmas_nonnegative(cls, v: list[float]) -> list[float]:
        if any(s < 0 for s in v):
            raise ValueError("kernel widths must be >= 0")
        return v

    @model_validator(mode="after")
    def bounds_cover_dims(self) -> "LandscapeSection":
        for name in ("lower", "upper", "start"):
            if len(getattr(self, name)) < self.dims:
                raise ValueError(f"{name} needs at least {self.dims} entries")
        if any(lo >= hi for lo, hi in zip(self.lower[: self.dims], self.upper[: self.dims])):
            raise ValueError("lower must be < upper on every axis")
        return self


class ExperimentConfig(_Section):
    env: EnvSection = EnvSection()
    budget: BudgetSection = BudgetSection()
    solver: SolverSection
    experiment: ExperimentSection = ExperimentSection()
    mismatch: dict[str, object] = {}  # parameter overrides for the solver's internal model only
    output: OutputSection = OutputSection()
    compare: CompareSection = CompareSection()
    sweep: SweepSection = SweepSection()
    landscape: LandscapeSection = LandscapeSection()


"""Data types for perturbation sampling."""

from dataclasses import dataclass, field

import numpy as np

from app.core.errors import DimensionMismatchError

# SeedSequence namespaces keep unrelated consumers of one seed apart
NAMESPACE_SAMPLING = 0
NAMESPACE_INSTANCE = 1
NAMESPACE_EVOLUTION = 2


@dataclass(frozen=True)
class RngStream:
    """Coordinates of a reproducible random stream.

    The stream is keyed by (seed, namespace, step, stage). Sample index k
    addresses the k-th block drawn from it, so every draw is fixed by its
    coordinates and independent of how many threads evaluate the batch.
    """
    seed: int
    step: int = 0
    stage: int = 0
    namespace: int = NAMESPACE_SAMPLING

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            entropy=self.seed,
            spawn_key=(self.namespace, self.step, self.stage),
        )
        return np.random.default_rng(sequence)

    def at(self, step: int | None = None, stage: int | None = None) -> "RngStream":
        return RngStream(
            seed=self.seed,
            step=self.step if step is None else step,
            stage=self.stage if stage is None else stage,
            namespace=self.namespace,
        )


@dataclass(frozen=True)
class SamplerParams:
    """Temperature and per-entry standard deviations of the diagonal kernel."""
    temperature: float
    sigma: np.ndarray  # (rows, d_u)

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if sigma.ndim != 2:
            raise DimensionMismatchError(f"sigma must be (rows, d_u), got shape {sigma.shape}")
        if not np.all(sigma > 0):
            raise ValueError("sigma entries must be positive")
        object.__setattr__(self, "sigma", sigma)


@dataclass
class PerturbationBatch:
    """N_W noise trajectories and, once rolled out, their costs."""
    noises: np.ndarray  # (N_W, rows, d_u)
    costs: np.ndarray | None = None  # (N_W,), finite or +inf
    sample_count: int = field(init=False)

    def __post_init__(self):
        self.noises = np.asarray(self.noises, dtype=np.float64)
        if self.noises.ndim != 3 or self.noises.shape[0] < 1:
            raise DimensionMismatchError(
                f"noises must be (N_W>=1, rows, d_u), got shape {self.noises.shape}"
            )
        self.sample_count = self.noises.shape[0]
        if self.costs is not None:
            self.with_costs(self.costs)

    def with_costs(self, costs) -> "PerturbationBatch":
        costs = np.asarray(costs, dtype=np.float64)
        if costs.shape != (self.sample_count,):
            raise DimensionMismatchError(
                f"Expected {self.sample_count} costs, got shape {costs.shape}",
                expected=self.sample_count,
                actual=list(costs.shape),
            )
        if np.any(np.isnan(costs)) or np.any(costs == -np.inf):
            raise ValueError("costs must be finite or +inf")
        self.costs = costs
        return self

"""
Equal-budget baselines: constant-kernel MPPI and a covariance-adapting
evolution strategy over the flattened plan.
"""

import logging
import math
import time

import numpy as np

from app.core.errors import NoValidSampleError
from app.services.rollout import DynamicsModel, State, rollout_batch
from app.services.sampler import NAMESPACE_EVOLUTION, RngStream
from app.services.solvers.dial import plan_cost, receding_step, shift
from app.services.solvers.types import (
    ControllerState,
    EvoStrategyConfig,
    FixedMppiConfig,
    StageDiagnostics,
    StepDiagnostics,
)

logger = logging.getLogger(__name__)


# ============================================
# Fixed-kernel MPPI
# ============================================

def fixed_kernels(cfg: FixedMppiConfig, plan_shape: tuple[int, int]):
    """(stage, sigma) pairs for the M inner iterations; stage numbers count down like DIAL's."""
    sigma = np.full(plan_shape, cfg.sigma_fixed)
    return ((m, sigma) for m in range(cfg.iterations, 0, -1))


def mppi_fixed_step(
    model: DynamicsModel,
    x0: State,
    U: np.ndarray,
    cfg: FixedMppiConfig,
    rng: RngStream,
) -> tuple[np.ndarray, np.ndarray]:
    """M constant-kernel MPPI updates, then apply U[0] and shift.

    Returns (action, shifted plan).
    """
    U = np.asarray(U, dtype=np.float64)
    state = ControllerState(U=U, update_counts=np.zeros(cfg.horizon + 1, dtype=np.int64), t=rng.step)
    action, next_state = receding_step(
        model, np.asarray(x0, dtype=np.float64), state, cfg, fixed_kernels(cfg, U.shape), rng
    )
    return action, next_state.U


# ============================================
# Covariance matrix adaptation
# ============================================

class CovarianceEvolution:
    """Rank-based (mu/mu_w, lambda) covariance matrix adaptation with ask/tell.

    Log-decreasing recombination weights over the best ``parents`` candidates,
    cumulative step-size adaptation, rank-one plus rank-mu covariance update.
    A degenerate covariance (non-finite, non-positive, or ill-conditioned)
    resets the distribution to the identity and the initial step size.
    """

    MAX_CONDITION = 1e14

    def __init__(self, mean: np.ndarray, step_size: float, population: int, parents: int | None = None):
        self.mean = np.asarray(mean, dtype=np.float64).ravel().copy()
        self.dim = n = self.mean.size
        self.population = population
        self.parents = mu = parents if parents is not None else population // 2
        if not 1 <= mu <= population:
            raise ValueError(f"parents must lie in [1, {population}], got {mu}")

        raw = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
        self.weights = raw / raw.sum()
        self.mueff = 1.0 / np.sum(self.weights**2)

        self.cc = (4 + self.mueff / n) / (n + 4 + 2 * self.mueff / n)
        self.cs = (self.mueff + 2) / (n + self.mueff + 5)
        self.c1 = 2 / ((n + 1.3) ** 2 + self.mueff)
        self.cmu = min(1 - self.c1, 2 * (self.mueff - 2 + 1 / self.mueff) / ((n + 2) ** 2 + self.mueff))
        self.damps = 2 * self.mueff / population + 0.3 + self.cs

        self.initial_step = step_size
        self.generation = 0
        self.resets = 0
        self._reset_distribution()

    def _reset_distribution(self) -> None:
        self.sigma = self.initial_step
        self.C = np.eye(self.dim)
        self.B = np.eye(self.dim)
        self.D = np.ones(self.dim)
        self.pc = np.zeros(self.dim)
        self.ps = np.zeros(self.dim)

    def _update_eigensystem(self) -> None:
        self.C = 0.5 * (self.C + self.C.T)
        degenerate = not (np.all(np.isfinite(self.C)) and math.isfinite(self.sigma) and self.sigma > 0)
        if not degenerate:
            eigenvalues, basis = np.linalg.eigh(self.C)
            degenerate = eigenvalues[0] <= 0 or eigenvalues[-1] > self.MAX_CONDITION * eigenvalues[0]
        if degenerate:
            self.resets += 1
            logger.warning(
                f"[CovarianceEvolution] degenerate covariance at generation {self.generation}; "
                f"resetting to step size {self.initial_step}"
            )
            self._reset_distribution()
            return
        self.B = basis
        self.D = np.sqrt(eigenvalues)

    def ask(self, rng: np.random.Generator) -> np.ndarray:
        """Sample ``population`` candidates: mean + sigma * B D z."""
        self._update_eigensystem()
        z = rng.standard_normal((self.population, self.dim))
        return self.mean + self.sigma * (z * self.D) @ self.B.T

    def tell(self, solutions: np.ndarray, costs: np.ndarray) -> None:
        """Update mean, evolution paths, covariance and step size from evaluated candidates."""
        costs = np.asarray(costs, dtype=np.float64)
        if not np.isfinite(costs).any():
            raise NoValidSampleError(costs.size)
        self.generation += 1
        n = self.dim

        order = np.argsort(costs, kind="stable")
        selected = solutions[order[: self.parents]]
        old_mean = self.mean
        self.mean = self.weights @ selected

        y = self.mean - old_mean
        inv_sqrt = (self.B / self.D) @ self.B.T
        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) / self.sigma * (inv_sqrt @ y)
        hsig = float(
            np.sum(self.ps**2) / n / (1 - (1 - self.cs) ** (2 * self.generation)) < 2 + 4.0 / (n + 1)
        )
        self.pc = (1 - self.cc) * self.pc + math.sqrt(self.cc * (2 - self.cc) * self.mueff) / self.sigma * hsig * y

        c1a = self.c1 * (1 - (1 - hsig**2) * self.cc * (2 - self.cc))
        steps = selected - old_mean
        self.C = (
            (1 - c1a - self.cmu) * self.C
            + self.c1 * np.outer(self.pc, self.pc)
            + (self.cmu / self.sigma**2) * (self.weights[:, None] * steps).T @ steps
        )
        self.sigma *= math.exp(min(1.0, (self.cs / self.damps) * (np.sum(self.ps**2) / n - 1) / 2))


def _evolve(
    model: DynamicsModel,
    x0: State,
    flat_plan: np.ndarray,
    cfg: EvoStrategyConfig,
    rng: RngStream,
) -> tuple[np.ndarray, list[StageDiagnostics], int]:
    rows = cfg.horizon + 1
    action_dim = model.action_dim
    es = CovarianceEvolution(flat_plan, cfg.initial_step, cfg.population, cfg.parents)
    recombination_entropy = float(-np.sum(es.weights * np.log(es.weights)))
    stages: list[StageDiagnostics] = []

    for generation in range(1, cfg.generations + 1):
        stream = RngStream(seed=rng.seed, step=rng.step, stage=generation, namespace=NAMESPACE_EVOLUTION)
        candidates = es.ask(stream.generator())
        costs = rollout_batch(
            model, x0, candidates.reshape(cfg.population, rows, action_dim), cfg.dt, workers=cfg.workers
        )
        try:
            es.tell(candidates, costs)
        except NoValidSampleError as e:
            logger.warning(f"[step {rng.step}] generation {generation}: {e.message}; keeping mean")
            stages.append(StageDiagnostics(generation, math.inf, math.inf, 0.0, 0.0, 0, failed=True))
            continue
        finite = costs[np.isfinite(costs)]
        stages.append(
            StageDiagnostics(
                stage=generation,
                best_cost=float(finite.min()),
                mean_cost=float(finite.mean()),
                weight_entropy=recombination_entropy,
                effective_sample_size=float(es.mueff),
                valid_samples=int(finite.size),
            )
        )
    return es.mean.reshape(rows, action_dim), stages, es.resets


def evo_step(
    model: DynamicsModel,
    x0: State,
    flat_plan: np.ndarray,
    cfg: EvoStrategyConfig,
    rng: RngStream,
) -> tuple[np.ndarray, np.ndarray]:
    """One receding-horizon step of the evolution strategy; the search mean is the plan.

    Returns (action, shifted flat plan).
    """
    plan, _, _ = _evolve(model, np.asarray(x0, dtype=np.float64), flat_plan, cfg, rng)
    return plan[0].copy(), shift(plan).ravel()


def evo_control_step(
    model: DynamicsModel,
    x: State,
    state: ControllerState,
    cfg: EvoStrategyConfig,
) -> tuple[np.ndarray, ControllerState]:
    """evo_step with the bookkeeping every controller shares."""
    started = time.perf_counter()
    x = np.asarray(x, dtype=np.float64)
    rng = RngStream(seed=cfg.seed, step=state.t)
    plan, stages, resets = _evolve(model, x, state.U.ravel(), cfg, rng)

    held = all(s.failed for s in stages)
    if held:
        logger.warning(f"[step {state.t}] every generation failed; holding previous plan")
        plan = state.U
    counts = state.update_counts + sum(1 for s in stages if not s.failed)
    action = plan[0].copy()
    record = StepDiagnostics(
        step=state.t,
        action=action,
        plan_cost=plan_cost(model, x, plan, cfg.dt),
        stages=stages,
        held=held,
        applied_update_count=int(counts[0]),
        covariance_reset=resets > 0,
        wall_clock=time.perf_counter() - started,
    )
    next_state = ControllerState(
        U=shift(plan),
        update_counts=np.concatenate([counts[1:], [0]]),
        t=state.t + 1,
        diagnostics=[*state.diagnostics, record],
    )
    return action, next_state

"""
Solver-in-the-loop episodes.

The controller plans against its internal model (the environment with the
``mismatch.*`` overrides applied) while the episode is stepped on the true
environment. Seeds run in worker processes when ``ANNEALED_MPC_THREADS``
allows it; records always come back in seed order and never depend on the
worker count.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from app.core.config import get_settings
from app.core.errors import BudgetParityError, ParameterLeakError
from app.domain.schemas import ExperimentConfig
from app.services.annealing import NoiseSchedule
from app.services.bench.config import with_solver_variant
from app.services.envs import Environment, create_env
from app.services.sampler import NAMESPACE_INSTANCE, RngStream
from app.services.solvers import (
    BaseController,
    DialConfig,
    EvoStrategyConfig,
    FixedMppiConfig,
    StepDiagnostics,
    create_controller,
)

logger = logging.getLogger(__name__)


@dataclass
class RunRecord:
    """One seed of one solver: the realized trace plus summary metrics."""
    label: str
    env_id: str
    seed: int
    actions: np.ndarray  # (steps, d_u)
    states: np.ndarray  # (steps + 1, d_x)
    realized_cost: float
    diagnostics: list[StepDiagnostics]
    tracking_error: float
    success: bool
    contact_score: float | None
    wall_clock: np.ndarray  # seconds per control step
    rollouts_per_step: int
    diverged: bool = False

    @property
    def steps(self) -> int:
        return int(self.actions.shape[0])

    @property
    def held_steps(self) -> int:
        return sum(1 for d in self.diagnostics if d.held)

    @property
    def mean_step_seconds(self) -> float:
        return float(self.wall_clock.mean()) if self.wall_clock.size else 0.0


@dataclass
class Episode:
    """True environment and the model the solver plans with."""
    env: Environment
    model: Environment
    overrides: dict = field(default_factory=dict)


def make_episode(config: ExperimentConfig, seed: int) -> Episode:
    env = create_env(config.env.id, **config.env.params)
    if config.env.randomize:
        env = env.randomized(RngStream(seed=seed, namespace=NAMESPACE_INSTANCE).generator())
    overrides = dict(config.mismatch)
    model = env.with_overrides(**overrides) if overrides else env
    return Episode(env=env, model=model, overrides=overrides)


def solver_config(config: ExperimentConfig, action_dim: int, seed: int = 0, workers: int = 1):
    """The solver's own config type, built from the budget and solver sections."""
    solver, budget = config.solver, config.budget
    if solver.id == "dial":
        schedule = NoiseSchedule(
            iterations=budget.iterations,
            horizon=budget.horizon,
            action_dim=action_dim,
            beta1=solver.beta1,
            beta2=solver.beta2,
            sigma_base=solver.sigma_base,
        )
        return DialConfig(
            schedule=schedule,
            temperature=solver.temperature,
            samples=budget.samples,
            dt=budget.dt,
            seed=seed,
            node_count=solver.node_count,
            interpolation=solver.interpolation,
            workers=workers,
        )
    if solver.id == "mppi":
        return FixedMppiConfig(
            sigma_fixed=solver.sigma_fixed,
            temperature=solver.temperature,
            samples=budget.samples,
            iterations=budget.iterations,
            horizon=budget.horizon,
            dt=budget.dt,
            seed=seed,
            node_count=solver.node_count,
            interpolation=solver.interpolation,
            workers=workers,
        )
    if solver.id == "cmaes":
        return EvoStrategyConfig(
            population=solver.population or budget.samples,
            generations=solver.generations or budget.iterations,
            initial_step=solver.initial_step,
            horizon=budget.horizon,
            dt=budget.dt,
            selection_fraction=solver.selection_fraction,
            seed=seed,
            workers=workers,
        )
    raise ValueError(f"Unknown solver: {solver.id}")


def build_controller(config: ExperimentConfig, model: Environment, seed: int = 0, workers: int = 1) -> BaseController:
    return create_controller(config.solver.id, model, solver_config(config, model.action_dim, seed, workers))


def rollouts_per_step(config: ExperimentConfig) -> int:
    action_dim = create_env(config.env.id, **config.env.params).action_dim
    return solver_config(config, action_dim).rollouts_per_step


def check_budget_parity(budgets: dict[str, int]) -> None:
    """Raises BudgetParityError unless every solver spends the same rollouts per step."""
    if len(set(budgets.values())) > 1:
        raise BudgetParityError(budgets)


# ============================================
# Episodes
# ============================================

def run_episode(config: ExperimentConfig, seed: int, label: str | None = None, workers: int = 1) -> RunRecord:
    label = label or config.solver.id
    episode = make_episode(config, seed)
    env = episode.env
    checksum = env.parameter_checksum()
    controller = build_controller(config, episode.model, seed=seed, workers=workers)
    dt = config.budget.dt

    x = env.initial_state()
    state = controller.init_state()
    states, actions, wall_clock = [x], [], []
    cost = 0.0
    diverged = False

    for t in range(config.experiment.steps):
        started = time.perf_counter()
        action, state = controller.step(x, state)
        wall_clock.append(time.perf_counter() - started)
        action = env.clamp(action)
        cost += float(env.running_cost(x, action))
        x = env.step(x, action, dt)
        actions.append(action)
        if not np.all(np.isfinite(x)):
            logger.warning(f"[{label}] seed {seed}: true state diverged at step {t}; stopping episode")
            diverged = True
            break
        states.append(x)

    if diverged:
        cost = math.inf
    else:
        cost += float(env.terminal_cost(x))

    if env.parameter_checksum() != checksum:
        raise ParameterLeakError(env.env_id, seed)

    trace = np.array(states)
    record = RunRecord(
        label=label,
        env_id=env.env_id,
        seed=seed,
        actions=np.array(actions).reshape(len(actions), env.action_dim),
        states=trace,
        realized_cost=cost,
        diagnostics=state.diagnostics,
        tracking_error=env.tracking_error(trace),
        success=False if diverged else env.success(trace),
        contact_score=None if diverged else env.contact_score(trace),
        wall_clock=np.array(wall_clock),
        rollouts_per_step=controller.rollouts_per_step,
        diverged=diverged,
    )
    logger.info(
        f"[{label}] seed {seed}: cost={record.realized_cost:.4g} success={record.success} "
        f"held={record.held_steps} steps={record.steps}"
    )
    return record


def run_experiment(config: ExperimentConfig, label: str | None = None) -> list[RunRecord]:
    """One RunRecord per seed, in seed order.

    Workers go to seeds when there are several, otherwise to rollout chunks.
    Seed workers are processes: per-step numpy calls are small enough that
    threads stay serialized on the interpreter lock.
    """
    seeds = config.experiment.seeds
    threads = get_settings().threads
    seed_workers = min(threads, len(seeds))
    rollout_workers = 1 if seed_workers > 1 else threads
    logger.info(
        f"Running {config.solver.id} on {config.env.id}: {len(seeds)} seed(s), "
        f"{config.experiment.steps} steps, threads={threads}"
    )

    run = partial(run_episode, config, label=label, workers=rollout_workers)
    if seed_workers > 1:
        with ProcessPoolExecutor(max_workers=seed_workers) as pool:
            return list(pool.map(run, seeds))
    return [run(seed) for seed in seeds]


def run_comparison(config: ExperimentConfig) -> dict[str, list[RunRecord]]:
    """Every entry of compare.solvers on the same seeds, after the budget parity check."""
    variants = {label: with_solver_variant(config, label) for label in config.compare.solvers}
    check_budget_parity({label: rollouts_per_step(cfg) for label, cfg in variants.items()})
    return {label: run_experiment(cfg, label=label) for label, cfg in variants.items()}

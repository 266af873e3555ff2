"""
Controller strategy objects.

Every solver is wrapped in a BaseController so the bench harness can drive
DIAL and the baselines through one interface and compare their budgets.
"""

from abc import ABC, abstractmethod
import logging

import numpy as np

from app.services.rollout import DynamicsModel, State
from app.services.sampler import RngStream
from app.services.solvers.baselines import evo_control_step, fixed_kernels
from app.services.solvers.dial import control_step, initial_plan, receding_step
from app.services.solvers.types import (
    ControllerState,
    DialConfig,
    EvoStrategyConfig,
    FixedMppiConfig,
)

logger = logging.getLogger(__name__)


class BaseController(ABC):
    """Abstract base class for receding-horizon controllers."""

    solver_id: str = ""

    def __init__(self, model: DynamicsModel, config):
        self.model = model
        self.config = config

    @property
    @abstractmethod
    def rollouts_per_step(self) -> int:
        """Sampled rollouts spent in one control step.

        Every controller also rolls out its optimized plan once per step to
        record ``plan_cost``; that deterministic rollout is not counted here.
        """
        ...

    @abstractmethod
    def step(self, x: State, state: ControllerState) -> tuple[np.ndarray, ControllerState]:
        """Plan from the measured state; returns (applied action, next controller state)."""
        ...

    def init_state(self) -> ControllerState:
        """Zero plan, zero update counters, t = 0."""
        return ControllerState(
            U=initial_plan(self.config, self.model.action_dim),
            update_counts=np.zeros(self.config.horizon + 1, dtype=np.int64),
        )


class DialController(BaseController):
    """N annealed MPPI stages per control step under the dual-loop schedule."""

    solver_id = "dial"

    @property
    def rollouts_per_step(self) -> int:
        return self.config.rollouts_per_step

    def step(self, x: State, state: ControllerState) -> tuple[np.ndarray, ControllerState]:
        return control_step(self.model, x, state, self.config)


class FixedMppiController(BaseController):
    """M constant-kernel MPPI updates per control step."""

    solver_id = "mppi"

    @property
    def rollouts_per_step(self) -> int:
        return self.config.rollouts_per_step

    def step(self, x: State, state: ControllerState) -> tuple[np.ndarray, ControllerState]:
        rng = RngStream(seed=self.config.seed, step=state.t)
        kernels = fixed_kernels(self.config, state.U.shape)
        return receding_step(self.model, np.asarray(x, dtype=np.float64), state, self.config, kernels, rng)


class EvoController(BaseController):
    """Covariance-adapting evolution strategy, restarted from the shifted plan every step."""

    solver_id = "cmaes"

    @property
    def rollouts_per_step(self) -> int:
        return self.config.rollouts_per_step

    def init_state(self) -> ControllerState:
        return ControllerState(
            U=np.zeros((self.config.horizon + 1, self.model.action_dim)),
            update_counts=np.zeros(self.config.horizon + 1, dtype=np.int64),
        )

    def step(self, x: State, state: ControllerState) -> tuple[np.ndarray, ControllerState]:
        return evo_control_step(self.model, x, state, self.config)


CONFIG_TYPES: dict[type[BaseController], type] = {
    DialController: DialConfig,
    FixedMppiController: FixedMppiConfig,
    EvoController: EvoStrategyConfig,
}

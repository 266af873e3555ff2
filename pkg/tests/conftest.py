from dataclasses import dataclass

import numpy as np
import pytest

from app.core.config import get_settings
from app.services.envs import DoubleIntegrator
from app.services.rollout import DynamicsModel


@dataclass(frozen=True)
class Tripwire(DynamicsModel):
    """1-D integrator whose state becomes infinite once an action exceeds ``trip``."""

    state_dim = 1
    action_dim = 1

    trip: float = 0.5

    @property
    def action_bounds(self):
        return np.array([-1.0]), np.array([1.0])

    def step(self, state, action, dt):
        return np.where(action > self.trip, np.inf, state + action * dt)

    def running_cost(self, state, action):
        return np.sum(state**2, axis=-1) + 0.1 * np.sum(action**2, axis=-1)

    def terminal_cost(self, state):
        return np.sum(state**2, axis=-1)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from default process settings."""
    for name in ("ANNEALED_MPC_THREADS", "ANNEALED_MPC_LOG_LEVEL", "ANNEALED_MPC_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def set_threads(monkeypatch):
    def _set(count: int) -> None:
        monkeypatch.setenv("ANNEALED_MPC_THREADS", str(count))
        get_settings.cache_clear()
    return _set


@pytest.fixture
def double_integrator() -> DoubleIntegrator:
    return DoubleIntegrator()


@pytest.fixture
def tripwire() -> Tripwire:
    return Tripwire()


@pytest.fixture
def always_diverges() -> Tripwire:
    # every action, including 0 and the lower bound, trips
    return Tripwire(trip=-2.0)


@pytest.fixture
def small_overrides() -> dict[str, str]:
    """A double-integrator experiment that runs in well under a second."""
    return {
        "env.id": "double-integrator",
        "env.randomize": "false",
        "budget.samples": "16",
        "budget.horizon": "5",
        "budget.dt": "0.1",
        "budget.iterations": "2",
        "experiment.steps": "5",
        "experiment.seeds": "0..2",
        "output.plots": "false",
    }

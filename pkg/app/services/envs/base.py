"""Environment base class: a DynamicsModel plus what the bench harness needs to score an episode."""

import numpy as np

from app.services.rollout import DynamicsModel


class Environment(DynamicsModel):
    """Immutable task definition. Subclasses are frozen dataclasses."""

    env_id: str = ""

    def initial_state(self) -> np.ndarray:
        raise NotImplementedError

    def randomized(self, rng: np.random.Generator) -> "Environment":
        """Per-seed instance; tasks without randomization return themselves."""
        return self

    def success(self, states: np.ndarray) -> bool:
        """Whether a realized (T+1, d_x) state trace solves the task."""
        return False

    def tracking_error(self, states: np.ndarray) -> float:
        return float("nan")

    def contact_score(self, states: np.ndarray) -> float | None:
        """Total contact score of a trace, for tasks that define one."""
        return None

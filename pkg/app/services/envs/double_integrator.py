"""Point mass on a line (x'' = u): the convex sanity-check task."""

from dataclasses import dataclass

import numpy as np

from app.services.envs.base import Environment


@dataclass(frozen=True)
class DoubleIntegrator(Environment):
    """State (position, velocity); one acceleration input.

    Stepping uses the exact zero-order-hold update, so the discretised
    planning problem is a linear-quadratic least-squares problem and
    ``optimal_plan`` is its exact optimum.
    """

    env_id = "double-integrator"
    state_dim = 2
    action_dim = 1

    start_position: float = 1.0
    start_velocity: float = 0.0
    position_weight: float = 1.0
    velocity_weight: float = 0.1
    effort_weight: float = 0.01
    terminal_position_weight: float = 10.0
    terminal_velocity_weight: float = 1.0
    max_accel: float = 10.0
    goal_tolerance: float = 0.05

    @property
    def action_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([-self.max_accel]), np.array([self.max_accel])

    def initial_state(self) -> np.ndarray:
        return np.array([self.start_position, self.start_velocity])

    def step(self, state, action, dt):
        position, velocity = state[..., 0], state[..., 1]
        accel = action[..., 0]
        return np.stack(
            [position + velocity * dt + 0.5 * accel * dt**2, velocity + accel * dt],
            axis=-1,
        )

    def running_cost(self, state, action):
        return (
            self.position_weight * state[..., 0] ** 2
            + self.velocity_weight * state[..., 1] ** 2
            + self.effort_weight * action[..., 0] ** 2
        )

    def terminal_cost(self, state):
        return (
            self.terminal_position_weight * state[..., 0] ** 2
            + self.terminal_velocity_weight * state[..., 1] ** 2
        )

    def success(self, states: np.ndarray) -> bool:
        return bool(abs(states[-1, 0]) <= self.goal_tolerance)

    def tracking_error(self, states: np.ndarray) -> float:
        return float(abs(states[-1, 0]))

    def optimal_plan(self, x0, rows: int, dt: float) -> tuple[np.ndarray, float]:
        """Exact minimiser of the unconstrained discretised cost over ``rows`` actions.

        Returns (plan of shape (rows, 1), optimal cost).
        """
        A = np.array([[1.0, dt], [0.0, 1.0]])
        B = np.array([0.5 * dt**2, dt])
        x0 = np.asarray(x0, dtype=np.float64)

        # x_h = free[h] + gain[h] @ U for h = 0..rows
        free = np.empty((rows + 1, 2))
        gain = np.zeros((rows + 1, 2, rows))
        free[0] = x0
        for h in range(rows):
            free[h + 1] = A @ free[h]
            gain[h + 1] = A @ gain[h]
            gain[h + 1][:, h] = B

        running = np.sqrt([self.position_weight, self.velocity_weight])
        terminal = np.sqrt([self.terminal_position_weight, self.terminal_velocity_weight])
        weights = np.vstack([np.tile(running, (rows, 1)), terminal[None]])

        design = np.vstack([
            (weights[:, :, None] * gain).reshape(-1, rows),
            np.sqrt(self.effort_weight) * np.eye(rows),
        ])
        target = np.concatenate([-(weights * free).ravel(), np.zeros(rows)])
        plan, *_ = np.linalg.lstsq(design, target, rcond=None)
        residual = design @ plan - target
        return plan[:, None], float(residual @ residual)

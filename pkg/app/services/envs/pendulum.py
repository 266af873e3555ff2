"""Torque-limited pendulum swing-up."""

from dataclasses import dataclass

import numpy as np

from app.services.envs.base import Environment


def wrap_angle(angle):
    return (angle + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class Pendulum(Environment):
    """State (theta, omega) with theta = 0 hanging down; one torque input.

    Integrated with half-step kicks around a full drift (symplectic), so the
    unforced pendulum keeps its energy over long horizons.
    """

    env_id = "pendulum"
    state_dim = 2
    action_dim = 1

    mass: float = 1.0
    length: float = 1.0
    gravity: float = 9.81
    max_torque: float = 2.0
    start_angle: float = 0.0
    angle_weight: float = 1.0
    velocity_weight: float = 0.1
    effort_weight: float = 0.001
    terminal_weight: float = 10.0
    upright_tolerance: float = 0.2

    @property
    def action_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([-self.max_torque]), np.array([self.max_torque])

    def initial_state(self) -> np.ndarray:
        return np.array([self.start_angle, 0.0])

    def _angular_accel(self, theta, torque):
        inertia = self.mass * self.length**2
        return (torque - self.mass * self.gravity * self.length * np.sin(theta)) / inertia

    def step(self, state, action, dt):
        theta, omega = state[..., 0], state[..., 1]
        torque = action[..., 0]
        omega = omega + 0.5 * dt * self._angular_accel(theta, torque)
        theta = theta + dt * omega
        omega = omega + 0.5 * dt * self._angular_accel(theta, torque)
        return np.stack([theta, omega], axis=-1)

    def energy(self, state) -> np.ndarray:
        theta, omega = state[..., 0], state[..., 1]
        kinetic = 0.5 * self.mass * self.length**2 * omega**2
        potential = self.mass * self.gravity * self.length * (1 - np.cos(theta))
        return kinetic + potential

    def _upright_error(self, state):
        return wrap_angle(state[..., 0] - np.pi)

    def running_cost(self, state, action):
        return (
            self.angle_weight * self._upright_error(state) ** 2
            + self.velocity_weight * state[..., 1] ** 2
            + self.effort_weight * action[..., 0] ** 2
        )

    def terminal_cost(self, state):
        return self.terminal_weight * (
            self.angle_weight * self._upright_error(state) ** 2
            + self.velocity_weight * state[..., 1] ** 2
        )

    def success(self, states: np.ndarray) -> bool:
        return bool(abs(self._upright_error(states[-1])) <= self.upright_tolerance)

    def tracking_error(self, states: np.ndarray) -> float:
        return float(abs(self._upright_error(states[-1])))

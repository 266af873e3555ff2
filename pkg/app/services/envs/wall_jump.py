"""
Jumping over a wall.

Two views of the same task:

- ``WallJumpLandscape`` / ``wall_jump_cost``: a single ballistic jump chosen
  by one or two numbers (vertical launch speed, optionally forward speed).
  The cost landscape has a wide, shallow basin (do not jump, stay short of
  the goal) and a narrow, deeper basin (clear the wall and land on the goal),
  separated by a penalty ridge where the jump hits the wall.
- ``WallJumpTask``: a planar point mass controlled at 50 Hz with horizontal
  thrust and a jump command, for closed-loop controller comparisons.

The wall is a cost penalty in both; it never stops the simulation.
"""

from dataclasses import dataclass

import numpy as np

from app.services.envs.base import Environment


# ============================================
# Single-shot landscape
# ============================================

@dataclass(frozen=True)
class WallJumpLandscape:
    gravity: float = 9.81
    forward_speed: float = 2.0  # used when the control is 1-D
    wall_x: float = 1.0
    wall_height: float = 0.5
    goal_x: float = 1.8
    goal_width: float = 0.15
    goal_weight: float = 1.0
    penalty_weight: float = 10.0
    effort_weight: float = 0.02

    def __post_init__(self):
        if not self.wall_height > 0:
            raise ValueError(f"wall_height must be positive, got {self.wall_height}")
        if not self.penalty_weight > 0:
            raise ValueError(f"penalty_weight must be positive, got {self.penalty_weight}")


def wall_jump_terms(controls, task: WallJumpLandscape | None = None) -> dict[str, np.ndarray]:
    """Landing point and cost terms of ballistic jumps.

    ``controls`` is (..., 1) launch speed or (..., 2) (launch, forward speed).

    Landing point x: 0 without a jump, the ballistic range if the jump lands
    before the wall or clears it, the wall itself if the trajectory hits it
    (then the penalty is proportional to how far below the top it hit).
    The goal term is a saturating function of the squared landing error.
    """
    task = task or WallJumpLandscape()
    controls = np.asarray(controls, dtype=np.float64)
    launch = controls[..., 0]
    if controls.shape[-1] > 1:
        forward = np.maximum(controls[..., 1], 0.0)
        effort = task.effort_weight * (launch**2 + controls[..., 1] ** 2)
    else:
        forward = np.full_like(launch, task.forward_speed)
        effort = task.effort_weight * launch**2

    airborne = launch > 0
    flight_time = np.where(airborne, 2.0 * np.maximum(launch, 0.0) / task.gravity, 0.0)
    landing = forward * flight_time

    with np.errstate(divide="ignore", invalid="ignore"):
        time_at_wall = np.where(forward > 0, task.wall_x / forward, np.inf)
    reaches_wall = airborne & (flight_time >= time_at_wall)
    height_at_wall = np.where(
        reaches_wall,
        launch * time_at_wall - 0.5 * task.gravity * time_at_wall**2,
        0.0,
    )
    blocked = reaches_wall & (height_at_wall < task.wall_height)

    x = np.where(blocked, task.wall_x, landing)
    penalty = np.where(blocked, task.penalty_weight * (task.wall_height - height_at_wall), 0.0)
    miss = (x - task.goal_x) ** 2
    goal = task.goal_weight * (1.0 - np.exp(-miss / (2.0 * task.goal_width**2)))
    return {"landing": x, "goal": goal, "penalty": penalty, "effort": effort}


def wall_jump_cost(controls, task: WallJumpLandscape | None = None) -> np.ndarray:
    """Goal term + wall penalty + effort; see ``wall_jump_terms``."""
    terms = wall_jump_terms(controls, task)
    return terms["goal"] + terms["penalty"] + terms["effort"]


# ============================================
# Closed-loop task
# ============================================

@dataclass(frozen=True)
class WallJumpTask(Environment):
    """Planar point mass: state (x, y, vx, vy, x_prev, y_prev), action (thrust, jump) in [-1, 1]^2.

    While grounded the mass feels ground damping and a jump command above
    ``jump_threshold`` applies a vertical impulse ``jump_impulse * jump``.
    In the air only gravity acts on the vertical axis. The position before the
    last step is carried in the state so the wall check covers the whole
    segment travelled, not only the sampled points.
    """

    env_id = "wall-jump"
    state_dim = 6
    action_dim = 2

    mass: float = 1.0
    gravity: float = 9.81
    thrust_force: float = 6.0
    ground_damping: float = 1.5
    jump_impulse: float = 4.0  # N*s
    jump_threshold: float = 0.3
    wall_x: float = 1.0
    wall_half_width: float = 0.05
    wall_height: float = 0.65  # clearing it takes a jump command above ~0.89
    goal_x: float = 1.8
    goal_jitter: float = 0.3
    goal_tolerance: float = 0.15
    tracking_weight: float = 1.0
    penalty_weight: float = 500.0
    effort_weight: float = 0.01
    terminal_weight: float = 10.0

    def __post_init__(self):
        if not self.wall_height > 0:
            raise ValueError(f"wall_height must be positive, got {self.wall_height}")
        if not self.wall_half_width > 0:
            raise ValueError(f"wall_half_width must be positive, got {self.wall_half_width}")
        if not self.penalty_weight > 0:
            raise ValueError(f"penalty_weight must be positive, got {self.penalty_weight}")

    @property
    def action_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([-1.0, -1.0]), np.array([1.0, 1.0])

    def initial_state(self) -> np.ndarray:
        return np.zeros(6)

    def randomized(self, rng: np.random.Generator) -> "WallJumpTask":
        offset = rng.uniform(-self.goal_jitter, self.goal_jitter)
        return self.with_overrides(goal_x=self.goal_x + offset)

    def step(self, state, action, dt):
        x, y, vx, vy = (state[..., k] for k in range(4))
        thrust, jump = action[..., 0], action[..., 1]
        grounded = y <= 0.0

        ax = self.thrust_force * thrust / self.mass - np.where(grounded, self.ground_damping * vx, 0.0)
        vx = vx + ax * dt
        launch = grounded & (jump > self.jump_threshold)
        vy = np.where(launch, self.jump_impulse * jump / self.mass, vy - self.gravity * dt)
        vy = np.where(grounded & ~launch, 0.0, vy)

        x_next = x + vx * dt
        y_next = y + vy * dt
        landed = y_next < 0.0
        y_next = np.where(landed, 0.0, y_next)
        vy = np.where(landed, 0.0, vy)
        return np.stack([x_next, y_next, vx, vy, x, y], axis=-1)

    def penetration(self, state) -> np.ndarray:
        """Depth below the wall top of the lowest point of the last segment inside the wall band.

        The segment runs from (x_prev, y_prev) to (x, y); y is interpolated
        linearly where it enters and leaves the band.
        """
        x0, y0 = state[..., 4], state[..., 5]
        x1, y1 = state[..., 0], state[..., 1]
        lo, hi = self.wall_x - self.wall_half_width, self.wall_x + self.wall_half_width
        overlaps = (np.minimum(x0, x1) <= hi) & (np.maximum(x0, x1) >= lo)

        dx = x1 - x0
        moving = dx != 0.0
        safe_dx = np.where(moving, dx, 1.0)
        s_lo = (lo - x0) / safe_dx
        s_hi = (hi - x0) / safe_dx
        enter = np.where(moving, np.clip(np.minimum(s_lo, s_hi), 0.0, 1.0), 0.0)
        leave = np.where(moving, np.clip(np.maximum(s_lo, s_hi), 0.0, 1.0), 1.0)
        lowest = np.minimum(y0 + enter * (y1 - y0), y0 + leave * (y1 - y0))
        return np.where(overlaps, np.maximum(self.wall_height - lowest, 0.0), 0.0)

    def running_cost(self, state, action):
        return (
            self.tracking_weight * (state[..., 0] - self.goal_x) ** 2
            + self.penalty_weight * self.penetration(state)
            + self.effort_weight * np.sum(action**2, axis=-1)
        )

    def terminal_cost(self, state):
        return self.terminal_weight * (state[..., 0] - self.goal_x) ** 2 + self.penalty_weight * self.penetration(state)

    def success(self, states: np.ndarray) -> bool:
        """Ends past the wall within tolerance of the goal and never went through the wall."""
        final_x = states[-1, 0]
        clean = not np.any(self.penetration(states) > 0.0)
        return bool(clean and final_x > self.wall_x + self.wall_half_width and abs(final_x - self.goal_x) <= self.goal_tolerance)

    def tracking_error(self, states: np.ndarray) -> float:
        return float(abs(states[-1, 0] - self.goal_x))

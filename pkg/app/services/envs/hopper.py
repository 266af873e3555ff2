"""
Planar one-legged hopper hopping across a sequence of target pads.

Generalized coordinates q = (x, z, phi, r): base position, leg angle from
vertical, leg length. The state stacks q, dq/dt and the elapsed time, so the
stage-dependent contact reward stays a function of the state. Ground contact
is a spring-damper on foot penetration with a friction force capped at
mu * F_n; contact forces enter through the foot Jacobian transpose.
"""

from dataclasses import dataclass, field

import numpy as np

from app.services.envs.base import Environment
from app.services.envs.contact import (
    DEFAULT_JOINT_DAMPING,
    ContactStageRecord,
    Pad,
    check_pads,
    contact_reward_terms,
    damped_torque,
    stage_at,
    total_contact_score,
)


def default_pads() -> tuple[Pad, ...]:
    return tuple(Pad(center=0.3 * j, radius=0.1, window=(float(j), float(j + 1))) for j in range(4))


@dataclass(frozen=True)
class HopperTask(Environment):
    env_id = "hopper"
    state_dim = 9
    action_dim = 2

    body_mass: float = 1.0
    leg_mass: float = 0.1
    leg_inertia: float = 0.05
    gravity: float = 9.81
    rest_length: float = 0.5
    length_range: tuple[float, float] = (0.3, 0.7)
    limit_stiffness: float = 2000.0
    ground_stiffness: float = 1500.0
    ground_damping: float = 30.0
    friction: float = 0.8
    friction_damping: float = 50.0
    joint_damping: float = DEFAULT_JOINT_DAMPING
    max_torque: float = 5.0
    max_leg_force: float = 40.0
    substeps: int = 10
    pads: tuple[Pad, ...] = field(default_factory=default_pads)
    pad_translation: float = 0.325
    w_correct: float = 0.1
    w_wrong: float = 0.1
    contact_weight: float = 10.0
    height_weight: float = 1.0
    height_target: float = 0.5
    effort_weight: float = 1e-4

    def __post_init__(self):
        check_pads(self.pads)

    @property
    def action_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([-self.max_torque, -self.max_leg_force]),
            np.array([self.max_torque, self.max_leg_force]),
        )

    def initial_state(self) -> np.ndarray:
        state = np.zeros(self.state_dim)
        state[0] = self.pads[0].center
        state[1] = self.rest_length
        state[3] = self.rest_length
        return state

    def randomized(self, rng: np.random.Generator) -> "HopperTask":
        """Random pad sequence: each next pad is a bounded translation of the previous one."""
        centers = [self.pads[0].center]
        for _ in self.pads[1:]:
            centers.append(centers[-1] + rng.uniform(-self.pad_translation, self.pad_translation))
        pads = tuple(
            Pad(center=float(c), radius=pad.radius, window=pad.window)
            for c, pad in zip(centers, self.pads)
        )
        return self.with_overrides(pads=pads)

    # ============================================
    # Kinematics and contact
    # ============================================

    @staticmethod
    def foot(state) -> tuple[np.ndarray, np.ndarray]:
        x, z, phi, r = (state[..., k] for k in range(4))
        return x + r * np.sin(phi), z - r * np.cos(phi)

    def _ground_force(self, state) -> tuple[np.ndarray, np.ndarray]:
        x, z, phi, r, dx, dz, dphi, dr = (state[..., k] for k in range(8))
        _, foot_z = self.foot(state)
        foot_dx = dx + dr * np.sin(phi) + r * np.cos(phi) * dphi
        foot_dz = dz - dr * np.cos(phi) + r * np.sin(phi) * dphi

        depth = np.maximum(-foot_z, 0.0)
        normal = np.where(depth > 0, np.maximum(self.ground_stiffness * depth - self.ground_damping * foot_dz, 0.0), 0.0)
        cap = self.friction * normal
        tangential = np.clip(-self.friction_damping * foot_dx, -cap, cap)
        return tangential, normal

    def _accelerations(self, state, torque, leg_force):
        phi, r = state[..., 2], state[..., 3]
        tangential, normal = self._ground_force(state)

        # Jacobian transpose of the foot point, rows (x, z, phi, r)
        gen_x = tangential
        gen_z = normal
        gen_phi = r * np.cos(phi) * tangential + r * np.sin(phi) * normal
        gen_r = np.sin(phi) * tangential - np.cos(phi) * normal

        lo, hi = self.length_range
        limit = self.limit_stiffness * (np.maximum(lo - r, 0.0) - np.maximum(r - hi, 0.0))

        total_mass = self.body_mass + self.leg_mass
        ddx = gen_x / total_mass
        ddz = gen_z / total_mass - self.gravity
        ddphi = (damped_torque(torque, state[..., 6], self.joint_damping) + gen_phi) / self.leg_inertia
        ddr = (leg_force + gen_r + limit + self.leg_mass * self.gravity * np.cos(phi)) / self.leg_mass
        return ddx, ddz, ddphi, ddr

    def step(self, state, action, dt):
        h = dt / self.substeps
        q = state[..., 0:4]
        dq = state[..., 4:8]
        torque, leg_force = action[..., 0], action[..., 1]
        for _ in range(self.substeps):
            current = np.concatenate([q, dq], axis=-1)
            acc = np.stack(self._accelerations(current, torque, leg_force), axis=-1)
            dq = dq + h * acc
            q = q + h * dq
        t = state[..., 8:9] + dt
        return np.concatenate([q, dq, t], axis=-1)

    # ============================================
    # Rewards
    # ============================================

    def contact_reward(self, state) -> np.ndarray:
        """Staged contact reward of a single foot, vectorized over leading dims."""
        foot_x, foot_z = self.foot(state)
        stage = stage_at(self.pads, state[..., 8])
        return contact_reward_terms(foot_z <= 0.0, foot_x, stage, self.pads, self.w_correct, self.w_wrong)

    def running_cost(self, state, action):
        return (
            -self.contact_weight * self.contact_reward(state)
            + self.height_weight * (state[..., 1] - self.height_target) ** 2
            + self.effort_weight * np.sum(action**2, axis=-1)
        )

    def terminal_cost(self, state):
        return self.height_weight * (state[..., 1] - self.height_target) ** 2

    def stage_records(self, states: np.ndarray) -> list[ContactStageRecord]:
        """Per-stage contact rewards of a realized trace (samples whose time lies in each window)."""
        rewards = self.contact_reward(states)
        times = states[:, 8]
        records = []
        for j, pad in enumerate(self.pads):
            inside = (times >= pad.window[0]) & (times < pad.window[1])
            if inside.any():
                records.append(ContactStageRecord(stage=j, values=rewards[inside]))
        return records

    def contact_score(self, states: np.ndarray) -> float | None:
        records = self.stage_records(states)
        if not records:
            return None
        return total_contact_score(records, stage_count=max(r.stage for r in records) + 1)

    def success(self, states: np.ndarray) -> bool:
        """Every reached stage touches its pad and never lands on a wrong spot."""
        records = self.stage_records(states)
        if len(records) < len(self.pads):
            return False
        return all(r.minimum >= 0 and np.max(r.values) > 0 for r in records)

    def tracking_error(self, states: np.ndarray) -> float:
        final_stage = int(stage_at(self.pads, states[-1, 8]))
        foot_x, _ = self.foot(states[-1])
        return float(abs(foot_x - self.pads[final_stage].center))

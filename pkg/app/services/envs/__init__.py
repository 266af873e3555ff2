import dataclasses

from app.services.envs.base import Environment
from app.services.envs.contact import (
    ContactStageRecord,
    Pad,
    contact_reward_terms,
    damped_torque,
    staged_contact_reward,
    total_contact_score,
)
from app.services.envs.double_integrator import DoubleIntegrator
from app.services.envs.hopper import HopperTask
from app.services.envs.pendulum import Pendulum
from app.services.envs.wall_jump import (
    WallJumpLandscape,
    WallJumpTask,
    wall_jump_cost,
    wall_jump_terms,
)

# Environment registry
_ENVS: dict[str, type[Environment]] = {
    DoubleIntegrator.env_id: DoubleIntegrator,
    Pendulum.env_id: Pendulum,
    WallJumpTask.env_id: WallJumpTask,
    HopperTask.env_id: HopperTask,
}


def env_ids() -> list[str]:
    return sorted(_ENVS)


def env_parameters(env_id: str) -> dict[str, dataclasses.Field]:
    """Overridable physical/task parameters of an environment."""
    return {f.name: f for f in dataclasses.fields(_get_env_cls(env_id))}


def _get_env_cls(env_id: str) -> type[Environment]:
    env_cls = _ENVS.get(env_id)
    if not env_cls:
        raise ValueError(f"Unknown environment: {env_id}")
    return env_cls


def create_env(env_id: str, **params) -> Environment:
    return _get_env_cls(env_id)(**params)


__all__ = [
    "contact_reward_terms",
    "create_env",
    "damped_torque",
    "env_ids",
    "env_parameters",
    "staged_contact_reward",
    "total_contact_score",
    "wall_jump_cost",
    "wall_jump_terms",
    "ContactStageRecord",
    "DoubleIntegrator",
    "Environment",
    "HopperTask",
    "Pad",
    "Pendulum",
    "WallJumpLandscape",
    "WallJumpTask",
]

from app.services.rollout.engine import rollout, rollout_batch, simulate
from app.services.rollout.types import (
    ControlSequence,
    DynamicsModel,
    RolloutResult,
    State,
    as_control_sequence,
)

__all__ = [
    "rollout",
    "rollout_batch",
    "simulate",
    "ControlSequence",
    "DynamicsModel",
    "RolloutResult",
    "State",
    "as_control_sequence",
]

"""
Staged contact scoring and the joint damping law.

A task is a sequence of target pads, each active during its own time window.
At every instant the stage-j contact reward is

    r = w_correct * n_correct - w_wrong * (n_wrong - n_prev)

where n_prev counts the wrong contacts that still sit on the previous stage's
pad, so holding the last foothold while moving to the next one costs nothing.
The task score is the sum over stages of the worst reward inside each window.
"""

from dataclasses import dataclass

import numpy as np

from app.core.errors import MissingStageError, ScheduleIndexError

DEFAULT_JOINT_DAMPING = 0.65


@dataclass(frozen=True)
class Pad:
    center: float  # m
    radius: float  # m
    window: tuple[float, float]  # [t_min, t_max) in seconds

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"pad radius must be positive, got {self.radius}")
        if not self.window[0] < self.window[1]:
            raise ValueError(f"pad window must satisfy t_min < t_max, got {self.window}")

    def contains(self, positions) -> np.ndarray:
        return np.abs(np.asarray(positions) - self.center) <= self.radius


@dataclass
class ContactStageRecord:
    """Contact rewards sampled inside one stage window."""
    stage: int
    values: np.ndarray

    @property
    def minimum(self) -> float:
        return float(np.min(self.values))


def check_pads(pads) -> None:
    """Windows must be ordered and disjoint."""
    for prev, nxt in zip(pads, pads[1:]):
        if nxt.window[0] < prev.window[1]:
            raise ValueError(f"pad windows overlap or are out of order: {prev.window} then {nxt.window}")


def stage_at(pads, t) -> np.ndarray:
    """Index of the window containing t (clipped to the first/last stage)."""
    starts = np.array([pad.window[0] for pad in pads])
    return np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(pads) - 1)


def staged_contact_reward(
    in_contact,
    positions,
    stage: int,
    pads,
    w_correct: float = 0.1,
    w_wrong: float = 0.1,
) -> float:
    """Contact reward of one instant for per-foot contact flags and foot positions."""
    if not 0 <= stage < len(pads):
        raise ScheduleIndexError("stage", stage, 0, len(pads) - 1)
    return float(np.sum(contact_reward_terms(in_contact, positions, stage, pads, w_correct, w_wrong)))


def contact_reward_terms(
    in_contact,
    positions,
    stage,
    pads,
    w_correct: float = 0.1,
    w_wrong: float = 0.1,
) -> np.ndarray:
    """Per-foot contact reward; ``stage`` broadcasts against ``positions``. Summing gives the reward."""
    in_contact = np.asarray(in_contact, dtype=bool)
    positions = np.asarray(positions, dtype=float)
    stage = np.asarray(stage)
    centers = np.array([pad.center for pad in pads])
    radii = np.array([pad.radius for pad in pads])

    on_target = in_contact & (np.abs(positions - centers[stage]) <= radii[stage])
    wrong = in_contact & ~on_target
    prev = np.maximum(stage - 1, 0)
    on_prev = wrong & (stage > 0) & (np.abs(positions - centers[prev]) <= radii[prev])
    return w_correct * on_target - w_wrong * (wrong.astype(float) - on_prev)


def total_contact_score(records: list[ContactStageRecord], stage_count: int | None = None) -> float:
    """Sum over stages of each window's worst contact reward; every stage must be present."""
    by_stage = {record.stage: record for record in records}
    if stage_count is None:
        stage_count = max(by_stage, default=-1) + 1
    missing = [j for j in range(stage_count) if j not in by_stage]
    if missing or stage_count == 0:
        raise MissingStageError(missing or [0])
    return float(sum(by_stage[j].minimum for j in range(stage_count)))


def damped_torque(torque, omega, gain: float = DEFAULT_JOINT_DAMPING):
    """Effective joint torque tau - d * omega."""
    return np.asarray(torque) - gain * np.asarray(omega)

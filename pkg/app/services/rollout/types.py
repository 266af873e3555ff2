"""Data types shared by every solver: plans, states, the dynamics contract, rollout results."""

import dataclasses
import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from app.core.errors import DimensionMismatchError

# (rows, d_u) plan u_{t:t+H}; the controllers keep H+1 rows (offsets 0..H)
ControlSequence = NDArray[np.float64]

# (d_x,) state, or (..., d_x) when stepping a batch
State = NDArray[np.float64]


class DynamicsModel(ABC):
    """Contract every environment implements.

    ``step``, ``running_cost`` and ``terminal_cost`` must accept leading batch
    dimensions and act row-wise, so a batch of candidates can be stepped in one
    call while each row stays bit-identical to stepping it alone. Models are
    immutable; stepping is pure and therefore safe from several threads.
    """

    state_dim: int
    action_dim: int

    @property
    @abstractmethod
    def action_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-dimension (lo, hi) actuation bounds, lo <= hi."""
        ...

    @abstractmethod
    def step(self, state: State, action: np.ndarray, dt: float) -> State:
        """Advance one control interval (f)."""
        ...

    @abstractmethod
    def running_cost(self, state: State, action: np.ndarray) -> np.ndarray:
        """Stage cost c(x, u); one value per leading index."""
        ...

    @abstractmethod
    def terminal_cost(self, state: State) -> np.ndarray:
        """Terminal cost c_f(x)."""
        ...

    def clamp(self, action: np.ndarray) -> np.ndarray:
        lo, hi = self.action_bounds
        return np.clip(action, lo, hi)

    def with_overrides(self, **params) -> "DynamicsModel":
        """Copy of this model with some physical parameters replaced (model mismatch)."""
        if not dataclasses.is_dataclass(self):
            raise TypeError(f"{type(self).__name__} does not support parameter overrides")
        return dataclasses.replace(self, **params)

    def parameter_checksum(self) -> str:
        """Stable digest of every parameter; used to prove overrides never leak."""
        if dataclasses.is_dataclass(self):
            payload = repr(sorted(dataclasses.asdict(self).items()))
        else:
            payload = repr(sorted(vars(self).items()))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class RolloutResult:
    """Outcome of one rollout; traces are present only when requested."""
    total_cost: float
    state_trace: np.ndarray | None = None  # (rows + 1, d_x)
    per_step_costs: np.ndarray | None = None  # (rows,)
    terminal_cost: float | None = None


def as_control_sequence(values, model: DynamicsModel | None = None) -> ControlSequence:
    """Validate a plan (finite, 2-D, non-empty) and clamp it into the model's bounds."""
    plan = np.asarray(values, dtype=np.float64)
    if plan.ndim != 2 or plan.shape[0] < 1 or plan.shape[1] < 1:
        raise DimensionMismatchError(
            f"Control sequence must be a non-empty (rows, d_u) array, got shape {plan.shape}",
            expected="(rows>=1, d_u>=1)",
            actual=list(plan.shape),
        )
    if not np.all(np.isfinite(plan)):
        raise DimensionMismatchError("Control sequence contains non-finite entries")
    if model is not None:
        if plan.shape[1] != model.action_dim:
            raise DimensionMismatchError(
                f"Plan has {plan.shape[1]} action dims, model expects {model.action_dim}",
                expected=model.action_dim,
                actual=plan.shape[1],
            )
        plan = model.clamp(plan)
    return plan

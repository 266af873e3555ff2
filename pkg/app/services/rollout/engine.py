"""
Rollout engine: evaluates J(U) = sum_h c(x_h, u_h) + c_f(x_R) for one plan or a batch.

Batches are stepped row-wise in a single vectorized pass. Optional worker
threads split the batch into contiguous chunks; since every row is computed
independently, results do not depend on chunking or scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from app.core.errors import DimensionMismatchError, RolloutDivergenceError
from app.services.rollout.types import ControlSequence, DynamicsModel, RolloutResult, State

logger = logging.getLogger(__name__)


def _check_inputs(model: DynamicsModel, x0: State, plans: np.ndarray) -> None:
    if x0.shape != (model.state_dim,):
        raise DimensionMismatchError(
            f"Initial state has shape {x0.shape}, model expects ({model.state_dim},)",
            expected=model.state_dim,
            actual=list(x0.shape),
        )
    if not np.all(np.isfinite(x0)):
        raise DimensionMismatchError("Initial state contains non-finite entries")
    if plans.shape[-1] != model.action_dim:
        raise DimensionMismatchError(
            f"Plan has {plans.shape[-1]} action dims, model expects {model.action_dim}",
            expected=model.action_dim,
            actual=plans.shape[-1],
        )


def simulate(
    model: DynamicsModel,
    x0: State,
    plans: np.ndarray,
    dt: float,
    record_trace: bool = False,
) -> dict:
    """Step a (B, rows, d_u) batch of plans from a shared initial state.

    Returns a dict with ``total`` (B,), ``diverged_at`` (B,) holding the first
    non-finite step index or -1, and, when ``record_trace`` is set, ``states``
    (B, rows + 1, d_x), ``stage_costs`` (B, rows) and ``terminal`` (B,).
    """
    batch, rows, _ = plans.shape
    state = np.broadcast_to(x0, (batch, model.state_dim)).copy()
    total = np.zeros(batch)
    diverged_at = np.full(batch, -1, dtype=np.int64)

    states = stage_costs = None
    if record_trace:
        states = np.empty((batch, rows + 1, model.state_dim))
        states[:, 0] = state
        stage_costs = np.empty((batch, rows))

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for h in range(rows):
            action = model.clamp(plans[:, h])
            cost = model.running_cost(state, action)
            state = model.step(state, action, dt)

            bad = ~(np.isfinite(cost) & np.all(np.isfinite(state), axis=-1))
            newly = bad & (diverged_at < 0)
            diverged_at[newly] = h

            total = total + cost
            if record_trace:
                stage_costs[:, h] = cost
                states[:, h + 1] = state

        terminal = model.terminal_cost(state)
        late = ~np.isfinite(terminal) & (diverged_at < 0)
        diverged_at[late] = rows
        total = total + terminal

    result = {"total": total, "diverged_at": diverged_at}
    if record_trace:
        result.update(states=states, stage_costs=stage_costs, terminal=terminal)
    return result


def rollout(
    model: DynamicsModel,
    x0: State,
    U: ControlSequence,
    dt: float,
    record_trace: bool = False,
) -> RolloutResult:
    """Evaluate one plan; raises RolloutDivergenceError naming the first bad step."""
    x0 = np.asarray(x0, dtype=np.float64)
    plan = np.asarray(U, dtype=np.float64)
    if plan.ndim != 2:
        raise DimensionMismatchError(f"Plan must be 2-D, got shape {plan.shape}")
    _check_inputs(model, x0, plan)

    out = simulate(model, x0, plan[None], dt, record_trace=record_trace)
    step_index = int(out["diverged_at"][0])
    if step_index >= 0:
        quantity = "terminal cost" if step_index == plan.shape[0] else "state or cost"
        raise RolloutDivergenceError(step_index, quantity)

    if not record_trace:
        return RolloutResult(total_cost=float(out["total"][0]))
    return RolloutResult(
        total_cost=float(out["total"][0]),
        state_trace=out["states"][0],
        per_step_costs=out["stage_costs"][0],
        terminal_cost=float(out["terminal"][0]),
    )


def rollout_batch(
    model: DynamicsModel,
    x0: State,
    candidates: np.ndarray,
    dt: float,
    workers: int = 1,
) -> np.ndarray:
    """Costs of N_W candidate plans; divergent candidates get +inf instead of aborting."""
    x0 = np.asarray(x0, dtype=np.float64)
    plans = np.asarray(candidates, dtype=np.float64)
    if plans.ndim != 3:
        raise DimensionMismatchError(
            f"Candidates must be (N_W, rows, d_u), got shape {plans.shape}"
        )
    _check_inputs(model, x0, plans)

    def _costs(chunk: np.ndarray) -> np.ndarray:
        out = simulate(model, x0, chunk, dt)
        costs = out["total"]
        costs[out["diverged_at"] >= 0] = np.inf
        return costs

    if workers <= 1 or plans.shape[0] < 2 * workers:
        costs = _costs(plans)
    else:
        chunks = np.array_split(plans, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            costs = np.concatenate(list(pool.map(_costs, chunks)))

    n_bad = int(np.sum(~np.isfinite(costs)))
    if n_bad:
        logger.warning(f"{n_bad}/{plans.shape[0]} rollouts diverged; assigned +inf cost")
    return costs

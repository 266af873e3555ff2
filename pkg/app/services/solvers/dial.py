"""
Dual-loop annealing MPC.

Each control step runs N annealed MPPI updates on the warm-started plan
(stage i = N first, widest kernel), applies the first action, and shifts the
plan by one row. The fixed-kernel MPPI baseline reuses the same receding-step
machinery with a constant kernel.
"""

import logging
import time
from collections.abc import Iterable

import numpy as np
from scipy import interpolate

from app.core.errors import NoValidSampleError, RolloutDivergenceError
from app.services.annealing import trajectory_kernel
from app.services.rollout import DynamicsModel, State, rollout, rollout_batch
from app.services.sampler import (
    RngStream,
    SamplerParams,
    effective_sample_size,
    estimate_score,
    sample_perturbations,
    score_ascent_step,
    softmax_weights,
    weight_entropy,
)
from app.services.solvers.types import (
    ControllerState,
    DialConfig,
    StageDiagnostics,
    StepDiagnostics,
)

logger = logging.getLogger(__name__)


# ============================================
# Plan operators
# ============================================

def shift(U: np.ndarray) -> np.ndarray:
    """Drop the first row, move the rest forward, replicate the last row into the tail."""
    U = np.asarray(U, dtype=np.float64)
    if U.ndim != 2 or U.shape[0] < 1:
        raise ValueError(f"Cannot shift a plan of shape {U.shape}")
    return np.concatenate([U[1:], U[-1:]], axis=0)


def _sample_positions(source_count: int, target_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Segment index and local coordinate of each target point on the source knots."""
    positions = np.linspace(0.0, source_count - 1, target_count)
    segment = np.minimum(np.floor(positions).astype(np.int64), source_count - 2)
    return segment, positions - segment


def nodes_to_controls(node_values: np.ndarray, points: int, interpolation: str = "linear") -> np.ndarray:
    """Evaluate the interpolant through equally spaced nodes at ``points`` plan rows.

    Accepts leading batch dimensions: (..., node_count, d_u) -> (..., points, d_u).
    Both schemes pass exactly through the nodes; ``cubic`` is Catmull-Rom with
    replicated end nodes.
    """
    nodes = np.asarray(node_values, dtype=np.float64)
    node_count = nodes.shape[-2]
    if node_count < 2:
        raise ValueError(f"node_count must be >= 2, got {node_count}")
    if node_count == points:
        return nodes.copy()

    segment, local = _sample_positions(node_count, points)
    local = local[:, None]
    p1 = np.take(nodes, segment, axis=-2)
    p2 = np.take(nodes, segment + 1, axis=-2)
    if interpolation == "linear":
        return p1 * (1.0 - local) + p2 * local
    if interpolation != "cubic":
        raise ValueError(f"Unknown interpolation: {interpolation}")

    padded = np.concatenate([nodes[..., :1, :], nodes, nodes[..., -1:, :]], axis=-2)
    tangents = 0.5 * (padded[..., 2:, :] - padded[..., :-2, :])
    spline = interpolate.CubicHermiteSpline(np.arange(node_count), nodes, tangents, axis=nodes.ndim - 2)
    return spline(segment + local[:, 0])


def controls_to_nodes(U: np.ndarray, node_count: int) -> np.ndarray:
    """Restrict a dense plan to ``node_count`` equally spaced nodes (linear sampling)."""
    U = np.asarray(U, dtype=np.float64)
    if node_count < 2:
        raise ValueError(f"node_count must be >= 2, got {node_count}")
    if node_count == U.shape[0]:
        return U.copy()
    segment, local = _sample_positions(U.shape[0], node_count)
    local = local[:, None]
    return U[segment] * (1.0 - local) + U[segment + 1] * local


def decode_plan(U: np.ndarray, cfg) -> np.ndarray:
    """Dense (..., H+1, d_u) plan from the controller's decision variable."""
    if cfg.node_count is None:
        return U
    return nodes_to_controls(U, cfg.horizon + 1, cfg.interpolation)


def shift_plan(U: np.ndarray, cfg) -> np.ndarray:
    """Shift in step space; node plans go through the dense sequence and back."""
    if cfg.node_count is None:
        return shift(U)
    return controls_to_nodes(shift(decode_plan(U, cfg)), cfg.node_count)


def initial_plan(cfg, action_dim: int) -> np.ndarray:
    rows = cfg.horizon + 1 if cfg.node_count is None else cfg.node_count
    return np.zeros((rows, action_dim))


def node_offsets(cfg) -> np.ndarray | None:
    """Horizon position of every decision row; None means rows 0..H."""
    if cfg.node_count is None:
        return None
    return np.linspace(0.0, cfg.horizon, cfg.node_count)


# ============================================
# Annealing
# ============================================

def stage_update(
    model: DynamicsModel,
    x0: State,
    U: np.ndarray,
    sigma: np.ndarray,
    stage: int,
    cfg,
    rng: RngStream,
) -> tuple[np.ndarray, StageDiagnostics]:
    """One sampled score-ascent update of U under the kernel ``sigma``.

    Raises NoValidSampleError when every candidate diverged.
    """
    params = SamplerParams(temperature=cfg.temperature, sigma=sigma)
    batch = sample_perturbations(params, cfg.samples, rng.at(stage=stage))
    candidates = decode_plan(U + batch.noises, cfg)
    costs = rollout_batch(model, x0, candidates, cfg.dt, workers=cfg.workers)
    batch.with_costs(costs)

    score = estimate_score(batch, cfg.temperature, sigma)
    updated = score_ascent_step(U, score, sigma)

    weights = softmax_weights(costs, cfg.temperature)
    finite = costs[np.isfinite(costs)]
    diagnostics = StageDiagnostics(
        stage=stage,
        best_cost=float(finite.min()),
        mean_cost=float(finite.mean()),
        weight_entropy=weight_entropy(weights),
        effective_sample_size=effective_sample_size(weights),
        valid_samples=int(finite.size),
    )
    logger.debug(
        f"[stage {stage}] best={diagnostics.best_cost:.6g} "
        f"ess={diagnostics.effective_sample_size:.1f} valid={diagnostics.valid_samples}"
    )
    return updated, diagnostics


def anneal_step(
    model: DynamicsModel,
    x0: State,
    U: np.ndarray,
    i: int,
    cfg: DialConfig,
    rng: RngStream,
) -> np.ndarray:
    """Stage-i update: sample under the stage-i kernel, estimate the score, ascend."""
    sigma = trajectory_kernel(i, cfg.schedule, offsets=node_offsets(cfg))
    updated, _ = stage_update(model, x0, U, sigma, i, cfg, rng)
    return updated


def plan_cost(model: DynamicsModel, x0: State, dense: np.ndarray, dt: float) -> float:
    try:
        return rollout(model, x0, dense, dt).total_cost
    except RolloutDivergenceError:
        return float("inf")


def receding_step(
    model: DynamicsModel,
    x: State,
    state: ControllerState,
    cfg,
    kernels: Iterable[tuple[int, np.ndarray]],
    rng: RngStream,
) -> tuple[np.ndarray, ControllerState]:
    """Run the given (stage, kernel) updates, emit the first action, shift.

    A stage with no finite-cost sample leaves the plan unchanged. When every
    stage fails the step is flagged as held and the pre-step plan is applied.
    """
    started = time.perf_counter()
    U = state.U
    counts = state.update_counts.copy()
    stages: list[StageDiagnostics] = []

    for stage, sigma in kernels:
        try:
            U, diagnostics = stage_update(model, x, U, sigma, stage, cfg, rng)
        except NoValidSampleError as e:
            logger.warning(f"[step {state.t}] stage {stage}: {e.message}; keeping plan")
            stages.append(
                StageDiagnostics(
                    stage=stage,
                    best_cost=float("inf"),
                    mean_cost=float("inf"),
                    weight_entropy=0.0,
                    effective_sample_size=0.0,
                    valid_samples=0,
                    failed=True,
                )
            )
            continue
        counts += 1
        stages.append(diagnostics)

    held = bool(stages) and all(s.failed for s in stages)
    if held:
        logger.warning(f"[step {state.t}] every stage failed; holding previous plan")

    dense = decode_plan(U, cfg)
    action = dense[0].copy()
    record = StepDiagnostics(
        step=state.t,
        action=action,
        plan_cost=plan_cost(model, x, dense, cfg.dt),
        stages=stages,
        held=held,
        applied_update_count=int(counts[0]),
        wall_clock=time.perf_counter() - started,
    )

    next_state = ControllerState(
        U=shift_plan(U, cfg),
        update_counts=np.concatenate([counts[1:], [0]]),
        t=state.t + 1,
        diagnostics=[*state.diagnostics, record],
    )
    return action, next_state


def control_step(
    model: DynamicsModel,
    x_measured: State,
    state: ControllerState,
    cfg: DialConfig,
) -> tuple[np.ndarray, ControllerState]:
    """Algorithm loop for one control step: stages N..1, apply U[0], shift."""
    offsets = node_offsets(cfg)
    kernels = (
        (i, trajectory_kernel(i, cfg.schedule, offsets=offsets))
        for i in cfg.schedule.stages()
    )
    rng = RngStream(seed=cfg.seed, step=state.t)
    return receding_step(model, np.asarray(x_measured, dtype=np.float64), state, cfg, kernels, rng)

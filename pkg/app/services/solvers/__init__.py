"""
Solver registry.

Solver ids: ``dial`` (dual-loop annealing), ``mppi`` (constant kernel; the
explore/exploit presets only change its kernel), ``cmaes`` (evolution strategy).
"""

from app.services.rollout import DynamicsModel
from app.services.solvers.base import (
    CONFIG_TYPES,
    BaseController,
    DialController,
    EvoController,
    FixedMppiController,
)
from app.services.solvers.baselines import CovarianceEvolution, evo_step, mppi_fixed_step
from app.services.solvers.dial import (
    anneal_step,
    control_step,
    controls_to_nodes,
    nodes_to_controls,
    shift,
)
from app.services.solvers.types import (
    ControllerState,
    DialConfig,
    EvoStrategyConfig,
    FixedMppiConfig,
    StageDiagnostics,
    StepDiagnostics,
)

_SOLVERS: dict[str, type[BaseController]] = {
    DialController.solver_id: DialController,
    FixedMppiController.solver_id: FixedMppiController,
    EvoController.solver_id: EvoController,
}


def solver_ids() -> list[str]:
    return sorted(_SOLVERS)


def create_controller(solver_id: str, model: DynamicsModel, config) -> BaseController:
    """Build a controller by id; the config type must match the solver."""
    controller_cls = _SOLVERS.get(solver_id)
    if not controller_cls:
        raise ValueError(f"Unknown solver: {solver_id}")
    expected = CONFIG_TYPES[controller_cls]
    if not isinstance(config, expected):
        raise TypeError(f"Solver {solver_id} needs a {expected.__name__}, got {type(config).__name__}")
    return controller_cls(model, config)


__all__ = [
    "anneal_step",
    "control_step",
    "controls_to_nodes",
    "create_controller",
    "evo_step",
    "mppi_fixed_step",
    "nodes_to_controls",
    "shift",
    "solver_ids",
    "BaseController",
    "ControllerState",
    "CovarianceEvolution",
    "DialConfig",
    "DialController",
    "EvoController",
    "EvoStrategyConfig",
    "FixedMppiConfig",
    "FixedMppiController",
    "StageDiagnostics",
    "StepDiagnostics",
]

"""
Named experiment presets.
Single source of truth for budgets, kernels and trial counts that have names.

A preset is a set of flat config keys (same keys as the experiment config
file). Presets are layered: ``desk`` is always applied first, then any named
presets in order, then the config file, then CLI flags.

Only ``paper-budget``, ``crate-climbing``, ``mppi-explore``, ``mppi-exploit``
and the ``trials-*`` counts come from published settings. The ``desk``
values (temperature, beta1, beta2, sigma_base) are tuned for the bundled
desk-scale tasks.
"""
from enum import Enum
from typing import TypedDict


class PresetName(str, Enum):
    """Preset identifiers."""
    DESK = "desk"
    PAPER_BUDGET = "paper-budget"
    CRATE_CLIMBING = "crate-climbing"
    MPPI_EXPLORE = "mppi-explore"
    MPPI_EXPLOIT = "mppi-exploit"
    TRIALS_JUMP = "trials-jump"
    TRIALS_CLIMB = "trials-climb"


class Preset(TypedDict):
    """Type definition for a preset entry."""
    description: str
    values: dict[str, str | int | float]  # dotted config key -> value
    solver_variant: bool  # usable as an entry of compare.solvers


# Preset configuration - edit here to change named settings
PRESETS: dict[PresetName, Preset] = {
    PresetName.DESK: {
        "description": "Default small budget for desk-scale runs",
        "values": {
            "env.id": "wall-jump",
            "solver.id": "dial",
            "budget.samples": 128,
            "budget.horizon": 20,
            "budget.dt": 0.02,
            "budget.iterations": 3,
            "solver.temperature": 1.0,
            "solver.sigma_base": 1.0,
            "solver.beta1": 0.2,
            "solver.beta2": 0.5,
            "experiment.steps": 100,
            "experiment.seeds": "0..99",
        },
        "solver_variant": False,
    },
    PresetName.PAPER_BUDGET: {
        "description": "2048 samples, 20-step horizon at 50 Hz",
        "values": {"budget.samples": 2048, "budget.horizon": 20, "budget.dt": 0.02},
        "solver_variant": False,
    },
    PresetName.CRATE_CLIMBING: {
        "description": "4096 samples, 40-step horizon, 4 annealing steps",
        "values": {"budget.samples": 4096, "budget.horizon": 40, "budget.iterations": 4},
        "solver_variant": False,
    },
    PresetName.MPPI_EXPLORE: {
        "description": "Constant-kernel MPPI with the large kernel",
        "values": {"solver.id": "mppi", "solver.sigma_fixed": 0.2},
        "solver_variant": True,
    },
    PresetName.MPPI_EXPLOIT: {
        "description": "Constant-kernel MPPI with the small kernel",
        "values": {"solver.id": "mppi", "solver.sigma_fixed": 0.05},
        "solver_variant": True,
    },
    PresetName.TRIALS_JUMP: {
        "description": "Five trials, as reported for jumping",
        "values": {"experiment.seeds": "0..4"},
        "solver_variant": False,
    },
    PresetName.TRIALS_CLIMB: {
        "description": "Ten trials, as reported for climbing",
        "values": {"experiment.seeds": "0..9"},
        "solver_variant": False,
    },
}


# Alternate spellings accepted on the command line and in config files
PRESET_ALIASES: dict[str, PresetName] = {
    "full-budget": PresetName.PAPER_BUDGET,
}


def resolve_preset_name(name: str) -> PresetName:
    """Canonical preset for a name or alias. Raises ValueError if unknown."""
    if name in PRESET_ALIASES:
        return PRESET_ALIASES[name]
    try:
        return PresetName(name)
    except ValueError:
        raise ValueError(f"Unknown preset: {name}") from None


def preset_names() -> list[str]:
    return [name.value for name in PresetName] + list(PRESET_ALIASES)


def get_preset(name: str) -> Preset:
    """Get a preset by name.

    Args:
        name: The preset name (e.g. 'paper-budget')

    Returns:
        The Preset entry

    Raises:
        ValueError: if the name is unknown
    """
    return PRESETS[resolve_preset_name(name)]


def is_solver_variant(name: str) -> bool:
    """Whether ``name`` is a preset that only selects and tunes a solver."""
    try:
        return PRESETS[resolve_preset_name(name)]["solver_variant"]
    except ValueError:
        return False

"""
Experiment configuration loading.

Config files are flat ``key = value`` lines with dotted sections::

    # wall-jump, small kernel
    env.id = wall-jump
    solver.temperature = 0.1
    experiment.seeds = 0..9
    mismatch.mass = 1.2

Layers are applied in order: the ``desk`` preset, named presets, the file,
then CLI overrides. Every key must appear in the registry below (or name a
parameter of the selected environment for ``env.*`` / ``mismatch.*``);
anything else is a hard error reported with its dotted path.
"""

import dataclasses
import logging
import re
import typing
from pathlib import Path
from collections.abc import Iterable, Mapping

from pydantic import BaseModel, ValidationError

from app.core.errors import ConfigValidationError
from app.core.presets import PresetName, get_preset, is_solver_variant
from app.domain.schemas import (
    BudgetSection,
    CompareSection,
    EnvSection,
    ExperimentConfig,
    ExperimentSection,
    LandscapeSection,
    OutputSection,
    SolverSection,
    SweepSection,
)
from app.services.envs import Pad, create_env, env_ids, env_parameters
from app.services.solvers import solver_ids

logger = logging.getLogger(__name__)

SECTIONS: dict[str, type[BaseModel]] = {
    "env": EnvSection,
    "budget": BudgetSection,
    "solver": SolverSection,
    "experiment": ExperimentSection,
    "output": OutputSection,
    "compare": CompareSection,
    "sweep": SweepSection,
    "landscape": LandscapeSection,
}

# sections whose keys are environment parameters rather than schema fields
PARAMETER_SECTIONS = ("env", "mismatch")

_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")
_NONE = {"none", "null", ""}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}

ConfigValue = str | int | float | bool | list | tuple | None


def key_registry() -> dict[str, str]:
    """Every documented key with a short type description."""
    registry = {}
    for section, model in SECTIONS.items():
        for name, info in model.model_fields.items():
            if section == "env" and name == "params":
                continue
            registry[f"{section}.{name}"] = _describe(info.annotation)
    registry["env.<parameter>"] = "environment parameter of env.id"
    registry["mismatch.<parameter>"] = "environment parameter, solver model only"
    return dict(sorted(registry.items()))


def _describe(annotation) -> str:
    if typing.get_origin(annotation) is None and hasattr(annotation, "__name__"):
        return annotation.__name__
    return str(annotation).replace("typing.", "")


# ============================================
# Parsing
# ============================================

def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Flat ``{dotted key: raw value}`` from config text; later duplicates are errors."""
    values: dict[str, str] = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split(" #", 1)[0].strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            errors.append({"path": f"{source}:{lineno}", "message": "expected 'key = value'"})
            continue
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if not key or "." not in key:
            errors.append({"path": f"{source}:{lineno}", "message": f"key '{key}' needs a dotted section"})
        elif key in values:
            errors.append({"path": key, "message": f"duplicate key ({source}:{lineno})"})
        else:
            values[key] = raw
    if errors:
        raise ConfigValidationError(errors)
    return values


def load_config_file(path: Path | str) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigValidationError([{"path": "--config", "message": f"file not found: {path}"}])
    return parse_config_text(path.read_text(encoding="utf-8"), source=path.name)


def _is_list_field(model: type[BaseModel], name: str) -> bool:
    return typing.get_origin(model.model_fields[name].annotation) is list


def _split_list(raw: str) -> list[str]:
    items = []
    for item in (part.strip() for part in raw.split(",")):
        if not item:
            continue
        match = _RANGE.match(item)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            items.extend(str(k) for k in range(lo, hi + 1))
        else:
            items.append(item)
    return items


def _field_value(model: type[BaseModel], name: str, raw: ConfigValue) -> ConfigValue:
    """Shape a raw string for pydantic: lists split, 'none' for optional fields."""
    if not isinstance(raw, str):
        return raw
    if _is_list_field(model, name):
        return _split_list(raw)
    info = model.model_fields[name]
    if raw.strip().lower() in _NONE and not info.is_required() and info.default is None:
        return None
    return raw


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got '{raw}'")


def _parse_pads(raw: str) -> tuple[Pad, ...]:
    """``center:radius:t_min:t_max`` entries, comma separated."""
    pads = []
    for entry in (part.strip() for part in raw.split(",") if part.strip()):
        fields = entry.split(":")
        if len(fields) != 4:
            raise ValueError(f"pad '{entry}' must be center:radius:t_min:t_max")
        center, radius, t_min, t_max = (float(f) for f in fields)
        pads.append(Pad(center=center, radius=radius, window=(t_min, t_max)))
    if not pads:
        raise ValueError("at least one pad is required")
    return tuple(pads)


def _parameter_default(spec: dataclasses.Field):
    if spec.default is not dataclasses.MISSING:
        return spec.default
    return spec.default_factory()


def coerce_parameter(spec: dataclasses.Field, raw: ConfigValue):
    """Convert a raw value to the type of an environment dataclass field."""
    default = _parameter_default(spec)
    if isinstance(default, bool):
        return raw if isinstance(raw, bool) else _parse_bool(str(raw))
    if isinstance(default, int):
        value = float(raw)
        if not value.is_integer():
            raise ValueError(f"expected an integer, got '{raw}'")
        return int(value)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        if default and isinstance(default[0], Pad):
            return raw if not isinstance(raw, str) else _parse_pads(raw)
        items = raw if not isinstance(raw, str) else _split_list(raw)
        values = tuple(float(v) for v in items)
        if len(values) != len(default):
            raise ValueError(f"expected {len(default)} values, got {len(values)}")
        return values
    return raw


def _parameter_overrides(env_id: str, section: str, raw: Mapping[str, ConfigValue], errors: list) -> dict:
    try:
        specs = env_parameters(env_id)
    except ValueError:
        return {}
    overrides = {}
    for name, value in raw.items():
        path = f"{section}.{name}"
        spec = specs.get(name)
        if spec is None:
            errors.append({"path": path, "message": f"unknown parameter for environment {env_id}"})
            continue
        try:
            overrides[name] = coerce_parameter(spec, value)
        except (TypeError, ValueError) as e:
            errors.append({"path": path, "message": str(e)})
    return overrides


def _construction_errors(env_id: str, params: dict, mismatch: dict) -> list[dict]:
    """Build the environment and its mismatched model; report constructor rejections by path.

    A rejection is pinned on every parameter that fails on its own, or on
    all of the section's parameters when only the combination is invalid.
    """
    try:
        env = create_env(env_id, **params)
    except ValueError as e:
        return _blame(lambda **one: create_env(env_id, **one), "env", params, e)
    try:
        env.with_overrides(**mismatch)
    except ValueError as e:
        return _blame(env.with_overrides, "mismatch", mismatch, e)
    return []


def _blame(build, section: str, values: dict, error: ValueError) -> list[dict]:
    errors = []
    for name, value in values.items():
        try:
            build(**{name: value})
        except ValueError as e:
            errors.append({"path": f"{section}.{name}", "message": str(e)})
    errors = errors or [{"path": f"{section}.{name}", "message": str(error)} for name in values]
    return errors or [{"path": section, "message": str(error)}]


# ============================================
# Layering and validation
# ============================================

def merge_layers(layers: Iterable[Mapping[str, ConfigValue]]) -> dict[str, ConfigValue]:
    merged: dict[str, ConfigValue] = {}
    for layer in layers:
        merged.update(layer)
    return merged


def preset_layers(names: Iterable[str]) -> list[dict[str, ConfigValue]]:
    """``desk`` first, then each named preset in order."""
    layers = [dict(get_preset(PresetName.DESK.value)["values"])]
    for name in names:
        try:
            layers.append(dict(get_preset(name)["values"]))
        except ValueError as e:
            raise ConfigValidationError([{"path": "--preset", "message": str(e)}]) from None
    return layers


def build_config(flat: Mapping[str, ConfigValue]) -> ExperimentConfig:
    """Validate a merged flat mapping into an ExperimentConfig.

    Raises:
        ConfigValidationError: listing every offending dotted path
    """
    errors: list[dict] = []
    nested: dict[str, dict] = {section: {} for section in SECTIONS}
    parameters: dict[str, dict] = {section: {} for section in PARAMETER_SECTIONS}

    for key, raw in flat.items():
        section, _, name = key.partition(".")
        model = SECTIONS.get(section)
        if section == "env" and name not in ("id", "randomize"):
            parameters["env"][name] = raw
        elif section == "mismatch":
            parameters["mismatch"][name] = raw
        elif model is None or name not in model.model_fields or (section == "env" and name == "params"):
            errors.append({"path": key, "message": "unknown key"})
        else:
            nested[section][name] = _field_value(model, name, raw)

    env_id = str(nested["env"].get("id", EnvSection.model_fields["id"].default))
    if env_id not in env_ids():
        errors.append({"path": "env.id", "message": f"unknown environment '{env_id}'; choose from {env_ids()}"})
    solver_id = str(nested["solver"].get("id", SolverSection.model_fields["id"].default))
    if solver_id not in solver_ids():
        errors.append({"path": "solver.id", "message": f"unknown solver '{solver_id}'; choose from {solver_ids()}"})
    for index, label in enumerate(nested["compare"].get("solvers", [])):
        if label not in solver_ids() and not is_solver_variant(label):
            errors.append({"path": f"compare.solvers.{index}", "message": f"unknown solver or variant '{label}'"})

    nested["env"]["params"] = _parameter_overrides(env_id, "env", parameters["env"], errors)
    mismatch = _parameter_overrides(env_id, "mismatch", parameters["mismatch"], errors)

    node_count = nested["solver"].get("node_count")
    horizon = nested["budget"].get("horizon", BudgetSection.model_fields["horizon"].default)
    try:
        if node_count is not None and int(node_count) > int(horizon):
            errors.append({"path": "solver.node_count", "message": f"must not exceed budget.horizon ({horizon})"})
    except (TypeError, ValueError):
        pass  # reported by pydantic below

    payload = {section: values for section, values in nested.items() if values or section == "solver"}
    payload["mismatch"] = mismatch
    try:
        config = ExperimentConfig.model_validate(payload)
    except ValidationError as e:
        errors.extend(
            {"path": ".".join(str(part) for part in err["loc"]), "message": err["msg"]}
            for err in e.errors()
        )
        config = None

    if not errors:
        errors.extend(_construction_errors(env_id, config.env.params, dict(config.mismatch)))
    if errors:
        raise ConfigValidationError(errors)
    return config


def resolve_config(
    config_path: Path | str | None = None,
    presets: Iterable[str] = (),
    overrides: Mapping[str, ConfigValue] | None = None,
) -> ExperimentConfig:
    """desk preset, named presets, file, then overrides."""
    layers = preset_layers(presets)
    if config_path is not None:
        layers.append(load_config_file(config_path))
    if overrides:
        layers.append(dict(overrides))
    config = build_config(merge_layers(layers))
    logger.debug(f"Resolved config: env={config.env.id} solver={config.solver.id} seeds={len(config.experiment.seeds)}")
    return config


def with_solver_variant(config: ExperimentConfig, label: str) -> ExperimentConfig:
    """The config with ``label`` (a solver id or a solver-variant preset) selected."""
    if label in solver_ids():
        updates = {"id": label}
    elif is_solver_variant(label):
        updates = {key.split(".", 1)[1]: value for key, value in get_preset(label)["values"].items()}
    else:
        raise ConfigValidationError([{"path": "compare.solvers", "message": f"unknown solver or variant '{label}'"}])
    solver = SolverSection.model_validate({**config.solver.model_dump(), **updates})
    return config.model_copy(update={"solver": solver})

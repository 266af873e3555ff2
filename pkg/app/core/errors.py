"""
Exception hierarchy for the controller library and the benchmark harness.

Every error carries a structured ``detail`` dict with a stable ``code`` so the
CLI (and anything else embedding the library) can report failures without
parsing messages.
"""


class AnnealedMpcError(Exception):
    """Base class for all library errors."""

    code = "ANNEALED_MPC_ERROR"

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = {"code": self.code, "message": message, **detail}


class RolloutDivergenceError(AnnealedMpcError):
    """Raised when a rollout produces a non-finite state or cost."""

    code = "ROLLOUT_DIVERGED"

    def __init__(self, step_index: int, quantity: str = "state"):
        super().__init__(
            f"Non-finite {quantity} encountered at rollout step {step_index}",
            step_index=step_index,
            quantity=quantity,
        )
        self.step_index = step_index


class NoValidSampleError(AnnealedMpcError):
    """Raised when every sample in a batch has infinite cost."""

    code = "NO_VALID_SAMPLE"

    def __init__(self, sample_count: int):
        super().__init__(
            f"All {sample_count} sampled rollouts diverged; no finite cost to weight",
            sample_count=sample_count,
        )


class ScheduleIndexError(AnnealedMpcError, ValueError):
    """Raised when a stage or horizon index falls outside the schedule."""

    code = "SCHEDULE_INDEX_OUT_OF_RANGE"

    def __init__(self, name: str, value: float, lo: float, hi: float):
        super().__init__(
            f"{name}={value} outside [{lo}, {hi}]",
            name=name,
            value=value,
            lo=lo,
            hi=hi,
        )


class DimensionMismatchError(AnnealedMpcError, ValueError):
    """Raised when array shapes disagree with the model or with each other."""

    code = "DIMENSION_MISMATCH"

    def __init__(self, message: str, expected=None, actual=None):
        super().__init__(message, expected=expected, actual=actual)


class MissingStageError(AnnealedMpcError):
    """Raised when a contact score is requested with stage records missing."""

    code = "MISSING_STAGE"

    def __init__(self, missing: list[int]):
        super().__init__(f"No contact record for stage(s) {missing}", missing=missing)


class AmbiguousArgmaxError(AnnealedMpcError):
    """Raised when a density is flat, so its argmax carries no information."""

    code = "AMBIGUOUS_ARGMAX"

    def __init__(self, ties: list):
        super().__init__(
            f"Density argmax is ambiguous: {len(ties)} tied cells",
            ties=ties,
        )
        self.ties = ties


class ZeroMassError(AnnealedMpcError):
    """Raised when a density has no mass left to normalize."""

    code = "ZERO_MASS"

    def __init__(self, message: str = "Density has zero total mass"):
        super().__init__(message)


class ConfigValidationError(AnnealedMpcError):
    """Raised for malformed experiment configs; lists every offending field path."""

    code = "CONFIG_INVALID"

    def __init__(self, errors: list[dict]):
        summary = "; ".join(f"{e['path']}: {e['message']}" for e in errors)
        super().__init__(f"Invalid configuration: {summary}", errors=errors)
        self.errors = errors


class BudgetParityError(AnnealedMpcError):
    """Raised when compared solvers do not spend the same rollouts per control step."""

    code = "BUDGET_PARITY_VIOLATED"

    def __init__(self, budgets: dict[str, int]):
        listing = ", ".join(f"{name}={count}" for name, count in budgets.items())
        super().__init__(
            f"Solvers differ in rollouts per control step: {listing}",
            budgets=budgets,
        )
        self.budgets = budgets


class ParameterLeakError(AnnealedMpcError):
    """Raised when model-mismatch overrides changed the simulated (true) environment."""

    code = "PARAMETER_LEAK"

    def __init__(self, env_id: str, seed: int):
        super().__init__(
            f"True-model parameters of {env_id} changed during seed {seed}",
            env_id=env_id,
            seed=seed,
        )

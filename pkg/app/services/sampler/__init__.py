from app.services.sampler.sampling import (
    effective_sample_size,
    estimate_score,
    mppi_update,
    sample_perturbations,
    score_ascent_step,
    softmax_weights,
    weight_entropy,
)
from app.services.sampler.types import (
    NAMESPACE_EVOLUTION,
    NAMESPACE_INSTANCE,
    NAMESPACE_SAMPLING,
    PerturbationBatch,
    RngStream,
    SamplerParams,
)

__all__ = [
    "effective_sample_size",
    "estimate_score",
    "mppi_update",
    "sample_perturbations",
    "score_ascent_step",
    "softmax_weights",
    "weight_entropy",
    "NAMESPACE_EVOLUTION",
    "NAMESPACE_INSTANCE",
    "NAMESPACE_SAMPLING",
    "PerturbationBatch",
    "RngStream",
    "SamplerParams",
]

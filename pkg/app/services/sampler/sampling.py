"""
Gaussian perturbations, exponential weighting, and the two equivalent ways of
turning a weighted batch into a plan update:

    mppi_update:          U + sum_i w_i W_i
    score ascent:         U + Sigma * score,   score = Sigma^-1 sum_i w_i W_i

Sigma is diagonal and stored as per-entry standard deviations.
"""

import logging

import numpy as np

from app.core.errors import DimensionMismatchError, NoValidSampleError
from app.services.sampler.types import PerturbationBatch, RngStream, SamplerParams

logger = logging.getLogger(__name__)


def sample_perturbations(params: SamplerParams, sample_count: int, rng: RngStream) -> PerturbationBatch:
    """Draw N_W noise trajectories with entry (k, h, j) ~ N(0, sigma[h, j]^2).

    Sample k is the k-th contiguous block of the stream at ``rng``'s coordinates.
    """
    if sample_count < 1:
        raise ValueError(f"sample_count must be >= 1, got {sample_count}")
    rows, action_dim = params.sigma.shape
    standard = rng.generator().standard_normal((sample_count, rows, action_dim))
    return PerturbationBatch(noises=standard * params.sigma)


def softmax_weights(costs, temperature: float) -> np.ndarray:
    """Normalized exp(-J/lambda) with min-cost subtraction; +inf costs get weight 0."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    costs = np.asarray(costs, dtype=np.float64)
    finite = np.isfinite(costs)
    if not finite.any():
        raise NoValidSampleError(costs.size)

    best = costs[finite].min()
    weights = np.zeros_like(costs)
    with np.errstate(over="ignore", under="ignore"):
        weights[finite] = np.exp(-(costs[finite] - best) / temperature)
    return weights / weights.sum()


def weight_entropy(weights: np.ndarray) -> float:
    positive = weights[weights > 0]
    return float(-np.sum(positive * np.log(positive)))


def effective_sample_size(weights: np.ndarray) -> float:
    return float(1.0 / np.sum(weights**2))


def _weighted_noise(batch: PerturbationBatch, temperature: float) -> tuple[np.ndarray, np.ndarray]:
    if batch.costs is None:
        raise ValueError("PerturbationBatch has no costs; roll out U + noises first")
    weights = softmax_weights(batch.costs, temperature)
    return np.einsum("k,khj->hj", weights, batch.noises), weights


def mppi_update(U: np.ndarray, batch: PerturbationBatch, temperature: float) -> np.ndarray:
    """U+ = U + sum_i w_i W_i."""
    increment, _ = _weighted_noise(batch, temperature)
    _check_shape(U, increment)
    return U + increment


def estimate_score(batch: PerturbationBatch, temperature: float, sigma: np.ndarray) -> np.ndarray:
    """Monte-Carlo estimate of grad log p_1(U): Sigma^-1 sum_i w_i W_i."""
    increment, _ = _weighted_noise(batch, temperature)
    sigma = np.asarray(sigma, dtype=np.float64)
    _check_shape(sigma, increment)
    return increment / sigma**2


def score_ascent_step(U: np.ndarray, score: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """U+ = U + Sigma * score; the covariance is the step size, nothing else is added."""
    sigma = np.asarray(sigma, dtype=np.float64)
    _check_shape(U, score)
    _check_shape(U, sigma)
    return U + sigma**2 * score


def _check_shape(reference: np.ndarray, other: np.ndarray) -> None:
    if np.shape(reference) != np.shape(other):
        raise DimensionMismatchError(
            f"Shape {np.shape(other)} does not match plan shape {np.shape(reference)}",
            expected=list(np.shape(reference)),
            actual=list(np.shape(other)),
        )

import math

import numpy as np
import pytest

from app.core.errors import DimensionMismatchError, NoValidSampleError
from app.services.sampler import (
    PerturbationBatch,
    RngStream,
    SamplerParams,
    effective_sample_size,
    estimate_score,
    mppi_update,
    sample_perturbations,
    score_ascent_step,
    softmax_weights,
    weight_entropy,
)


# ============================================
# Weights
# ============================================

def test_softmax_weights_normalized_and_inf_zero():
    weights = softmax_weights([3.0, np.inf, 1.0, 2.0], temperature=0.5)

    assert weights.sum() == pytest.approx(1.0)
    assert weights[1] == 0.0
    assert np.argmax(weights) == 2


def test_softmax_weights_small_temperature_selects_best():
    weights = softmax_weights([3.0, 1.0, 2.0], temperature=1e-6)

    assert weights == pytest.approx([0.0, 1.0, 0.0])


def test_softmax_weights_all_infinite():
    with pytest.raises(NoValidSampleError):
        softmax_weights([np.inf, np.inf], temperature=1.0)


def test_softmax_weights_large_costs_do_not_overflow():
    weights = softmax_weights([1e6, 1e6 + 1.0], temperature=1.0)

    assert np.all(np.isfinite(weights))
    assert weights[0] > weights[1]


def test_uniform_weight_diagnostics():
    weights = np.full(8, 1 / 8)

    assert effective_sample_size(weights) == pytest.approx(8.0)
    assert weight_entropy(weights) == pytest.approx(math.log(8))


# ============================================
# Sampling
# ============================================

def test_sample_perturbations_reproducible():
    params = SamplerParams(temperature=1.0, sigma=np.full((4, 2), 0.3))
    stream = RngStream(seed=11, step=3, stage=2)

    first = sample_perturbations(params, 32, stream)
    second = sample_perturbations(params, 32, stream)
    other_stage = sample_perturbations(params, 32, stream.at(stage=1))

    assert first.noises.shape == (32, 4, 2)
    assert np.array_equal(first.noises, second.noises)
    assert not np.array_equal(first.noises, other_stage.noises)


def test_sample_k_does_not_depend_on_batch_size():
    params = SamplerParams(temperature=1.0, sigma=np.ones((3, 1)))
    stream = RngStream(seed=5)

    small = sample_perturbations(params, 10, stream)
    large = sample_perturbations(params, 20, stream)

    assert np.array_equal(small.noises, large.noises[:10])


def test_sample_perturbations_scale_by_sigma():
    sigma = np.array([[0.5, 2.0]])
    batch = sample_perturbations(SamplerParams(1.0, sigma), 20000, RngStream(seed=0))

    assert batch.noises.std(axis=0) == pytest.approx(sigma, rel=0.03)


def test_sample_mean_converges_to_zero():
    sigma = np.array([[0.1, 1.0], [0.5, 2.0], [3.0, 0.25]])
    samples = 100_000
    batch = sample_perturbations(SamplerParams(1.0, sigma), samples, RngStream(seed=9, step=1))

    standard_error = sigma / math.sqrt(samples)
    assert np.all(np.abs(batch.noises.mean(axis=0)) <= 4 * standard_error)


def test_sampler_params_reject_bad_sigma():
    with pytest.raises(ValueError):
        SamplerParams(temperature=1.0, sigma=np.array([[0.1, 0.0]]))
    with pytest.raises(DimensionMismatchError):
        SamplerParams(temperature=1.0, sigma=np.ones(3))


def test_batch_rejects_nan_costs():
    batch = PerturbationBatch(noises=np.zeros((2, 1, 1)))

    with pytest.raises(ValueError):
        batch.with_costs([1.0, np.nan])
    with pytest.raises(DimensionMismatchError):
        batch.with_costs([1.0, 2.0, 3.0])


# ============================================
# MPPI update == score ascent
# ============================================

def test_mppi_update_equals_score_ascent_on_random_instances():
    rng = np.random.default_rng(2024)
    instances = 0
    worst = 0.0
    for action_dim in (1, 2, 4):
        for horizon in (1, 5, 20):
            for _ in range(112):
                rows = horizon + 1
                samples = int(rng.integers(1, 64))
                U = rng.normal(size=(rows, action_dim))
                sigma = rng.uniform(0.05, 3.0, size=(rows, action_dim))
                noises = rng.normal(size=(samples, rows, action_dim)) * sigma
                costs = rng.exponential(5.0, size=samples)
                costs[rng.random(samples) < 0.1] = np.inf
                costs[0] = 1.0
                batch = PerturbationBatch(noises=noises, costs=costs)
                temperature = float(rng.uniform(0.01, 10.0))

                direct = mppi_update(U, batch, temperature)
                via_score = score_ascent_step(U, estimate_score(batch, temperature, sigma), sigma)

                scale = max(1.0, float(np.max(np.abs(direct))))
                worst = max(worst, float(np.max(np.abs(direct - via_score))) / scale)
                instances += 1

    assert instances >= 1000
    assert worst <= 1e-12


def test_estimate_score_shape_mismatch():
    batch = PerturbationBatch(noises=np.zeros((3, 2, 1)), costs=[1.0, 2.0, 3.0])

    with pytest.raises(DimensionMismatchError):
        estimate_score(batch, 1.0, np.ones((3, 1)))


def test_mppi_update_requires_costs():
    batch = PerturbationBatch(noises=np.zeros((3, 2, 1)))

    with pytest.raises(ValueError):
        mppi_update(np.zeros((2, 1)), batch, 1.0)


# ============================================
# Score estimator convergence (1-D quadratic)
# ============================================

# J(u) = u^2 / 2 at lambda = 1 gives p_0 = N(0, 1); the sigma-convolved density
# is N(0, 1 + sigma^2), whose score is -u / (1 + sigma^2).
SIGMA = 1.0
POINTS = np.linspace(-2.0, 2.0, 20)


def _mc_score(u: float, samples: int, seed: int, point: int) -> tuple[float, float]:
    """Monte-Carlo score at u and its delta-method standard error."""
    sigma = np.array([[SIGMA]])
    batch = sample_perturbations(SamplerParams(1.0, sigma), samples, RngStream(seed=seed, step=point))
    noises = batch.noises[:, 0, 0]
    batch.with_costs(0.5 * (u + noises) ** 2)

    score = float(estimate_score(batch, 1.0, sigma)[0, 0])
    weights = softmax_weights(batch.costs, 1.0)
    mean = float(np.sum(weights * noises))
    stderr = math.sqrt(float(np.sum(weights**2 * (noises - mean) ** 2))) / SIGMA**2
    return score, stderr


def test_score_estimate_within_standard_errors():
    analytic = -POINTS / (1 + SIGMA**2)
    z = []
    for k, u in enumerate(POINTS):
        score, stderr = _mc_score(float(u), 100_000, seed=0, point=k)
        z.append(abs(score - analytic[k]) / stderr)
    z = np.array(z)

    assert np.all(z <= 3.0)


def test_score_error_decays_like_inverse_sqrt_samples():
    analytic = -POINTS / (1 + SIGMA**2)
    sizes = [100, 1_000, 10_000, 100_000]
    rms = []
    for n in sizes:
        errors = [
            _mc_score(float(u), n, seed=seed, point=k)[0] - analytic[k]
            for seed in range(5)
            for k, u in enumerate(POINTS)
        ]
        rms.append(math.sqrt(np.mean(np.square(errors))))

    slope = np.polyfit(np.log(sizes), np.log(rms), 1)[0]

    assert -0.7 <= slope <= -0.3

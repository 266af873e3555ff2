import math

import numpy as np
import pytest

from app.core.errors import AmbiguousArgmaxError, DimensionMismatchError, ZeroMassError
from app.domain.schemas import LandscapeSection
from app.services.envs import wall_jump_cost
from app.services.landscape import (
    GridDensity,
    anneal_on_landscape,
    argmax_with_ties,
    build_landscape_report,
    convolve_density,
    count_local_maxima,
    grid_oracle,
    landscape_cost,
    make_axes,
    optimum_drift,
    score_on_grid,
    target_density,
    write_landscape_report,
)
from app.services.sampler import RngStream, SamplerParams, estimate_score, sample_perturbations, softmax_weights


def half_square(points):
    return 0.5 * np.sum(np.asarray(points) ** 2, axis=-1)


def gaussian(u, variance):
    return np.exp(-(u**2) / (2 * variance)) / math.sqrt(2 * math.pi * variance)


# ============================================
# Densities
# ============================================

def test_target_density_is_normalized():
    axes = (np.linspace(-8.0, 8.0, 801),)

    p = target_density(half_square, axes, temperature=1.0)

    assert p.mass() == pytest.approx(1.0, abs=1e-9)
    assert abs(float(p.mean()[0])) < p.spacing[0]
    np.testing.assert_allclose(p.values, gaussian(axes[0], 1.0), atol=1e-9)


def test_small_temperature_concentrates_on_minimizer():
    axes = (np.linspace(-1.0, 1.0, 201),)

    p = target_density(lambda u: (u[:, 0] - 0.3) ** 2, axes, temperature=1e-5)

    index, _ = argmax_with_ties(p)
    assert p.location(index)[0] == pytest.approx(0.3)
    assert p.values[index] * p.cell_volume > 0.99


def test_zero_mass():
    axes = (np.linspace(0.0, 1.0, 11),)

    with pytest.raises(ZeroMassError):
        target_density(lambda u: np.full(u.shape[0], np.inf), axes, temperature=1.0)
    with pytest.raises(ZeroMassError):
        GridDensity(axes, np.zeros(11)).normalized()


def test_grid_density_validation():
    axes = (np.linspace(0.0, 1.0, 11),)

    with pytest.raises(DimensionMismatchError):
        GridDensity(axes, np.ones(10))
    with pytest.raises(ValueError):
        GridDensity(axes, -np.ones(11))
    with pytest.raises(ValueError):
        make_axes([(0.0, 1.0)], 1)


# ============================================
# Convolution
# ============================================

def test_zero_width_convolution_is_identity():
    p = target_density(half_square, (np.linspace(-3.0, 3.0, 61),), temperature=1.0)

    assert np.array_equal(convolve_density(p, 0.0).values, p.values)


def test_convolution_matches_gaussian_closed_form():
    axes = (np.linspace(-10.0, 10.0, 4001),)
    p = target_density(half_square, axes, temperature=1.0)

    smoothed = convolve_density(p, 0.5)

    np.testing.assert_allclose(smoothed.values, gaussian(axes[0], 1.25), atol=1e-6)


def test_convolution_composes():
    p = target_density(half_square, (np.linspace(-10.0, 10.0, 4001),), temperature=1.0)

    twice = convolve_density(convolve_density(p, 0.3), 0.4)
    once = convolve_density(p, 0.5)

    np.testing.assert_allclose(twice.values, once.values, atol=1e-6)


def test_convolution_rejects_negative_width():
    p = target_density(half_square, (np.linspace(-1.0, 1.0, 21),), temperature=1.0)

    with pytest.raises(ValueError):
        convolve_density(p, -0.1)


# ============================================
# Drift, maxima, argmax
# ============================================

def test_symmetric_density_does_not_drift():
    p = target_density(half_square, (np.linspace(-5.0, 5.0, 1001),), temperature=1.0)

    drift = optimum_drift(p, [0.0, 0.5, 1.0, 2.0])

    assert all(abs(point.location[0]) < p.spacing[0] for point in drift)
    assert all(point.gap < p.spacing[0] for point in drift)


def test_flat_density_has_no_argmax():
    p = GridDensity((np.linspace(0.0, 1.0, 11),), np.ones(11))

    with pytest.raises(AmbiguousArgmaxError):
        argmax_with_ties(p)


def test_argmax_ties_take_lowest_coordinate():
    p = GridDensity((np.linspace(0.0, 1.0, 5),), np.array([0.0, 2.0, 1.0, 2.0, 0.0]))

    index, ties = argmax_with_ties(p)

    assert index == (1,)
    assert ties == [(1,), (3,)]


def test_local_maxima_plateaus_count_once():
    axes = (np.linspace(0.0, 1.0, 9),)

    assert count_local_maxima(GridDensity(axes, np.array([0, 1, 1, 1, 0, 2, 0, 0, 0.0]))) == 2
    assert count_local_maxima(GridDensity(axes, np.array([0, 1, 2, 3, 4, 3, 2, 1, 0.0]))) == 1


# ============================================
# Scores
# ============================================

def test_score_of_standard_normal():
    axes = (np.linspace(-4.0, 4.0, 801),)
    p = target_density(half_square, axes, temperature=1.0)
    h = p.spacing[0]

    score = score_on_grid(p)

    assert score.shape == (801, 1)
    assert np.isnan(score[0, 0]) and np.isnan(score[-1, 0])
    assert np.nanmax(np.abs(score[:, 0] + axes[0])) < h**2


def test_score_of_uniform_density_is_zero():
    p = GridDensity((np.linspace(0.0, 1.0, 11),), np.ones(11)).normalized()

    score = score_on_grid(p)

    assert np.all(score[1:-1] == 0.0)


def test_score_masks_zero_density_cells(caplog):
    values = np.ones(11)
    values[5] = 0.0
    p = GridDensity((np.linspace(0.0, 1.0, 11),), values)

    with caplog.at_level("WARNING"):
        score = score_on_grid(p)

    assert np.isnan(score[4:7, 0]).all()
    assert np.isfinite(score[1:3, 0]).all()
    assert "masked" in caplog.text


def test_score_2d_shape():
    axes = (np.linspace(-1.0, 1.0, 21), np.linspace(-2.0, 2.0, 31))
    p = target_density(half_square, axes, temperature=1.0)

    score = score_on_grid(p)

    assert score.shape == (21, 31, 2)
    assert np.isnan(score[0]).all()
    assert np.isfinite(score[1:-1, 1:-1]).all()


def test_smoothed_score_matches_closed_form():
    axes = (np.linspace(-10.0, 10.0, 2001),)
    p = convolve_density(target_density(half_square, axes, temperature=1.0), 0.7)

    score = score_on_grid(p)[:, 0]

    interior = np.abs(axes[0]) <= 3.0
    np.testing.assert_allclose(score[interior], -axes[0][interior] / (1 + 0.7**2), atol=1e-3)


def test_sampled_score_matches_grid_score():
    sigma = np.array([[1.0]])
    axes = (np.linspace(-10.0, 10.0, 2001),)
    grid = score_on_grid(convolve_density(target_density(half_square, axes, temperature=1.0), 1.0))[:, 0]

    for k, u in enumerate(np.linspace(-2.0, 2.0, 20)):
        batch = sample_perturbations(SamplerParams(1.0, sigma), 100_000, RngStream(seed=0, step=k))
        noises = batch.noises[:, 0, 0]
        batch.with_costs(0.5 * (u + noises) ** 2)

        sampled = float(estimate_score(batch, 1.0, sigma)[0, 0])
        weights = softmax_weights(batch.costs, 1.0)
        spread = noises - np.sum(weights * noises)
        stderr = math.sqrt(float(np.sum(weights**2 * spread**2)))

        assert abs(sampled - np.interp(u, axes[0], grid)) <= 4 * stderr + 1e-3


# ============================================
# Wall-jump landscape
# ============================================

WALL_JUMP_AXES = make_axes([(-3.0, 5.2)], 2048)
WALL_JUMP_SIGMAS = [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 1.5]


@pytest.fixture(scope="module")
def wall_jump_p0():
    return target_density(landscape_cost(1), WALL_JUMP_AXES, temperature=1.0)


def test_wall_jump_optimum_drifts_out_of_the_narrow_basin(wall_jump_p0):
    drift = {point.sigma: point for point in optimum_drift(wall_jump_p0, WALL_JUMP_SIGMAS)}

    assert drift[0.0].gap == 0.0
    assert 4.2 <= drift[0.0].location[0] <= 4.6
    # still on the far side of the wall
    assert drift[0.4].location[0] > 3.45
    # moved back to the no-jump basin
    assert drift[1.5].gap > 1.5
    assert drift[1.5].location[0] < 2.45


def test_wall_jump_drift_gap_grows_along_the_default_kernels(wall_jump_p0):
    sigmas = sorted(LandscapeSection().sigmas)

    gaps = [point.gap for point in optimum_drift(wall_jump_p0, sigmas)]

    assert all(later >= earlier for earlier, later in zip(gaps, gaps[1:]))


def test_wall_jump_smoothing_merges_maxima(wall_jump_p0):
    counts = [count_local_maxima(convolve_density(wall_jump_p0, s)) for s in WALL_JUMP_SIGMAS]

    assert counts[0] == 2
    assert all(later <= earlier for earlier, later in zip(counts, counts[1:]))


def test_wall_jump_oracle():
    oracle = grid_oracle(landscape_cost(1), WALL_JUMP_AXES)

    assert 4.3 <= oracle.global_location[0] <= 4.5
    assert oracle.global_cost == pytest.approx(0.39, abs=0.02)
    assert len(oracle.minima) == 2
    assert 5.5 <= oracle.barrier <= 6.2
    assert oracle.barrier_height > 4.0


def test_exploit_kernel_stays_in_the_wide_basin():
    run = anneal_on_landscape(
        landscape_cost(1), [0.0], mode="mppi", sigma_base=0.05, bounds=[(-3.0, 5.2)], rounds=5
    )

    assert run.path.shape == (5 * 4 + 1, 1)
    assert run.final_cost > 0.9
    assert run.label == "mppi"


def test_landscape_run_rejects_unknown_mode():
    with pytest.raises(ValueError):
        anneal_on_landscape(half_square, [0.0], mode="random")


def test_landscape_report_writes_tables(tmp_path):
    report = build_landscape_report(LandscapeSection(resolution=512, rounds=2))

    write_landscape_report(report, tmp_path, plots=False)

    assert [run.label for run in report.runs] == ["mppi-explore", "mppi-exploit", "dial"]
    assert set(report.densities) == set(WALL_JUMP_SIGMAS)
    for name in ("density.csv", "drift.csv", "oracle.csv", "runs.csv"):
        assert (tmp_path / name).exists()
    assert not (tmp_path / "density.svg").exists()
    lines = (tmp_path / "runs.csv").read_text().splitlines()
    # schema comment, header, 3 samplers x (2 rounds x 4 stages + start)
    assert len(lines) == 2 + 3 * 9


def test_landscape_report_2d_default_resolution_is_capped():
    report = build_landscape_report(LandscapeSection(dims=2, rounds=1, sigmas=[0.0, 0.3], samples=32))

    assert report.costs.shape == (256, 256)
    assert report.runs[0].path.shape == (5, 2)
    assert np.all(np.isfinite(report.costs))
    # a second control can only lower the best cost found in 1-D
    assert report.oracle.global_cost < wall_jump_cost(np.array([[4.41, 2.0]]))[0]

"""
Landscape artifacts for the bundled wall-jump cost.

Builds the target density, its convolutions along the kernel sequence, the
optimum drift, the local-maxima counts and the grid oracle, and runs the
explore/exploit/annealed samplers on the same landscape. On the default 1-D
landscape the density argmax stays in the narrow goal basin up to sigma = 0.4
and has moved to the wide no-jump basin at sigma = 1.5.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from app.core.config import get_settings
from app.domain.schemas import LandscapeSection
from app.services.artifacts import plt, save_svg, write_csv
from app.services.envs import wall_jump_cost
from app.services.landscape.density import (
    CostFn,
    DriftPoint,
    GridDensity,
    OracleResult,
    convolve_density,
    count_local_maxima,
    evaluate_on_grid,
    grid_oracle,
    make_axes,
    optimum_drift,
    score_on_grid,
    target_density,
)
from app.services.landscape.search import LandscapeRun, anneal_on_landscape

logger = logging.getLogger(__name__)

# 2-D grids default to this many cells per axis unless landscape.resolution is set
MAX_DEFAULT_RESOLUTION_2D = 256


@dataclass
class LandscapeReport:
    axes: tuple[np.ndarray, ...]
    costs: np.ndarray
    densities: dict[float, GridDensity]  # sigma -> p_sigma, sigma = 0 is p_0
    drift: list[DriftPoint]
    maxima: dict[float, int]
    oracle: OracleResult
    runs: list[LandscapeRun]

    @property
    def ndim(self) -> int:
        return len(self.axes)


def landscape_cost(dims: int) -> CostFn:
    """Wall-jump cost over (launch speed) or (launch speed, forward speed)."""
    def cost(points: np.ndarray) -> np.ndarray:
        return wall_jump_cost(np.asarray(points)[:, :dims])
    return cost


def grid_resolution(section: LandscapeSection) -> int:
    if section.resolution is not None:
        return section.resolution
    resolution = get_settings().landscape_resolution
    return resolution if section.dims == 1 else min(resolution, MAX_DEFAULT_RESOLUTION_2D)


def build_landscape_report(section: LandscapeSection, seed: int = 0) -> LandscapeReport:
    dims = section.dims
    bounds = list(zip(section.lower[:dims], section.upper[:dims]))
    axes = make_axes(bounds, grid_resolution(section))
    cost_fn = landscape_cost(dims)

    p0 = target_density(cost_fn, axes, section.temperature)
    sigmas = sorted(set(section.sigmas))
    densities = {sigma: convolve_density(p0, sigma) for sigma in sigmas}
    maxima = {sigma: count_local_maxima(p) for sigma, p in densities.items()}
    drift = optimum_drift(p0, sigmas)
    oracle = grid_oracle(cost_fn, axes)
    logger.info(
        f"Landscape {dims}-D: {len(oracle.minima)} local minima, global cost {oracle.global_cost:.4g}, "
        f"barrier height {oracle.barrier_height}"
    )

    start = section.start[:dims]
    common = dict(
        iterations=section.iterations,
        rounds=section.rounds,
        samples=section.samples,
        temperature=section.sampler_temperature,
        seed=seed,
        bounds=bounds,
        oracle=oracle,
    )
    runs = [
        anneal_on_landscape(cost_fn, start, mode="mppi", sigma_base=section.explore_sigma, label="mppi-explore", **common),
        anneal_on_landscape(cost_fn, start, mode="mppi", sigma_base=section.exploit_sigma, label="mppi-exploit", **common),
        anneal_on_landscape(cost_fn, start, mode="dial", sigma_base=section.explore_sigma, label="dial", **common),
    ]
    for run in runs:
        logger.info(f"[{run.label}] final {run.final.round(4).tolist()} cost {run.final_cost:.4g} gap {run.oracle_gap:.4g}")

    return LandscapeReport(
        axes=axes,
        costs=evaluate_on_grid(cost_fn, axes),
        densities=densities,
        drift=drift,
        maxima=maxima,
        oracle=oracle,
        runs=runs,
    )


# ============================================
# Artifacts
# ============================================

def _coordinate_names(ndim: int) -> list[str]:
    return ["u"] if ndim == 1 else [f"u{k}" for k in range(ndim)]


def write_density_csv(report: LandscapeReport, path: Path) -> None:
    names = _coordinate_names(report.ndim)
    sigmas = list(report.densities)
    header = list(names) + ["cost"]
    for sigma in sigmas:
        header.append(f"p_sigma={sigma}")
        header.extend(f"score_{name}_sigma={sigma}" for name in names)

    points = np.stack(np.meshgrid(*report.axes, indexing="ij"), axis=-1).reshape(-1, report.ndim)
    columns = [points, report.costs.reshape(-1, 1)]
    for sigma in sigmas:
        p = report.densities[sigma]
        columns.append(p.values.reshape(-1, 1))
        columns.append(score_on_grid(p).reshape(-1, report.ndim))
    table = np.hstack(columns)
    write_csv(path, header, (row.tolist() for row in table))


def write_drift_csv(report: LandscapeReport, path: Path) -> None:
    names = _coordinate_names(report.ndim)
    write_csv(
        path,
        ["sigma", *names, "gap", "tied_cells", "local_maxima"],
        (
            [d.sigma, *d.location.tolist(), d.gap, len(d.ties), report.maxima[d.sigma]]
            for d in report.drift
        ),
    )


def write_oracle_csv(report: LandscapeReport, path: Path) -> None:
    names = _coordinate_names(report.ndim)
    oracle = report.oracle
    rows = [["global", 0, *oracle.global_location.tolist(), oracle.global_cost]]
    rows += [["minimum", rank, *location.tolist(), cost] for rank, (location, cost) in enumerate(oracle.minima)]
    if oracle.barrier is not None:
        rows.append(["barrier", 0, *([None] * report.ndim), oracle.barrier])
        rows.append(["barrier_height", 0, *([None] * report.ndim), oracle.barrier_height])
    write_csv(path, ["kind", "rank", *names, "cost"], rows)


def write_runs_csv(report: LandscapeReport, path: Path) -> None:
    names = _coordinate_names(report.ndim)
    write_csv(
        path,
        ["sampler", "update", *names, "cost"],
        (
            [run.label, k, *point.tolist(), float(cost)]
            for run in report.runs
            for k, (point, cost) in enumerate(zip(run.path, run.costs))
        ),
    )


def plot_densities(report: LandscapeReport, path: Path) -> None:
    sigmas = list(report.densities)
    if report.ndim == 1:
        fig, ax = plt.subplots(figsize=(7, 4))
        for sigma in sigmas:
            ax.plot(report.axes[0], report.densities[sigma].values, label=f"sigma={sigma}")
        ax.set_xlabel("u")
        ax.set_ylabel("density")
        ax.legend(fontsize="small")
    else:
        fig, axes = plt.subplots(1, len(sigmas), figsize=(3 * len(sigmas), 3), squeeze=False)
        extent = [report.axes[0][0], report.axes[0][-1], report.axes[1][0], report.axes[1][-1]]
        for ax, sigma in zip(axes[0], sigmas):
            ax.imshow(report.densities[sigma].values.T, origin="lower", extent=extent, aspect="auto")
            ax.set_title(f"sigma={sigma}", fontsize="small")
    save_svg(fig, path)


def plot_runs(report: LandscapeReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    if report.ndim == 1:
        ax.plot(report.axes[0], report.costs, color="0.5", label="cost")
        for run in report.runs:
            ax.plot(run.path[:, 0], run.costs, marker=".", label=run.label)
        ax.axvline(report.oracle.global_location[0], color="k", linestyle="--", label="oracle")
        ax.set_xlabel("u")
        ax.set_ylabel("cost")
    else:
        ax.contour(report.axes[0], report.axes[1], report.costs.T, levels=20, colors="0.6")
        for run in report.runs:
            ax.plot(run.path[:, 0], run.path[:, 1], marker=".", label=run.label)
        ax.plot(*report.oracle.global_location, "k*", markersize=10, label="oracle")
        ax.set_xlabel("u0")
        ax.set_ylabel("u1")
    ax.legend(fontsize="small")
    save_svg(fig, path)


def write_landscape_report(report: LandscapeReport, out_dir: Path, plots: bool = True) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_density_csv(report, out_dir / "density.csv")
    write_drift_csv(report, out_dir / "drift.csv")
    write_oracle_csv(report, out_dir / "oracle.csv")
    write_runs_csv(report, out_dir / "runs.csv")
    if plots:
        plot_densities(report, out_dir / "density.svg")
        plot_runs(report, out_dir / "runs.svg")

"""
Grid densities over 1-D/2-D control spaces.

The grid is the ground truth here: p_0 is exp(-J/lambda) evaluated on cell
centres, p_sigma its zero-padded Gaussian convolution, and scores are finite
differences of log p. Everything stays normalized so that
sum(values) * cell_volume == 1.
"""

import logging
import math
from dataclasses import dataclass, field
from collections.abc import Callable, Sequence

import numpy as np
from scipy import ndimage

from app.core.errors import AmbiguousArgmaxError, DimensionMismatchError, ZeroMassError

logger = logging.getLogger(__name__)

CostFn = Callable[[np.ndarray], np.ndarray]

# Gaussian kernels are cut at this many standard deviations
KERNEL_TRUNCATE = 8.0


@dataclass
class GridDensity:
    """Nonnegative values on a regular grid with one axis per control dimension."""
    axes: tuple[np.ndarray, ...]
    values: np.ndarray

    def __post_init__(self):
        self.axes = tuple(np.asarray(a, dtype=np.float64) for a in self.axes)
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.axes) not in (1, 2):
            raise DimensionMismatchError(f"Grid densities are 1-D or 2-D, got {len(self.axes)} axes")
        expected = tuple(a.size for a in self.axes)
        if self.values.shape != expected:
            raise DimensionMismatchError(
                f"values shape {self.values.shape} does not match axes {expected}",
                expected=list(expected),
                actual=list(self.values.shape),
            )
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("density values must be finite and nonnegative")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(float(a[1] - a[0]) for a in self.axes)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def normalized(self) -> "GridDensity":
        mass = self.mass()
        if not mass > 0:
            raise ZeroMassError()
        return GridDensity(self.axes, self.values / mass)

    def points(self) -> np.ndarray:
        """Cell coordinates, shape (*grid_shape, ndim)."""
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def location(self, index: tuple[int, ...]) -> np.ndarray:
        return np.array([axis[i] for axis, i in zip(self.axes, index)])

    def mean(self) -> np.ndarray:
        weights = self.values / self.values.sum()
        return np.tensordot(weights, self.points(), axes=self.ndim)


@dataclass
class DriftPoint:
    sigma: float
    location: np.ndarray
    gap: float  # distance to the sigma = 0 argmax
    ties: list[tuple[int, ...]] = field(default_factory=list)


@dataclass
class OracleResult:
    """Exhaustive grid search over a cost landscape."""
    global_location: np.ndarray
    global_cost: float
    minima: list[tuple[np.ndarray, float]]  # strict local minima, best first
    barrier: float | None  # saddle cost between the two best minima
    barrier_height: float | None  # saddle minus the worse of the two minima


def make_axes(bounds: Sequence[tuple[float, float]], resolution: int) -> tuple[np.ndarray, ...]:
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    return tuple(np.linspace(lo, hi, resolution) for lo, hi in bounds)


def evaluate_on_grid(cost_fn: CostFn, axes: tuple[np.ndarray, ...]) -> np.ndarray:
    points = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    flat = points.reshape(-1, len(axes))
    return np.asarray(cost_fn(flat), dtype=np.float64).reshape(points.shape[:-1])


def target_density(cost_fn: CostFn, axes: tuple[np.ndarray, ...], temperature: float) -> GridDensity:
    """p_0 proportional to exp(-J / lambda), stabilized by subtracting min J."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    costs = evaluate_on_grid(cost_fn, axes)
    finite = np.isfinite(costs)
    if not finite.any():
        raise ZeroMassError("Cost is infinite on every grid cell")
    values = np.zeros_like(costs)
    with np.errstate(under="ignore"):
        values[finite] = np.exp(-(costs[finite] - costs[finite].min()) / temperature)
    return GridDensity(axes, values).normalized()


def convolve_density(p: GridDensity, sigma: float) -> GridDensity:
    """Discrete Gaussian convolution with zero padding, renormalized."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return GridDensity(p.axes, p.values.copy())
    cells = [sigma / step for step in p.spacing]
    truncate = min(KERNEL_TRUNCATE, max(n / s for n, s in zip(p.values.shape, cells)))
    smoothed = ndimage.gaussian_filter(p.values, sigma=cells, mode="constant", cval=0.0, truncate=truncate)
    return GridDensity(p.axes, np.maximum(smoothed, 0.0)).normalized()


def argmax_with_ties(p: GridDensity) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    """Index of the maximum (lowest coordinate on ties) and every tied index.

    A flat density has no informative argmax and raises AmbiguousArgmaxError.
    """
    peak = p.values.max()
    tied = [tuple(int(i) for i in idx) for idx in np.argwhere(p.values == peak)]
    if len(tied) == p.values.size:
        raise AmbiguousArgmaxError(tied[:10] + (["..."] if len(tied) > 10 else []))
    if len(tied) > 1:
        logger.info(f"argmax tie across {len(tied)} cells; taking the lowest coordinate")
    return tied[0], tied


def optimum_drift(p0: GridDensity, sigmas: Sequence[float]) -> list[DriftPoint]:
    """Argmax of each p_sigma and its distance to the argmax of p_0."""
    origin_index, _ = argmax_with_ties(p0)
    origin = p0.location(origin_index)
    drift = []
    for sigma in sigmas:
        index, ties = argmax_with_ties(convolve_density(p0, sigma))
        location = p0.location(index)
        drift.append(
            DriftPoint(
                sigma=float(sigma),
                location=location,
                gap=float(np.linalg.norm(location - origin)),
                ties=ties if len(ties) > 1 else [],
            )
        )
    return drift


def score_on_grid(p: GridDensity) -> np.ndarray:
    """grad log p by central differences, shape (*grid_shape, ndim).

    Boundary cells and cells touching zero density are NaN.
    """
    with np.errstate(divide="ignore"):
        log_p = np.log(p.values)
    with np.errstate(invalid="ignore"):
        grads = np.gradient(log_p, *p.axes)
    if p.ndim == 1:
        grads = [grads]
    score = np.stack(grads, axis=-1)

    interior = np.zeros(p.values.shape, dtype=bool)
    interior[tuple(slice(1, -1) for _ in range(p.ndim))] = True
    bad = ~np.all(np.isfinite(score), axis=-1) | (p.values == 0)
    masked = int(np.sum(bad & interior))
    if masked:
        logger.warning(f"score_on_grid: masked {masked} interior cells with zero density nearby")
    score[bad | ~interior] = np.nan
    return score


def _plateau_peaks(values: np.ndarray) -> list[tuple[int, ...]]:
    """One representative index per local maximum; plateaus count once."""
    footprint = ndimage.generate_binary_structure(values.ndim, values.ndim)
    neighbourhood = ndimage.maximum_filter(values, footprint=footprint, mode="constant", cval=-np.inf)
    labels, _ = ndimage.label(values >= neighbourhood, structure=footprint)

    peaks = []
    for label, region_slice in enumerate(ndimage.find_objects(labels), start=1):
        if region_slice is None:
            continue
        window = tuple(
            slice(max(s.start - 1, 0), min(s.stop + 1, n)) for s, n in zip(region_slice, values.shape)
        )
        region = labels[window] == label
        ring = ndimage.binary_dilation(region, structure=footprint) & ~region
        level = values[window][region][0]
        if np.all(values[window][ring] < level):
            offset = np.argwhere(region)[0]
            peaks.append(tuple(int(o + s.start) for o, s in zip(offset, window)))
    return sorted(peaks)


def count_local_maxima(p: GridDensity) -> int:
    return len(_plateau_peaks(p.values))


def grid_oracle(cost_fn: CostFn, axes: tuple[np.ndarray, ...]) -> OracleResult:
    """Global minimiser, all strict local minima and the barrier between the two best."""
    costs = evaluate_on_grid(cost_fn, axes)
    costs = np.where(np.isfinite(costs), costs, np.inf)

    def at(index):
        return np.array([axis[i] for axis, i in zip(axes, index)])

    minima_idx = sorted(_plateau_peaks(-costs), key=lambda idx: (costs[idx], idx))
    minima = [(at(idx), float(costs[idx])) for idx in minima_idx]
    global_idx = np.unravel_index(int(np.argmin(costs)), costs.shape)

    barrier = barrier_height = None
    if len(minima_idx) >= 2:
        barrier = _saddle(costs, minima_idx[0], minima_idx[1])
        barrier_height = barrier - max(costs[minima_idx[0]], costs[minima_idx[1]])

    return OracleResult(
        global_location=at(global_idx),
        global_cost=float(costs[global_idx]),
        minima=minima,
        barrier=barrier,
        barrier_height=barrier_height,
    )


def _saddle(costs: np.ndarray, a: tuple[int, ...], b: tuple[int, ...]) -> float:
    """Lowest level at which a and b share a connected sublevel set."""
    footprint = ndimage.generate_binary_structure(costs.ndim, costs.ndim)
    levels = np.unique(costs[np.isfinite(costs)])
    lo, hi = 0, levels.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        labels, _ = ndimage.label(costs <= levels[mid], structure=footprint)
        if labels[a] != 0 and labels[a] == labels[b]:
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])

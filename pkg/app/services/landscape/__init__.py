from app.services.landscape.density import (
    DriftPoint,
    GridDensity,
    OracleResult,
    argmax_with_ties,
    convolve_density,
    count_local_maxima,
    grid_oracle,
    make_axes,
    optimum_drift,
    score_on_grid,
    target_density,
)
from app.services.landscape.report import (
    LandscapeReport,
    build_landscape_report,
    landscape_cost,
    write_landscape_report,
)
from app.services.landscape.search import LandscapeRun, anneal_on_landscape

__all__ = [
    "anneal_on_landscape",
    "argmax_with_ties",
    "build_landscape_report",
    "convolve_density",
    "count_local_maxima",
    "grid_oracle",
    "landscape_cost",
    "make_axes",
    "optimum_drift",
    "score_on_grid",
    "target_density",
    "write_landscape_report",
    "DriftPoint",
    "GridDensity",
    "LandscapeReport",
    "LandscapeRun",
    "OracleResult",
]

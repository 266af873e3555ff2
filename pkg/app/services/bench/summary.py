"""Per-solver statistics over seeds, and the CSV / text / SVG artifacts of a bench run."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from collections.abc import Sequence

import numpy as np

from app.services.artifacts import format_value, plt, save_svg, write_csv
from app.services.bench.runner import RunRecord

logger = logging.getLogger(__name__)


@dataclass
class SolverSummary:
    label: str
    env_id: str
    trials: int
    mean_cost: float  # over episodes that did not diverge
    std_cost: float  # population std; 0 for a single trial
    success_rate: float
    mean_tracking_error: float
    mean_contact_score: float | None
    diverged: int
    held_steps: int
    rollouts_per_step: int

    def row(self) -> list:
        return [
            self.label,
            self.env_id,
            self.trials,
            self.mean_cost,
            self.std_cost,
            self.success_rate,
            self.mean_tracking_error,
            self.mean_contact_score,
            self.diverged,
            self.held_steps,
            self.rollouts_per_step,
        ]


# rollouts_per_step counts sampled rollouts only; each control step also spends
# one extra rollout of the optimized plan on plan_cost, for every solver alike.
SUMMARY_HEADER = [
    "solver",
    "env",
    "trials",
    "mean_cost",
    "std_cost",
    "success_rate",
    "mean_tracking_error",
    "mean_contact_score",
    "diverged",
    "held_steps",
    "rollouts_per_step",
]

RUNS_HEADER = [
    "solver",
    "seed",
    "steps",
    "realized_cost",
    "tracking_error",
    "success",
    "contact_score",
    "diverged",
    "held_steps",
    "rollouts_per_step",
]


def summarize(records: Sequence[RunRecord]) -> list[SolverSummary]:
    """One summary per solver label, in first-seen order.

    Raises:
        ValueError: if the records come from different environments
    """
    envs = {r.env_id for r in records}
    if len(envs) > 1:
        raise ValueError(f"Cannot summarize records from several environments: {sorted(envs)}")

    groups: dict[str, list[RunRecord]] = {}
    for record in records:
        groups.setdefault(record.label, []).append(record)

    summaries = []
    for label, group in groups.items():
        finite = np.array([r.realized_cost for r in group if not r.diverged])
        tracking = np.array([r.tracking_error for r in group])
        contact = [r.contact_score for r in group if r.contact_score is not None]
        summaries.append(
            SolverSummary(
                label=label,
                env_id=group[0].env_id,
                trials=len(group),
                mean_cost=float(finite.mean()) if finite.size else math.inf,
                std_cost=float(finite.std()) if finite.size else math.nan,
                success_rate=sum(1 for r in group if r.success) / len(group),
                mean_tracking_error=float(np.nanmean(tracking)) if np.isfinite(tracking).any() else math.nan,
                mean_contact_score=float(np.mean(contact)) if contact else None,
                diverged=sum(1 for r in group if r.diverged),
                held_steps=sum(r.held_steps for r in group),
                rollouts_per_step=group[0].rollouts_per_step,
            )
        )
    return summaries


def format_table(summaries: Sequence[SolverSummary]) -> str:
    """Aligned plain-text comparison table."""
    cells = [SUMMARY_HEADER] + [
        [_short(value) for value in summary.row()] for summary in summaries
    ]
    widths = [max(len(row[k]) for row in cells) for k in range(len(SUMMARY_HEADER))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def _short(value) -> str:
    if isinstance(value, float):
        return f"{value:.4g}"
    return format_value(value) if value is not None else "-"


# ============================================
# Artifacts
# ============================================

def write_summary(summaries: Sequence[SolverSummary], out_dir: Path) -> None:
    write_csv(out_dir / "summary.csv", SUMMARY_HEADER, (s.row() for s in summaries))
    path = out_dir / "summary.txt"
    path.write_text(format_table(summaries), encoding="utf-8")
    logger.info(f"Wrote {path}")


def write_runs(records: Sequence[RunRecord], out_dir: Path) -> None:
    write_csv(
        out_dir / "runs.csv",
        RUNS_HEADER,
        (
            [
                r.label,
                r.seed,
                r.steps,
                r.realized_cost,
                r.tracking_error,
                r.success,
                r.contact_score,
                r.diverged,
                r.held_steps,
                r.rollouts_per_step,
            ]
            for r in records
        ),
    )


def write_actions(records: Sequence[RunRecord], out_dir: Path) -> None:
    """Applied action, plan cost and per-stage best cost and weight entropy of every control step."""
    action_dim = max((r.actions.shape[1] for r in records), default=0)
    stage_count = max((len(d.stages) for r in records for d in r.diagnostics), default=0)
    header = (
        ["solver", "seed", "step"]
        + [f"action_{k}" for k in range(action_dim)]
        + ["plan_cost", "held", "applied_update_count"]
        + [f"stage_{j}_best_cost" for j in range(stage_count)]
        + [f"stage_{j}_entropy" for j in range(stage_count)]
    )

    def rows():
        for r in records:
            for d in r.diagnostics:
                best = d.stage_best_costs
                entropy = [stage.weight_entropy for stage in d.stages]
                yield (
                    [r.label, r.seed, d.step]
                    + [float(a) for a in d.action]
                    + [d.plan_cost, d.held, d.applied_update_count]
                    + best
                    + [None] * (stage_count - len(best))
                    + entropy
                    + [None] * (stage_count - len(entropy))
                )

    write_csv(out_dir / "actions.csv", header, rows())


def write_timing(records: Sequence[RunRecord], out_dir: Path) -> None:
    """Wall-clock per control step; kept apart so the other artifacts stay deterministic."""
    write_csv(
        out_dir / "timing.csv",
        ["solver", "seed", "step", "seconds"],
        ([r.label, r.seed, t, float(s)] for r in records for t, s in enumerate(r.wall_clock)),
    )


def plot_costs(records: Sequence[RunRecord], path: Path) -> None:
    groups: dict[str, list[float]] = {}
    for r in records:
        if not r.diverged:
            groups.setdefault(r.label, []).append(r.realized_cost)
    if not groups:
        logger.warning("No finite episode costs to plot")
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.boxplot(list(groups.values()))
    ax.set_xticks(range(1, len(groups) + 1), list(groups))
    ax.set_ylabel("realized cost")
    ax.set_title(f"{records[0].env_id}: cost over {len(records) // max(len(groups), 1)} seeds")
    save_svg(fig, path)


def write_bench_outputs(records: Sequence[RunRecord], out_dir: Path, *, timing: bool = False, plots: bool = True) -> list[SolverSummary]:
    """summary.csv, summary.txt, runs.csv, actions.csv (+ timing.csv, costs.svg)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries = summarize(records)
    write_summary(summaries, out_dir)
    write_runs(records, out_dir)
    write_actions(records, out_dir)
    if timing:
        write_timing(records, out_dir)
    if plots:
        plot_costs(records, out_dir / "costs.svg")
    return summaries

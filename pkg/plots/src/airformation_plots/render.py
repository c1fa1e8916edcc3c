"""Regenerate the two standard figures from simulator output files.

The renderer is deliberately dumb: it parses the trajectory CSV and the
metrics JSON, checks they are consistent with each other, and draws.  All
dynamics numbers come from the files; nothing is recomputed here beyond the
stated consistency checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "PlotSpec",
    "RenderResult",
    "InputFormatError",
    "ConsistencyError",
    "parse_trajectory",
    "parse_metrics",
    "render",
]

TRAJECTORY_COLUMNS = ["t", "agent", "x", "y", "theta_x", "theta_y"]


class InputFormatError(ValueError):
    """Trajectory or metrics file does not match the expected format."""


class ConsistencyError(ValueError):
    """Trajectory and metrics files disagree with each other."""


@dataclass(frozen=True)
class PlotSpec:
    """One figure to produce from a pair of simulator output files."""

    trajectory_path: Path
    metrics_path: Path
    output_path: Path
    kind: str  # "plane" or "abscissa"
    tolerance: float = 1.5e-2  # final-position vs consensus+slot check

    def __post_init__(self):
        if self.kind not in ("plane", "abscissa"):
            raise ValueError(f"kind must be 'plane' or 'abscissa', got {self.kind!r}")


@dataclass(frozen=True)
class RenderResult:
    """What was drawn, for callers that want to double-check."""

    output_path: Path
    n_agents: int
    samples_per_agent: int
    legend_labels: list = field(default_factory=list)


def parse_trajectory(path) -> dict:
    """Read the trajectory CSV into {agent: (t, x, y, theta_x, theta_y) arrays}."""
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"trajectory file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines or lines[0].split(",") != TRAJECTORY_COLUMNS:
        raise InputFormatError(
            f"{path}: expected header '{','.join(TRAJECTORY_COLUMNS)}', got {lines[0] if lines else '<empty>'!r}"
        )
    per_agent: dict = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(TRAJECTORY_COLUMNS):
            raise InputFormatError(
                f"{path}:{lineno}: expected {len(TRAJECTORY_COLUMNS)} columns, got {len(parts)}"
            )
        try:
            t = float(parts[0])
            agent = int(parts[1])
            values = [float(v) for v in parts[2:]]
        except ValueError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
        per_agent.setdefault(agent, []).append([t, *values])
    if not per_agent:
        raise InputFormatError(f"{path}: no samples")
    return {
        agent: np.array(rows)
        for agent, rows in sorted(per_agent.items())
    }


def parse_metrics(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"metrics file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: malformed JSON ({exc})") from exc
    for key in ("rounds", "formation"):
        if key not in doc:
            raise InputFormatError(f"{path}: missing '{key}'")
    if "displacements" not in doc["formation"]:
        raise InputFormatError(f"{path}: missing formation.displacements")
    return doc


def _check_consistency(trajectory: dict, metrics: dict, tolerance: float):
    agents = sorted(trajectory)
    displacements = np.asarray(metrics["formation"]["displacements"], dtype=float)
    if len(displacements) != len(agents):
        raise ConsistencyError(
            f"metrics lists {len(displacements)} formation slots but the "
            f"trajectory has {len(agents)} agents"
        )
    counts = {agent: len(rows) for agent, rows in trajectory.items()}
    if len(set(counts.values())) != 1:
        raise ConsistencyError(f"unequal sample counts per agent: {counts}")
    point = metrics.get("consensus_point")
    if point is not None:
        centroid = np.asarray(point, dtype=float)
        for agent, rows in trajectory.items():
            final = rows[-1, 1:3]
            target = centroid + displacements[agent]
            gap = float(np.linalg.norm(final - target))
            if gap > tolerance:
                raise ConsistencyError(
                    f"agent {agent} ends {gap:.3e} from its slot "
                    f"(tolerance {tolerance:.3e})"
                )


def _plane_figure(trajectory: dict, metrics: dict):
    fig, ax = plt.subplots(figsize=(7.0, 6.5))
    labels = []
    for agent, rows in trajectory.items():
        label = f"agent {agent}"
        labels.append(label)
        (line,) = ax.plot(rows[:, 1], rows[:, 2], linewidth=1.2, label=label)
        ax.plot(rows[0, 1], rows[0, 2], marker=".", color=line.get_color())
        ax.plot(rows[-1, 1], rows[-1, 2], marker="o", color=line.get_color())
    point = metrics.get("consensus_point")
    if point is not None:
        displacements = np.asarray(metrics["formation"]["displacements"], dtype=float)
        polygon = np.asarray(point) + displacements
        closed = np.vstack([polygon, polygon[:1]])
        ax.plot(closed[:, 0], closed[:, 1], "k--", linewidth=1.0, label="formation")
        labels.append("formation")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    return fig, ax, labels


def _abscissa_figure(trajectory: dict, metrics: dict):
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    labels = []
    for agent, rows in trajectory.items():
        label = f"agent {agent}"
        labels.append(label)
        ax.plot(rows[:, 0], rows[:, 1], linewidth=1.2, label=label)
    for entry in metrics["rounds"]:
        ax.axvline(entry["t_k"], color="0.7", linestyle=":", linewidth=0.8, zorder=0)
    ax.set_xlabel("t (s)")
    ax.set_ylabel("x (m)")
    return fig, ax, labels


def render(spec: PlotSpec) -> RenderResult:
    """Draw one figure; raises if the inputs are malformed or inconsistent."""
    trajectory = parse_trajectory(spec.trajectory_path)
    metrics = parse_metrics(spec.metrics_path)
    _check_consistency(trajectory, metrics, spec.tolerance)

    if spec.kind == "plane":
        fig, ax, labels = _plane_figure(trajectory, metrics)
    else:
        fig, ax, labels = _abscissa_figure(trajectory, metrics)

    n_agents = len(trajectory)
    samples = len(next(iter(trajectory.values())))
    ax.legend(
        loc="best",
        fontsize=8,
        title=f"{n_agents} agents, {samples} samples each",
        title_fontsize=8,
    )
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return RenderResult(
        output_path=out,
        n_agents=n_agents,
        samples_per_agent=samples,
        legend_labels=labels,
    )

"""Parsing and rendering of freebound CSV files.

Boundary figures show the wealth exercise boundary (closed form, optionally
the lattice oracle's) and, when present, the log-coordinate boundary next to
the grid oracle's.  Path figures stack wealth panels over strategy panels;
strategies flatline at zero after the stop.  Output is deterministic for
identical inputs (fixed backend, sizes, and no volatile metadata).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CSV_MAGIC = "# freebound-csv/1"

BOUNDARY_REQUIRED = ("t", "x_boundary")
PATH_REQUIRED = ("t", "X", "pi")


class RenderError(Exception):
    """Bad input: missing file, wrong header, or missing columns."""


@dataclass(frozen=True)
class PlotJob:
    """Input CSV paths, output image path, and style options."""

    inputs: tuple[str, ...]
    output: str
    labels: tuple[str, ...] | None = None
    reverse_time: bool = False
    dpi: int = 120
    comments: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.inputs:
            raise RenderError("at least one input CSV is required")
        if self.labels is not None and len(self.labels) != len(self.inputs):
            raise RenderError("one label per input file is required")


def load_csv(path: str) -> tuple[dict[str, np.ndarray], list[str]]:
    """Parse one versioned CSV into named columns plus its comment lines."""
    p = Path(path)
    if not p.exists():
        raise RenderError(f"input file {path} does not exist")
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != CSV_MAGIC:
        raise RenderError(f"{path}: missing or malformed header (expected {CSV_MAGIC!r})")
    comments = [l for l in lines if l.startswith("#")]
    data = [l for l in lines[1:] if l.strip() and not l.startswith("#")]
    if not data:
        raise RenderError(f"{path}: no data rows")
    header = data[0].split(",")
    rows = []
    for line in data[1:]:
        parts = line.split(",")
        if len(parts) != len(header):
            raise RenderError(f"{path}: ragged row {line!r}")
        rows.append([float(v) for v in parts])
    table = np.array(rows, dtype=float)
    return {name: table[:, j] for j, name in enumerate(header)}, comments


def _require(cols: dict[str, np.ndarray], required, path: str) -> None:
    missing = [c for c in required if c not in cols]
    if missing:
        raise RenderError(f"{path}: missing columns {missing}")


def _finish(fig, job: PlotJob) -> str:
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=job.dpi, metadata={"Software": "freebound-plots"})
    plt.close(fig)
    return str(out)


def plot_boundary(job: PlotJob) -> str:
    """Render one boundary panel per input file (plus a log-coordinate panel
    whenever the grid-oracle column is present)."""
    parsed = [load_csv(p) for p in job.inputs]
    for (cols, _), p in zip(parsed, job.inputs):
        _require(cols, BOUNDARY_REQUIRED, p)
    any_zfd = any("z_fd" in cols for cols, _ in parsed)
    n = len(parsed)
    n_rows = 2 if any_zfd else 1
    fig, axes = plt.subplots(
        n_rows, n, figsize=(5.2 * n, 3.6 * n_rows), squeeze=False, sharex="col"
    )
    for j, ((cols, _), path) in enumerate(zip(parsed, job.inputs)):
        label = job.labels[j] if job.labels else Path(path).stem
        t = cols["t"]
        ax = axes[0][j]
        ax.plot(t, cols["x_boundary"], label="GCA", color="tab:blue")
        if "x_btm" in cols:
            good = np.isfinite(cols["x_btm"])
            ax.plot(t[good], cols["x_btm"][good], label="BTM", color="tab:orange",
                    linestyle="--")
        ax.set_title(label)
        ax.set_ylabel("wealth boundary")
        ax.legend(loc="best")
        if job.reverse_time:
            ax.invert_xaxis()
        if any_zfd:
            axz = axes[1][j]
            if "z_star" in cols:
                axz.plot(t, cols["z_star"], label="GCA", color="tab:blue")
            if "z_fd" in cols:
                good = np.isfinite(cols["z_fd"])
                axz.plot(t[good], cols["z_fd"][good], label="FD", color="tab:green",
                         linestyle=":")
            axz.set_ylabel("log-price boundary")
            axz.set_xlabel("t")
            axz.legend(loc="best")
        else:
            ax.set_xlabel("t")
    fig.tight_layout()
    return _finish(fig, job)


def plot_paths(job: PlotJob) -> str:
    """Render stacked wealth/strategy panels with all paths overlaid."""
    parsed = [load_csv(p) for p in job.inputs]
    for (cols, _), p in zip(parsed, job.inputs):
        _require(cols, PATH_REQUIRED, p)
    fig, (ax_x, ax_pi) = plt.subplots(2, 1, figsize=(6.4, 5.6), sharex=True)
    for j, ((cols, comments), path) in enumerate(zip(parsed, job.inputs)):
        label = job.labels[j] if job.labels else Path(path).stem
        ax_x.plot(cols["t"], cols["X"], label=label)
        ax_pi.plot(cols["t"], cols["pi"], label=label)
        stop = _stop_time(comments)
        if stop is not None and stop < cols["t"][-1]:
            ax_x.axvline(stop, color="gray", linewidth=0.7, linestyle=":")
    ax_x.set_ylabel("wealth")
    ax_pi.set_ylabel("risky position")
    ax_pi.set_xlabel("t")
    ax_x.legend(loc="best")
    ax_pi.legend(loc="best")
    if job.reverse_time:
        ax_x.invert_xaxis()
    fig.tight_layout()
    return _finish(fig, job)


def _stop_time(comments: list[str]) -> float | None:
    for line in comments:
        if "stop_time=" in line:
            try:
                return float(line.split("stop_time=")[1].split()[0])
            except ValueError:
                return None
    return None

"""Deterministic CSV/figure emission and bundle manifests.

CSVs are the data contract: fixed column order, %.12g formatting, LF
newlines, no timestamps, so identical runs are byte-identical.  Plots
are convenience renderings of the same tables, written as SVG through
the Agg backend with a pinned hash salt and no embedded creation date,
which keeps them reproducible too.  Every emitted file lands in the
bundle manifest with its SHA-256.
"""

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .errors import ConfigError

matplotlib.rcParams["svg.hashsalt"] = "vibronic-tpa"
matplotlib.rcParams["svg.fonttype"] = "path"


def format_cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.12g" % float(v)


def write_csv(path, header, rows):
    """Write a table with a fixed float format; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", newline="\n")
    return path


def write_matrix_csv(path, k_axis, matrix):
    """JSA-style export: header row of axis values, then |psi| rows."""
    header = [format_cell(k) for k in k_axis]
    rows = np.abs(np.asarray(matrix))
    return write_csv(path, header, rows)


def emit_plot(table, path, title="", xlabel="", ylabel="", kind=None):
    """Render a numeric table to a deterministic SVG file.

    A two-column table becomes a line plot, a square matrix a heatmap,
    anything else a multi-line plot with column 0 as the x axis.
    """
    table = np.asarray(table, dtype=float)
    if table.size == 0:
        raise ConfigError("emit_plot needs a non-empty table")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if kind is None:
        if table.ndim == 2 and table.shape[0] == table.shape[1] and table.shape[0] > 2:
            kind = "heatmap"
        else:
            kind = "line"
    fig, ax = plt.subplots(figsize=(6.0, 4.2), dpi=100)
    try:
        if kind == "heatmap":
            im = ax.imshow(table, origin="lower", aspect="auto", cmap="viridis")
            fig.colorbar(im, ax=ax)
        else:
            if table.ndim == 1:
                ax.plot(table, lw=1.2)
            else:
                x = table[:, 0]
                for j in range(1, table.shape[1]):
                    ax.plot(x, table[:, j], lw=1.0)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return path


def sha256_of(path):
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


@dataclass
class FigureBundle:
    """Everything one scan emitted, plus the manifest describing it."""

    out_dir: Path
    csv_paths: list = field(default_factory=list)
    plot_paths: list = field(default_factory=list)
    extra_paths: list = field(default_factory=list)
    manifest_path: Path = None

    def add_csv(self, path):
        self.csv_paths.append(Path(path))
        return Path(path)

    def add_plot(self, path):
        self.plot_paths.append(Path(path))
        return Path(path)

    def add_extra(self, path):
        self.extra_paths.append(Path(path))
        return Path(path)

    def finalize(self, config_digest, engine):
        from . import __version__

        files = {}
        for p in [*self.csv_paths, *self.plot_paths, *self.extra_paths]:
            files[str(Path(p).relative_to(self.out_dir))] = sha256_of(p)
        manifest = {
            "package": "vibronic-tpa",
            "version": __version__,
            "engine": engine,
            "config_sha256": config_digest,
            "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "files": dict(sorted(files.items())),
        }
        self.manifest_path = Path(self.out_dir) / "manifest.json"
        self.manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
        return self.manifest_path

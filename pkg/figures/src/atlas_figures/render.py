"""Deterministic PNG rendering of curve and heatmap figures.

Everything plotted comes straight from CSV columns; the renderer never
recomputes a statistic. Output bytes are a pure function of the CSV bytes and
the figure spec: fixed style, fixed dpi, pinned PNG metadata, Agg backend.
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spec import FigureSpec, SpecError

# 2 : 1.4 aspect, matching the source subfigure proportions
_FIGSIZE = (6.0, 4.2)
_DPI = 120
# fixed PNG text chunk so bytes do not vary with the matplotlib version
_METADATA = {"Software": "atlas-figures"}


def read_csv(path):
    """Read a harness CSV into {column: list of floats-or-strings}."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise SpecError(f"{path}: empty input")
            rows = list(reader)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SpecError(f"{path}: no data rows")
    out = {}
    for col in reader.fieldnames:
        vals = []
        for row in rows:
            raw = row[col]
            try:
                vals.append(float(raw))
            except (TypeError, ValueError):
                vals.append(raw)
        out[col] = vals
    return out


def _column(table, name, path):
    if name not in table:
        raise SpecError(
            f"{path}: missing column {name!r}; available: {sorted(table)}"
        )
    vals = table[name]
    if not all(isinstance(v, float) for v in vals):
        raise SpecError(f"{path}: column {name!r} contains non-numeric values")
    return np.asarray(vals, dtype=float)


def _render_curve(spec: FigureSpec, out_path):
    table = read_csv(spec.summary_csv)
    x = _column(table, spec.x, spec.summary_csv)
    y = _column(table, spec.y, spec.summary_csv)
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]

    fig, ax = plt.subplots(figsize=_FIGSIZE)
    if spec.trials_csv and spec.scatter_y:
        trials = read_csv(spec.trials_csv)
        tx = _column(trials, spec.x, spec.trials_csv)
        ty = _column(trials, spec.scatter_y, spec.trials_csv)
        ax.plot(tx, ty, linestyle="none", marker=".", markersize=3,
                color="#7f7f7f", alpha=0.5, label="trials")
    ax.plot(x, y, marker="o", color="#1f77b4", label=spec.y)
    for overlay in spec.overlays:
        ov = _column(table, overlay, spec.summary_csv)[order]
        ax.plot(x, ov, linestyle="--", color="#d62728", label=overlay)
    if spec.twin:
        tw = _column(table, spec.twin, spec.summary_csv)[order]
        ax2 = ax.twinx()
        ax2.plot(x, tw, linestyle=":", color="#2ca02c", label=spec.twin)
        ax2.set_ylabel(spec.twin)
        ax2.set_ylim(0.0, 1.05)
    ax.set_xscale(spec.xscale)
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    ax.legend(loc="best")
    ax.set_title(spec.name)
    fig.savefig(out_path, dpi=_DPI, metadata=_METADATA)
    plt.close(fig)


def _render_heatmap(spec: FigureSpec, out_path):
    table = read_csv(spec.summary_csv)
    x = _column(table, spec.x, spec.summary_csv)
    y = _column(table, spec.y, spec.summary_csv)
    val = _column(table, spec.value, spec.summary_csv)

    xs = np.unique(x)
    ys = np.unique(y)
    grid = np.full((ys.size, xs.size), np.nan)
    for xi, yi, vi in zip(x, y, val):
        grid[np.searchsorted(ys, yi), np.searchsorted(xs, xi)] = vi
    if np.any(np.isnan(grid)):
        raise SpecError(
            f"{spec.summary_csv}: ({spec.x}, {spec.y}) cells do not form a "
            "complete grid"
        )

    fig, ax = plt.subplots(figsize=_FIGSIZE)
    # color scale pinned to probability 0..1, low = blue, high = yellow
    im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis",
                   vmin=0.0, vmax=1.0)
    ax.set_xticks(range(xs.size), [_tick(v) for v in xs])
    ax.set_yticks(range(ys.size), [_tick(v) for v in ys])
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    ax.set_title(spec.name)
    fig.colorbar(im, ax=ax, label=spec.value)
    fig.savefig(out_path, dpi=_DPI, metadata=_METADATA)
    plt.close(fig)


def _tick(v):
    return str(int(v)) if float(v).is_integer() else f"{v:g}"


def render(spec: FigureSpec, out_dir):
    """Render one figure into out_dir; returns the output path."""
    os.makedirs(out_dir, exist_ok=True)
    out_path = os.path.join(out_dir, spec.output)
    if spec.kind == "curve":
        _render_curve(spec, out_path)
    else:
        _render_heatmap(spec, out_path)
    return out_path

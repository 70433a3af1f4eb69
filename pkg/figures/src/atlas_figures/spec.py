"""Figure specification: a JSON document listing the figures to render.

Schema (all paths are resolved relative to the spec file):

    {
      "figures": [
        {
          "name": "noise_curve",
          "kind": "curve",                  # or "heatmap"
          "summary_csv": "summary.csv",
          "trials_csv": "trials.csv",       # optional, curve scatter
          "x": "noise_ratio",
          "y": "mean_rel_error",
          "scatter_y": "rel_error",         # optional, column in trials_csv
          "overlays": ["bound_rel"],        # optional, dashed lines
          "twin": "sparsity_fraction",      # optional, second y-axis
          "xscale": "linear",               # or "log"
          "output": "noise_curve.png"
        },
        {
          "name": "phase",
          "kind": "heatmap",
          "summary_csv": "summary.csv",
          "x": "m", "y": "s",
          "value": "success_rate_04",
          "output": "phase.png"
        }
      ]
    }
"""

import json
import os
from dataclasses import dataclass, field


class SpecError(ValueError):
    """Invalid figure specification."""


KINDS = ("curve", "heatmap")

_COMMON_KEYS = {"name", "kind", "summary_csv", "output"}
_CURVE_KEYS = _COMMON_KEYS | {"trials_csv", "x", "y", "scatter_y", "overlays",
                              "twin", "xscale"}
_HEATMAP_KEYS = _COMMON_KEYS | {"x", "y", "value"}


@dataclass
class FigureSpec:
    name: str
    kind: str
    summary_csv: str
    output: str
    x: str = None
    y: str = None
    value: str = None
    trials_csv: str = None
    scatter_y: str = None
    overlays: list = field(default_factory=list)
    twin: str = None
    xscale: str = "linear"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"figure {self.name!r}: unknown kind {self.kind!r}; "
                            f"expected one of {KINDS}")
        if self.xscale not in ("linear", "log"):
            raise SpecError(f"figure {self.name!r}: unknown xscale {self.xscale!r}")
        if not self.x or not self.y:
            raise SpecError(f"figure {self.name!r}: 'x' and 'y' are required")
        if self.kind == "heatmap" and not self.value:
            raise SpecError(f"figure {self.name!r}: heatmap requires 'value'")
        if self.scatter_y and not self.trials_csv:
            raise SpecError(f"figure {self.name!r}: 'scatter_y' requires 'trials_csv'")


def _one_figure(entry, base_dir, index):
    if not isinstance(entry, dict):
        raise SpecError(f"figure #{index} must be an object")
    name = entry.get("name", f"figure_{index}")
    kind = entry.get("kind")
    allowed = _CURVE_KEYS if kind == "curve" else _HEATMAP_KEYS
    for key in entry:
        if key not in allowed:
            raise SpecError(f"figure {name!r}: unknown field {key!r}")
    for required in ("kind", "summary_csv", "output"):
        if required not in entry:
            raise SpecError(f"figure {name!r}: missing field {required!r}")

    def path(p):
        return p if p is None or os.path.isabs(p) else os.path.join(base_dir, p)

    return FigureSpec(
        name=name,
        kind=kind,
        summary_csv=path(entry["summary_csv"]),
        trials_csv=path(entry.get("trials_csv")),
        output=entry["output"],
        x=entry.get("x"),
        y=entry.get("y"),
        value=entry.get("value"),
        scatter_y=entry.get("scatter_y"),
        overlays=list(entry.get("overlays", [])),
        twin=entry.get("twin"),
        xscale=entry.get("xscale", "linear"),
    )


def load_spec(path):
    """Parse a figure-spec JSON file into a list of FigureSpec."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "figures" not in data:
        raise SpecError("spec root must be an object with a 'figures' list")
    figures = data["figures"]
    if not isinstance(figures, list) or not figures:
        raise SpecError("'figures' must be a non-empty list")
    for key in data:
        if key != "figures":
            raise SpecError(f"unknown top-level field {key!r}")
    base_dir = os.path.dirname(os.path.abspath(path))
    return [_one_figure(entry, base_dir, i) for i, entry in enumerate(figures)]

"""Choropleth figures of grid cells (distance fields and majority maps)."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import PatchCollection  # noqa: E402
from matplotlib.colors import Normalize  # noqa: E402
from matplotlib.patches import Patch, Rectangle  # noqa: E402

from .analysis import DistanceField, MajorityMap  # noqa: E402
from .grid import CellId, GridSpec, cell_bounds  # noqa: E402

FIELD_CMAP = "viridis"
# fixed salt keeps element ids, and therefore the SVG bytes, reproducible
_RC = {"svg.hashsalt": "geolect", "svg.fonttype": "path", "font.size": 9}


def _rects(spec: GridSpec, cells: Sequence[CellId]):
    out = []
    for cell in cells:
        x0, y0, x1, y1 = cell_bounds(spec, cell)
        out.append(Rectangle((x0, y0), x1 - x0, y1 - y0))
    return out


def _frame(ax, spec: GridSpec, title: str) -> None:
    size = spec.cell_size_deg
    ax.set_xlim(spec.origin_lon, spec.origin_lon + spec.n_cols * size)
    ax.set_ylim(spec.origin_lat, spec.origin_lat + spec.n_rows * size)
    ax.set_aspect("equal")
    ax.set_xlabel("longitude (deg)")
    ax.set_ylabel("latitude (deg)")
    ax.set_title(title)


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fmt = path.suffix.lstrip(".").lower() or "svg"
    # no timestamp in the file
    extra = {"metadata": {"Date": None}} if fmt == "svg" else {}
    fig.savefig(path, format=fmt, bbox_inches="tight", **extra)
    plt.close(fig)
    return path


def render_field(field: DistanceField, spec: GridSpec, path: Path, title: Optional[str] = None) -> Path:
    """Color each cell by its normalized distance to the reference cell."""
    cells = sorted(field.entries)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 5.5))
        coll = PatchCollection(_rects(spec, cells), cmap=FIELD_CMAP, norm=Normalize(0.0, 1.0),
                               edgecolor="none")
        coll.set_array([field.entries[c] for c in cells])
        ax.add_collection(coll)
        x0, y0, x1, y1 = cell_bounds(spec, field.reference)
        ax.add_patch(Rectangle((x0, y0), x1 - x0, y1 - y0, fill=False, edgecolor="red", linewidth=1.2))
        fig.colorbar(coll, ax=ax, label="distance / d_max", shrink=0.8)
        _frame(ax, spec, title or
               f"{field.scope} | {field.kind.value} | threshold {field.threshold} | ref {field.reference}")
        return _save(fig, path)


def render_majority(mmap: MajorityMap, variants: Sequence[str], spec: GridSpec, path: Path,
                    title: Optional[str] = None) -> Path:
    """One color per variant (lexicon order), with a legend of the variants shown."""
    cells = sorted(mmap.entries)
    present = [v for v in variants if v in set(mmap.entries.values())]
    cmap = plt.get_cmap("tab20" if len(present) > 10 else "tab10")
    colors = {v: cmap(k % cmap.N) for k, v in enumerate(present)}
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 5.5))
        coll = PatchCollection(_rects(spec, cells), facecolor=[colors[mmap.entries[c]] for c in cells],
                               edgecolor="none")
        ax.add_collection(coll)
        ax.legend(handles=[Patch(color=colors[v], label=v) for v in present],
                  loc="center left", bbox_to_anchor=(1.02, 0.5), frameon=False)
        _frame(ax, spec, title or f"{mmap.concept_id}: majority variant")
        return _save(fig, path)

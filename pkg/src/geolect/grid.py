"""Regular lon/lat grid over a bounding region.

Cells are half-open ``[low, high)`` rectangles in plate carrée degrees,
addressed by ``(col, row)`` counted east and north from the south-west anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, NamedTuple, Optional, Tuple


class CellId(NamedTuple):
    col: int
    row: int

    def __str__(self) -> str:
        return f"{self.col}:{self.row}"

    @classmethod
    def parse(cls, text: str) -> "CellId":
        col, row = text.strip().split(":")
        return cls(int(col), int(row))


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Grid anchor, cell size and extent.

    The default covers mainland Spain and the Balearic Islands
    (lon -10.0 .. 4.35, lat 35.0 .. 44.1) and leaves out the Canary Islands.
    """

    origin_lon: float = -10.0
    origin_lat: float = 35.0
    cell_size_deg: float = 0.35
    n_cols: int = 41
    n_rows: int = 26

    def __post_init__(self):
        if not self.cell_size_deg > 0:
            raise GridError(f"cell_size_deg must be positive, got {self.cell_size_deg}")
        if self.n_cols < 1 or self.n_rows < 1:
            raise GridError(f"grid needs at least one cell, got {self.n_cols}x{self.n_rows}")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``origin_lon,origin_lat,size,ncols,nrows``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 5:
            raise GridError(f"expected 5 comma-separated grid values, got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), float(parts[2]), int(parts[3]), int(parts[4]))
        except ValueError as exc:
            raise GridError(f"bad grid specification {text!r}: {exc}") from None

    def to_string(self) -> str:
        return (
            f"{self.origin_lon!r},{self.origin_lat!r},{self.cell_size_deg!r},"
            f"{self.n_cols},{self.n_rows}"
        )

    def contains(self, cell: CellId) -> bool:
        return 0 <= cell.col < self.n_cols and 0 <= cell.row < self.n_rows


def _edge(origin: float, size: float, k: int) -> float:
    return origin + k * size


def _axis_index(value: float, origin: float, size: float) -> int:
    k = math.floor((value - origin) / size)
    # make the index agree with the edges cell_bounds reports
    if _edge(origin, size, k + 1) <= value:
        k += 1
    elif _edge(origin, size, k) > value:
        k -= 1
    return k


def cell_of(spec: GridSpec, lon: float, lat: float) -> Optional[CellId]:
    """Cell containing ``(lon, lat)``, or None outside the grid."""
    if not (math.isfinite(lon) and math.isfinite(lat)):
        return None
    col = _axis_index(lon, spec.origin_lon, spec.cell_size_deg)
    row = _axis_index(lat, spec.origin_lat, spec.cell_size_deg)
    cell = CellId(col, row)
    return cell if spec.contains(cell) else None


def cell_bounds(spec: GridSpec, cell: CellId) -> Tuple[float, float, float, float]:
    """``(min_lon, min_lat, max_lon, max_lat)`` of a cell; max edges are exclusive."""
    if not spec.contains(cell):
        raise GridError(f"cell {cell} outside {spec.n_cols}x{spec.n_rows} grid")
    size = spec.cell_size_deg
    return (
        _edge(spec.origin_lon, size, cell.col),
        _edge(spec.origin_lat, size, cell.row),
        _edge(spec.origin_lon, size, cell.col + 1),
        _edge(spec.origin_lat, size, cell.row + 1),
    )


def read_allowlist(path: Path) -> FrozenSet[CellId]:
    """Read a cell allow-list: one ``col:row`` (or ``col,row``) per line, ``#`` comments."""
    cells = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        cells.add(CellId.parse(line.replace(",", ":")))
    return frozenset(cells)

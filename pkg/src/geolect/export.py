"""Writers for distance matrices (CSV) and cell maps (GeoJSON)."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Dict, Mapping, Optional

import numpy as np

from .analysis import DistanceField, DistanceMatrix, MajorityMap
from .freqmodel import parse_header
from .grid import CellId, GridSpec, cell_bounds
from .metrics import MetricKind

COORD_DIGITS = 9


def _header_block(metadata: Mapping[str, object]) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in metadata.items())


def dumps_matrix(matrix: DistanceMatrix, metadata: Optional[Mapping[str, object]] = None) -> str:
    """CSV with a ``cell`` header row and column; empty fields are undefined pairs."""
    meta = {"metric": matrix.kind.value, "scope": matrix.scope, "threshold": matrix.threshold}
    meta.update(metadata or {})
    buf = io.StringIO()
    buf.write(_header_block(meta))
    writer = csv.writer(buf, lineterminator="\n")
    labels = [str(c) for c in matrix.cells]
    writer.writerow(["cell"] + labels)
    for label, row in zip(labels, matrix.values):
        writer.writerow([label] + ["" if np.isnan(v) else repr(float(v)) for v in row])
    return buf.getvalue()


def loads_matrix(text: str) -> DistanceMatrix:
    lines = text.splitlines()
    meta = parse_header(lines)
    rows = list(csv.reader(line for line in lines if not line.startswith("#")))
    cells = [CellId.parse(s) for s in rows[0][1:]]
    values = np.array([[float(v) if v else np.nan for v in r[1:]] for r in rows[1:]], dtype=np.float64)
    return DistanceMatrix(cells, values, MetricKind.parse(meta["metric"]), meta["scope"],
                          int(meta.get("threshold", 0)))


def _polygon(spec: GridSpec, cell: CellId) -> dict:
    x0, y0, x1, y1 = (round(v, COORD_DIGITS) for v in cell_bounds(spec, cell))
    return {"type": "Polygon", "coordinates": [[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]]}


def _collection(features, metadata: Mapping[str, object]) -> str:
    doc = {"type": "FeatureCollection", "metadata": dict(metadata), "features": features}
    return json.dumps(doc, ensure_ascii=False, indent=1) + "\n"


def dumps_field(field: DistanceField, spec: GridSpec,
                metadata: Optional[Mapping[str, object]] = None) -> str:
    meta = {
        "kind": "distance_field",
        "metric": field.kind.value,
        "scope": field.scope,
        "threshold": field.threshold,
        "reference": {"col": field.reference.col, "row": field.reference.row},
        "d_max": field.d_max,
        "grid": spec.to_string(),
    }
    meta.update(metadata or {})
    features = [
        {"type": "Feature", "geometry": _polygon(spec, cell),
         "properties": {"col": cell.col, "row": cell.row, "value": value}}
        for cell, value in sorted(field.entries.items())
    ]
    return _collection(features, meta)


def loads_field(text: str) -> DistanceField:
    doc = json.loads(text)
    meta = doc["metadata"]
    entries = {CellId(f["properties"]["col"], f["properties"]["row"]): f["properties"]["value"]
               for f in doc["features"]}
    ref = CellId(meta["reference"]["col"], meta["reference"]["row"])
    return DistanceField(ref, entries, MetricKind.parse(meta["metric"]), meta["scope"],
                         int(meta["threshold"]), float(meta["d_max"]))


def dumps_majority(mmap: MajorityMap, spec: GridSpec,
                   metadata: Optional[Mapping[str, object]] = None) -> str:
    meta: Dict[str, object] = {
        "kind": "majority_map",
        "concept": mmap.concept_id,
        "tie_break": "first variant in lexicon order",
        "tied_cells": [str(c) for c in sorted(mmap.ties)],
        "grid": spec.to_string(),
    }
    meta.update(metadata or {})
    features = [
        {"type": "Feature", "geometry": _polygon(spec, cell),
         "properties": {"col": cell.col, "row": cell.row, "variant": variant}}
        for cell, variant in sorted(mmap.entries.items())
    ]
    return _collection(features, meta)


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path

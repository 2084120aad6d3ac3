"""Distance matrices, reference-cell selection, normalized distance fields and majority maps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from .freqmodel import FrequencyModel
from .grid import CellId
from .metrics import MetricKind

ALL_CONCEPTS = "all"


class AnalysisError(ValueError):
    pass


class DegenerateMatrixError(AnalysisError):
    """Too few cells, no defined pair, or every defined distance is zero."""


@dataclass
class DistanceMatrix:
    """Symmetric pairwise cell distances; NaN marks an undefined pair.

    ``n_concepts`` is set for averaged matrices and holds, per pair, how
    many concepts entered the mean.
    """

    cells: List[CellId]
    values: np.ndarray
    kind: MetricKind
    scope: str
    threshold: int = 0
    n_concepts: Optional[np.ndarray] = None

    def __post_init__(self):
        self._pos = {c: i for i, c in enumerate(self.cells)}

    def index(self, cell: CellId) -> int:
        try:
            return self._pos[cell]
        except KeyError:
            raise AnalysisError(f"cell {cell} not in matrix") from None

    def get(self, a: CellId, b: CellId) -> Optional[float]:
        v = self.values[self.index(a), self.index(b)]
        return None if np.isnan(v) else float(v)


@dataclass(frozen=True)
class ReferenceSelection:
    i_max: CellId
    j_max: CellId
    d_max: float


@dataclass
class DistanceField:
    reference: CellId
    entries: Dict[CellId, float]
    kind: MetricKind
    scope: str
    threshold: int
    d_max: float


@dataclass
class MajorityMap:
    concept_id: str
    entries: Dict[CellId, str]
    ties: List[CellId] = field(default_factory=list)


# -- matrix construction ------------------------------------------------------------


def _frequency_table(model: FrequencyModel, concept_id: str) -> Tuple[List[CellId], np.ndarray]:
    variants = model.lexicon.concept(concept_id).variant_ids
    pos = {v: k for k, v in enumerate(variants)}
    cells = model.cells(concept_id)
    rows = {c: i for i, c in enumerate(cells)}
    table = np.zeros((len(cells), len(variants)))
    for (cell, concept, variant), n in model.counts.items():
        if concept == concept_id and cell in rows:
            table[rows[cell], pos[variant]] += n
    totals = table.sum(axis=1)
    keep = totals > 0
    cells = [c for c, k in zip(cells, keep) if k]
    table = table[keep] / totals[keep, None]
    return cells, table


def _cosine_rows(freq: np.ndarray, start: int, stop: int) -> np.ndarray:
    norms = np.sqrt(np.einsum("ij,ij->i", freq, freq))
    block = freq[start:stop] @ freq.T
    d = 1.0 - block / np.outer(norms[start:stop], norms)
    return np.clip(d, 0.0, 1.0)


def _jsd_rows(freq: np.ndarray, start: int, stop: int) -> np.ndarray:
    out = np.empty((stop - start, freq.shape[0]))
    for r, i in enumerate(range(start, stop)):
        p = freq[i][None, :]
        m = (p + freq) / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            tp = np.where(p > 0, p * np.log2(p / m), 0.0)
            tq = np.where(freq > 0, freq * np.log2(freq / m), 0.0)
        js = (tp.sum(axis=1) + tq.sum(axis=1)) / 2.0
        out[r] = np.sqrt(np.clip(js, 0.0, None))
    return np.clip(out, 0.0, 1.0)


def pairwise_distances(freq: np.ndarray, kind: MetricKind, workers: int = 1,
                       block: int = 256) -> np.ndarray:
    """Full symmetric distance matrix between the rows of ``freq``.

    Rows are computed in blocks (optionally on a thread pool); the upper
    triangle is mirrored so the result is exactly symmetric with a zero
    diagonal.
    """
    n = freq.shape[0]
    rows_fn = _cosine_rows if kind is MetricKind.COSINE else _jsd_rows
    spans = [(s, min(s + block, n)) for s in range(0, n, block)]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda span: rows_fn(freq, *span), spans))
    else:
        parts = [rows_fn(freq, *span) for span in spans]
    full = np.vstack(parts) if parts else np.zeros((0, 0))
    upper = np.triu(full, k=1)
    return upper + upper.T


def build_distance_matrix(model: FrequencyModel, scope: str, kind: MetricKind,
                          threshold: int = 0, workers: int = 1) -> DistanceMatrix:
    """Pairwise distances for one concept, or averaged over all concepts.

    For ``scope == "all"`` each pair's value is the mean over the concepts
    both cells have data for; pairs sharing none stay undefined.

    Raises:
        DegenerateMatrixError: fewer than two cells hold data.
    """
    kind = MetricKind.parse(kind)
    if scope != ALL_CONCEPTS:
        cells, freq = _frequency_table(model, scope)
        if len(cells) < 2:
            raise DegenerateMatrixError(
                f"concept {scope!r} has data in {len(cells)} cell(s); need at least 2"
            )
        values = pairwise_distances(freq, kind, workers)
        return DistanceMatrix(cells, values, kind, scope, threshold)

    cells = model.cells()
    if len(cells) < 2:
        raise DegenerateMatrixError(f"model has data in {len(cells)} cell(s); need at least 2")
    pos = {c: i for i, c in enumerate(cells)}
    sums = np.zeros((len(cells), len(cells)))
    counts = np.zeros((len(cells), len(cells)), dtype=np.int64)
    for concept_id in model.lexicon.concept_ids:
        ccells, freq = _frequency_table(model, concept_id)
        if not ccells:
            continue
        idx = np.array([pos[c] for c in ccells])
        sums[np.ix_(idx, idx)] += pairwise_distances(freq, kind, workers)
        counts[np.ix_(idx, idx)] += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(counts > 0, sums / counts, np.nan)
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(cells, values, kind, ALL_CONCEPTS, threshold, counts)


# -- reference cells and fields -----------------------------------------------------


def select_reference(matrix: DistanceMatrix) -> ReferenceSelection:
    """Cell pair at the largest defined distance.

    Ties go to the smallest row index, then column index, in the matrix's
    cell order.
    """
    vals = matrix.values
    n = vals.shape[0]
    upper = np.where(np.triu(np.ones((n, n), dtype=bool), k=1) & ~np.isnan(vals), vals, -np.inf)
    if n < 2 or not np.isfinite(upper).any():
        raise DegenerateMatrixError("matrix has no defined off-diagonal distance")
    flat = int(np.argmax(upper))
    i, j = divmod(flat, n)
    return ReferenceSelection(matrix.cells[i], matrix.cells[j], float(vals[i, j]))


def distance_field(matrix: DistanceMatrix, reference: CellId) -> DistanceField:
    """Distances from ``reference`` divided by the matrix maximum.

    Raises:
        DegenerateMatrixError: the maximum is 0, or the reference has no
            defined distance to any other cell.
    """
    d_max = select_reference(matrix).d_max
    if d_max <= 0.0:
        raise DegenerateMatrixError("d_max is 0: all cells are lexically identical")
    i = matrix.index(reference)
    entries: Dict[CellId, float] = {}
    for j, cell in enumerate(matrix.cells):
        v = matrix.values[i, j]
        if not np.isnan(v):
            entries[cell] = 0.0 if j == i else float(v) / d_max
    if len(entries) < 2:
        raise DegenerateMatrixError(f"reference cell {reference} has no defined distances")
    return DistanceField(reference, entries, matrix.kind, matrix.scope, matrix.threshold, d_max)


def majority_map(model: FrequencyModel, concept_id: str) -> MajorityMap:
    """Most frequent variant per cell; ties go to the variant listed first in the lexicon."""
    variants = model.lexicon.concept(concept_id).variant_ids
    out = MajorityMap(concept_id, {})
    for cell in model.cells(concept_id):
        counts = model.variant_counts(cell, concept_id)
        best = max(counts)
        if best == 0:
            continue
        winners = [k for k, n in enumerate(counts) if n == best]
        out.entries[cell] = variants[winners[0]]
        if len(winners) > 1:
            out.ties.append(cell)
    return out


# -- field comparison ---------------------------------------------------------------


def _common(f1: DistanceField, f2: DistanceField) -> Tuple[np.ndarray, np.ndarray]:
    cells = sorted(set(f1.entries) & set(f2.entries))
    if len(cells) < 3:
        raise AnalysisError(f"fields share {len(cells)} cell(s); need at least 3")
    return (np.array([f1.entries[c] for c in cells]),
            np.array([f2.entries[c] for c in cells]))


def compare_fields(f1: DistanceField, f2: DistanceField) -> Tuple[float, int]:
    """Spearman rank correlation over the cells both fields cover."""
    a, b = _common(f1, f2)
    rho = stats.spearmanr(a, b).statistic
    return float(rho), len(a)


def median_split_agreement(f1: DistanceField, f2: DistanceField) -> Tuple[float, float]:
    """How consistently two fields split their common cells at the median.

    Each field labels a cell "far" when its value exceeds the field's
    median. Returns ``(same_side, same_partition)``: the fraction of cells
    given the same label, and the same quantity with labels allowed to
    swap. Fields drawn from the two ends of the d_max pair look at the map
    from opposite sides, so the second number is the meaningful one for
    them.
    """
    a, b = _common(f1, f2)
    sa = a > np.median(a)
    sb = b > np.median(b)
    same = float(np.mean(sa == sb))
    return same, max(same, 1.0 - same)

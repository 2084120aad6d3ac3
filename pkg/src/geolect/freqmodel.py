"""Per-cell, per-concept variant counts and the relative frequencies built from them."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

import numpy as np

from .grid import CellId, GridSpec, cell_of
from .lexicon import Lexicon

FORMAT_TAG = "geolect-frequency-model v1"
CSV_HEADER = ["col", "row", "concept", "variant", "count", "tweet_total"]
THRESHOLD_MODES = ("per-concept", "per-cell")


class ModelError(ValueError):
    pass


class LexiconMismatchError(ModelError):
    """Events or a persisted model do not belong to the active lexicon."""


@dataclass(frozen=True)
class FrequencyVector:
    concept_id: str
    components: Tuple[Tuple[str, float], ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([f for _, f in self.components], dtype=np.float64)

    @property
    def variant_ids(self) -> List[str]:
        return [v for v, _ in self.components]


class FrequencyModel:
    """Absolute variant counts per (cell, concept) plus distinct-tweet totals.

    ``counts`` is keyed by ``(cell, concept_id, variant_id)`` and
    ``tweet_totals`` by ``(cell, concept_id)``. A tweet that uses two
    variants of one concept adds 1 to each variant count but only 1 to the
    tweet total, so the variant counts of a (cell, concept) can exceed its
    tweet total.
    """

    def __init__(self, spec: GridSpec, lexicon: Lexicon):
        self.spec = spec
        self.lexicon = lexicon
        self.counts: Counter = Counter()
        self.tweet_totals: Counter = Counter()

    @property
    def lexicon_digest(self) -> str:
        return self.lexicon.digest

    def copy(self) -> "FrequencyModel":
        other = FrequencyModel(self.spec, self.lexicon)
        other.counts = Counter(self.counts)
        other.tweet_totals = Counter(self.tweet_totals)
        return other

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrequencyModel):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.lexicon_digest == other.lexicon_digest
            and +self.counts == +other.counts
            and +self.tweet_totals == +other.tweet_totals
        )

    def add_events(self, events: Iterable) -> None:
        """In-place accumulation; see :func:`accumulate`."""
        seen: Set[Tuple[str, CellId, str]] = set()
        for ev in events:
            if not self.lexicon.has_variant(ev.concept_id, ev.variant_id):
                raise LexiconMismatchError(
                    f"event variant ({ev.concept_id!r}, {ev.variant_id!r}) not in lexicon"
                )
            cell = cell_of(self.spec, ev.lon, ev.lat)
            if cell is None:
                raise ModelError(f"event at ({ev.lon}, {ev.lat}) lies outside the grid")
            self.counts[(cell, ev.concept_id, ev.variant_id)] += 1
            key = (ev.tweet_id, cell, ev.concept_id)
            if key not in seen:
                seen.add(key)
                self.tweet_totals[(cell, ev.concept_id)] += 1

    def merge(self, other: "FrequencyModel") -> None:
        """Add another partial model's counts into this one."""
        if other.spec != self.spec or other.lexicon_digest != self.lexicon_digest:
            raise ModelError("cannot merge models built on different grids or lexicons")
        self.counts.update(other.counts)
        self.tweet_totals.update(other.tweet_totals)

    def cells(self, concept_id: Optional[str] = None) -> List[CellId]:
        """Sorted cells holding data (for one concept, or for any)."""
        if concept_id is None:
            found = {cell for cell, _ in self.tweet_totals}
        else:
            found = {cell for cell, c in self.tweet_totals if c == concept_id}
        return sorted(found)

    def concepts_in(self, cell: CellId) -> List[str]:
        present = {c for (k, c) in self.tweet_totals if k == cell}
        return [c for c in self.lexicon.concept_ids if c in present]

    def variant_counts(self, cell: CellId, concept_id: str) -> List[int]:
        """Absolute counts in lexicon variant order."""
        concept = self.lexicon.concept(concept_id)
        return [self.counts.get((cell, concept_id, v), 0) for v in concept.variant_ids]

    def cell_total(self, cell: CellId) -> int:
        """Sum of per-concept tweet totals in a cell (a tweet counts once per concept it matches)."""
        return sum(n for (k, _), n in self.tweet_totals.items() if k == cell)


def accumulate(model: FrequencyModel, events: Iterable) -> FrequencyModel:
    """Return a new model with ``events`` counted on top of ``model``.

    Each event adds 1 to its variant count. The tweet total of a (cell,
    concept) grows by 1 per distinct ``(tweet_id, cell, concept)`` within
    this call.

    Raises:
        LexiconMismatchError: an event names a variant the lexicon lacks.
        ModelError: an event lies outside the grid.
    """
    out = model.copy()
    out.add_events(events)
    return out


def frequency_vector(model: FrequencyModel, cell: CellId, concept_id: str) -> Optional[FrequencyVector]:
    concept = model.lexicon.concept(concept_id)
    counts = model.variant_counts(cell, concept_id)
    total = sum(counts)
    if total == 0:
        return None
    return FrequencyVector(
        concept_id, tuple((v, n / total) for v, n in zip(concept.variant_ids, counts))
    )


def apply_threshold(model: FrequencyModel, min_tweets: int, mode: str = "per-concept") -> FrequencyModel:
    """Drop sparse data.

    In ``per-concept`` mode a (cell, concept) survives when its tweet total
    is at least ``min_tweets``. In ``per-cell`` mode a whole cell survives
    when :meth:`FrequencyModel.cell_total` reaches ``min_tweets``.
    """
    if min_tweets < 0:
        raise ValueError(f"min_tweets must be >= 0, got {min_tweets}")
    if mode not in THRESHOLD_MODES:
        raise ValueError(f"unknown threshold mode {mode!r}; expected one of {THRESHOLD_MODES}")
    if min_tweets == 0:
        return model.copy()

    if mode == "per-concept":
        keep = {key for key, n in model.tweet_totals.items() if n >= min_tweets}
    else:
        per_cell: Counter = Counter()
        for (cell, _), n in model.tweet_totals.items():
            per_cell[cell] += n
        keep = {key for key in model.tweet_totals if per_cell[key[0]] >= min_tweets}
    return _restrict(model, keep)


def mask_cells(model: FrequencyModel, allowed: Iterable[CellId]) -> FrequencyModel:
    """Keep only data in the allowed cells."""
    allowed = set(allowed)
    return _restrict(model, {key for key in model.tweet_totals if key[0] in allowed})


def _restrict(model: FrequencyModel, keep: Set[Tuple[CellId, str]]) -> FrequencyModel:
    out = FrequencyModel(model.spec, model.lexicon)
    out.tweet_totals = Counter({k: n for k, n in model.tweet_totals.items() if k in keep})
    out.counts = Counter({k: n for k, n in model.counts.items() if (k[0], k[1]) in keep})
    return out


# -- persistence -----------------------------------------------------------------


def model_rows(model: FrequencyModel) -> List[Tuple[int, int, str, str, int, int]]:
    rows = []
    for (cell, concept, variant), n in model.counts.items():
        if n > 0:
            rows.append((cell.col, cell.row, concept, variant, n, model.tweet_totals[(cell, concept)]))
    rows.sort()
    return rows


def dumps_model(model: FrequencyModel, metadata: Optional[Mapping[str, str]] = None) -> str:
    """Serialize to the sorted CSV format with a ``#`` metadata header."""
    buf = io.StringIO()
    buf.write(f"# {FORMAT_TAG}\n")
    buf.write(f"# grid: {model.spec.to_string()}\n")
    buf.write(f"# lexicon_digest: {model.lexicon_digest}\n")
    for key, value in (metadata or {}).items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(model_rows(model))
    return buf.getvalue()


def write_model(model: FrequencyModel, path: Path, metadata: Optional[Mapping[str, str]] = None) -> None:
    Path(path).write_text(dumps_model(model, metadata), encoding="utf-8")


def parse_header(lines: Iterable[str]) -> Dict[str, str]:
    meta: Dict[str, str] = {}
    for line in lines:
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if ":" in body:
            key, value = body.split(":", 1)
            meta[key.strip()] = value.strip()
    return meta


def loads_model(text: str, lexicon: Lexicon) -> Tuple[FrequencyModel, Dict[str, str]]:
    """Parse a persisted model; its lexicon digest must match ``lexicon``.

    Returns the model and the header metadata.
    """
    lines = text.splitlines()
    meta = parse_header(lines)
    if "grid" not in meta or "lexicon_digest" not in meta:
        raise ModelError("model file lacks grid/lexicon_digest header")
    if meta["lexicon_digest"] != lexicon.digest:
        raise LexiconMismatchError(
            f"model was built with lexicon {meta['lexicon_digest']}, "
            f"configured lexicon is {lexicon.digest}"
        )
    model = FrequencyModel(GridSpec.parse(meta["grid"]), lexicon)
    body = [line for line in lines if not line.startswith("#")]
    reader = csv.reader(body)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ModelError(f"unexpected model header {header!r}")
    for rec in reader:
        col, row, concept, variant, count, total = rec
        if not lexicon.has_variant(concept, variant):
            raise LexiconMismatchError(f"model row names unknown variant ({concept!r}, {variant!r})")
        cell = CellId(int(col), int(row))
        model.counts[(cell, concept, variant)] = int(count)
        model.tweet_totals[(cell, concept)] = int(total)
    return model, meta


def read_model(path: Path, lexicon: Lexicon) -> Tuple[FrequencyModel, Dict[str, str]]:
    return loads_model(Path(path).read_text(encoding="utf-8"), lexicon)

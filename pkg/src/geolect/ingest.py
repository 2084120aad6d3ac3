"""Corpus ingestion: JSONL parsing, language filtering, tokenization and keyword matching."""

from __future__ import annotations

import gzip
import json
import logging
import math
import unicodedata
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .freqmodel import FrequencyModel
from .grid import GridSpec, cell_of
from .lexicon import Lexicon, fold_accents

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "lon", "lat", "text", "lang", "lang_prob")
ERROR_KINDS = ("malformed_json", "missing_field", "bad_type", "out_of_range")
_URL_PREFIXES = ("http://", "https://", "www.")


class RecordError(ValueError):
    """A corpus line that cannot be used. ``kind`` is one of ERROR_KINDS."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class TweetRecord:
    id: str
    lon: float
    lat: float
    text: str
    lang: str
    lang_prob: float


@dataclass(frozen=True)
class MatchEvent:
    tweet_id: str
    lon: float
    lat: float
    concept_id: str
    variant_id: str


def _number(obj: dict, key: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RecordError("bad_type", f"{key} must be a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise RecordError("out_of_range", f"{key} is not finite")
    return value


def parse_record(line: str) -> TweetRecord:
    """Parse and validate one JSONL line.

    Raises:
        RecordError: malformed JSON, a missing or mistyped field, or a
            coordinate / probability outside its range.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordError("malformed_json", str(exc)) from None
    if not isinstance(obj, dict):
        raise RecordError("malformed_json", "record is not a JSON object")
    missing = [k for k in REQUIRED_FIELDS if k not in obj or obj[k] is None]
    if missing:
        raise RecordError("missing_field", f"missing field(s): {', '.join(missing)}")

    tid = obj["id"]
    if isinstance(tid, bool) or not isinstance(tid, (str, int)):
        raise RecordError("bad_type", "id must be a string or integer")
    for key in ("text", "lang"):
        if not isinstance(obj[key], str):
            raise RecordError("bad_type", f"{key} must be a string")
    lon, lat, prob = _number(obj, "lon"), _number(obj, "lat"), _number(obj, "lang_prob")
    if not -180.0 <= lon <= 180.0:
        raise RecordError("out_of_range", f"lon {lon} outside [-180, 180]")
    if not -90.0 <= lat <= 90.0:
        raise RecordError("out_of_range", f"lat {lat} outside [-90, 90]")
    if not 0.0 <= prob <= 1.0:
        raise RecordError("out_of_range", f"lang_prob {prob} outside [0, 1]")
    return TweetRecord(str(tid), lon, lat, obj["text"], obj["lang"], prob)


def passes_language_filter(record: TweetRecord, lang: str = "es", min_prob: float = 0.6,
                           strict: bool = True) -> bool:
    """Language code must match and the detector confidence exceed ``min_prob``.

    ``strict=False`` switches the comparison to ``>=``.
    """
    if record.lang != lang:
        return False
    return record.lang_prob > min_prob if strict else record.lang_prob >= min_prob


def _strip_edges(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def _skip_leading_punct(token: str) -> str:
    for i, ch in enumerate(token):
        if ch.isalnum() or ch in "#@":
            return token[i:]
    return ""


def tokenize(text: str, accent_fold: bool = False) -> List[str]:
    """Split a post into lowercase NFC word tokens.

    Hashtags, at-mentions and URLs are removed outright; punctuation, emoji
    and other symbols are stripped from token edges, and tokens left empty
    are dropped. Interior characters (accents, ``ñ``, hyphens) are kept.
    """
    tokens = []
    for raw in unicodedata.normalize("NFC", text).split():
        lead = _skip_leading_punct(raw)
        if lead.startswith(("#", "@")) or lead.lower().startswith(_URL_PREFIXES):
            continue
        tok = _strip_edges(raw)
        if not tok:
            continue
        tok = unicodedata.normalize("NFC", tok.lower())
        if accent_fold:
            tok = fold_accents(tok)
        tokens.append(tok)
    return tokens


def scan_matches(tokens: Sequence[str], lexicon: Lexicon) -> Set[Tuple[str, str]]:
    """Greedy longest-match-first phrase scan, left to right.

    Tokens consumed by a match are not reused; the result holds each
    ``(concept_id, variant_id)`` at most once.
    """
    index = lexicon.phrase_index
    found: Set[Tuple[str, str]] = set()
    n = len(tokens)
    i = 0
    while i < n:
        for width in range(min(lexicon.max_phrase_len, n - i), 0, -1):
            hit = index.get(tuple(tokens[i:i + width]))
            if hit is not None:
                found.add(hit)
                i += width
                break
        else:
            i += 1
    return found


def match_events(record: TweetRecord, lexicon: Lexicon) -> List[MatchEvent]:
    matches = scan_matches(tokenize(record.text, lexicon.accent_fold), lexicon)
    return [MatchEvent(record.id, record.lon, record.lat, c, v) for c, v in sorted(matches)]


# -- streaming pipeline -------------------------------------------------------------


@dataclass
class IngestSettings:
    lang: str = "es"
    min_prob: float = 0.6
    strict: bool = True


@dataclass
class SkipReport:
    """Per-run tallies. ``errors`` counts unusable records by error kind."""

    total_read: int = 0
    errors: Dict[str, int] = field(default_factory=lambda: {k: 0 for k in ERROR_KINDS})
    filtered_language: int = 0
    kept: int = 0
    out_of_grid: int = 0
    matched: int = 0
    match_events: int = 0

    @property
    def skipped(self) -> int:
        return sum(self.errors.values())

    def merge(self, other: "SkipReport") -> None:
        self.total_read += other.total_read
        for k, n in other.errors.items():
            self.errors[k] = self.errors.get(k, 0) + n
        self.filtered_language += other.filtered_language
        self.kept += other.kept
        self.out_of_grid += other.out_of_grid
        self.matched += other.matched
        self.match_events += other.match_events

    def to_dict(self) -> dict:
        return {
            "total_read": self.total_read,
            "skipped": self.skipped,
            "errors": dict(self.errors),
            "filtered_language": self.filtered_language,
            "kept": self.kept,
            "out_of_grid": self.out_of_grid,
            "matched": self.matched,
            "match_events": self.match_events,
        }


def open_corpus(path: Path):
    """Open a JSONL file for text reading; gzip is detected from the magic bytes."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def iter_lines(paths: Iterable[Path]) -> Iterator[str]:
    for path in paths:
        with open_corpus(path) as fh:
            for line in fh:
                if line.strip():
                    yield line


def process_lines(lines: Iterable[str], lexicon: Lexicon, spec: GridSpec,
                  settings: IngestSettings) -> Tuple[FrequencyModel, SkipReport]:
    """Single-shard worker: parse, filter, match and count."""
    model = FrequencyModel(spec, lexicon)
    report = SkipReport()
    for line in lines:
        report.total_read += 1
        try:
            record = parse_record(line)
        except RecordError as exc:
            report.errors[exc.kind] += 1
            continue
        if not passes_language_filter(record, settings.lang, settings.min_prob, settings.strict):
            report.filtered_language += 1
            continue
        report.kept += 1
        if cell_of(spec, record.lon, record.lat) is None:
            report.out_of_grid += 1
            continue
        events = match_events(record, lexicon)
        if events:
            report.matched += 1
            report.match_events += len(events)
            # one call per record: duplicate ids across records are separate tweets
            model.add_events(events)
    return model, report


_WORKER_STATE: dict = {}


def _init_worker(lexicon: Lexicon, spec: GridSpec, settings: IngestSettings) -> None:
    _WORKER_STATE.update(lexicon=lexicon, spec=spec, settings=settings)


def _process_batch(lines: List[str]):
    model, report = process_lines(lines, _WORKER_STATE["lexicon"], _WORKER_STATE["spec"],
                                  _WORKER_STATE["settings"])
    return model.counts, model.tweet_totals, report


def _batches(lines: Iterator[str], size: int) -> Iterator[List[str]]:
    while True:
        batch = list(islice(lines, size))
        if not batch:
            return
        yield batch


def run_ingest(paths: Sequence[Path], lexicon: Lexicon, spec: GridSpec,
               settings: Optional[IngestSettings] = None, workers: int = 1,
               batch_size: int = 5000) -> Tuple[FrequencyModel, SkipReport]:
    """Ingest corpus files into a frequency model.

    With ``workers > 1`` line batches are farmed out to a process pool and
    the partial counts merged by addition; the result does not depend on
    the worker count or batch size.
    """
    settings = settings or IngestSettings()
    if workers <= 1:
        return process_lines(iter_lines(paths), lexicon, spec, settings)

    model = FrequencyModel(spec, lexicon)
    report = SkipReport()
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(lexicon, spec, settings)) as pool:
        for counts, totals, part in pool.map(_process_batch, _batches(iter_lines(paths), batch_size)):
            model.counts.update(counts)
            model.tweet_totals.update(totals)
            report.merge(part)
    logger.info("ingested %d records with %d workers", report.total_read, workers)
    return model, report

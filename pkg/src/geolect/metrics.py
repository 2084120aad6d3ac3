"""Lexical distances between cells: cosine, Kullback-Leibler, Jensen-Shannon.

All logarithms are base 2, so the Jensen-Shannon distance lies in [0, 1]
and reaches 1 exactly for distributions with disjoint support.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .freqmodel import FrequencyModel, FrequencyVector, frequency_vector
from .grid import CellId

VectorLike = Union[FrequencyVector, Sequence[float], np.ndarray]


class MetricDomainError(ValueError):
    """Inputs for which a metric is undefined (zero vector, infinite divergence)."""


class MetricKind(enum.Enum):
    COSINE = "cosine"
    JENSEN_SHANNON = "jsd"

    @classmethod
    def parse(cls, text: Union[str, "MetricKind"]) -> "MetricKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        aliases = {"cosine": cls.COSINE, "cos": cls.COSINE, "jsd": cls.JENSEN_SHANNON,
                   "jensen-shannon": cls.JENSEN_SHANNON, "js": cls.JENSEN_SHANNON}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown metric {text!r}; expected 'cosine' or 'jsd'") from None


@dataclass(frozen=True)
class ConceptDistance:
    concept_id: str
    value: float


def _as_array(x: VectorLike) -> np.ndarray:
    if isinstance(x, FrequencyVector):
        return x.values
    return np.asarray(x, dtype=np.float64)


def _check_pair(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape != v.shape or u.ndim != 1:
        raise MetricDomainError(f"vectors must be 1-d and equally long, got {u.shape} and {v.shape}")
    if np.any(u < 0) or np.any(v < 0):
        raise MetricDomainError("frequency vectors must be non-negative")


def cosine_distance(u: VectorLike, v: VectorLike) -> float:
    """``1 - u.v / (|u||v|)``, clamped to [0, 1] against rounding.

    Scale-invariant, so raw counts and relative frequencies give the same value.
    """
    u, v = _as_array(u), _as_array(v)
    _check_pair(u, v)
    norm = math.sqrt(float(np.dot(u, u))) * math.sqrt(float(np.dot(v, v)))
    if norm == 0.0:
        raise MetricDomainError("cosine distance is undefined for a zero vector")
    d = 1.0 - float(np.dot(u, v)) / norm
    return min(1.0, max(0.0, d))


def _kl_terms(p: np.ndarray, q: np.ndarray) -> float:
    total = 0.0
    for pi, qi in zip(p.tolist(), q.tolist()):
        if pi > 0.0:
            if qi <= 0.0:
                raise MetricDomainError("KL divergence is infinite: P(i) > 0 where Q(i) = 0")
            total += pi * math.log2(pi / qi)
    return total


def kl_divergence(p: VectorLike, q: VectorLike) -> float:
    """``sum_i P(i) log2(P(i)/Q(i))`` with ``0 log(0/q) = 0``."""
    p, q = _as_array(p), _as_array(q)
    _check_pair(p, q)
    return _kl_terms(p, q)


def jensen_shannon_distance(p: VectorLike, q: VectorLike) -> float:
    """Square root of the symmetrized KL divergence to the midpoint ``M = (P+Q)/2``."""
    p, q = _as_array(p), _as_array(q)
    _check_pair(p, q)
    m = (p + q) / 2.0
    js = (_kl_terms(p, m) + _kl_terms(q, m)) / 2.0
    # rounding can leave a tiny negative for P == Q
    return min(1.0, math.sqrt(max(js, 0.0)))


def metric_function(kind: MetricKind):
    return cosine_distance if kind is MetricKind.COSINE else jensen_shannon_distance


def concept_distance(model: FrequencyModel, a: CellId, b: CellId, concept_id: str,
                     kind: MetricKind) -> Optional[ConceptDistance]:
    """Distance between two cells for one concept; None if either cell lacks data."""
    u = frequency_vector(model, a, concept_id)
    if u is None:
        return None
    v = frequency_vector(model, b, concept_id)
    if v is None:
        return None
    return ConceptDistance(concept_id, metric_function(kind)(u, v))


def average_distance(model: FrequencyModel, a: CellId, b: CellId,
                     kind: MetricKind) -> Optional[Tuple[float, int]]:
    """Mean per-concept distance over the concepts both cells have data for.

    Returns ``(value, n_concepts)``, or None when the cells share no concept.
    """
    total = 0.0
    n = 0
    for concept_id in model.lexicon.concept_ids:
        d = concept_distance(model, a, b, concept_id, kind)
        if d is not None:
            total += d.value
            n += 1
    if n == 0:
        return None
    return total / n, n

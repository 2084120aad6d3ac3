"""Lexical dialectometry over a geographic grid from geotagged microblog posts."""

from .analysis import (
    ALL_CONCEPTS,
    DegenerateMatrixError,
    DistanceField,
    DistanceMatrix,
    MajorityMap,
    ReferenceSelection,
    build_distance_matrix,
    compare_fields,
    distance_field,
    majority_map,
    median_split_agreement,
    select_reference,
)
from .freqmodel import (
    FrequencyModel,
    FrequencyVector,
    accumulate,
    apply_threshold,
    frequency_vector,
    read_model,
    write_model,
)
from .grid import CellId, GridSpec, cell_bounds, cell_of
from .ingest import (
    MatchEvent,
    RecordError,
    TweetRecord,
    parse_record,
    passes_language_filter,
    run_ingest,
    scan_matches,
    tokenize,
)
from .lexicon import Concept, Lexicon, LexiconError, Variant, load_lexicon, lookup_phrase, read_lexicon
from .metrics import (
    ConceptDistance,
    MetricDomainError,
    MetricKind,
    average_distance,
    concept_distance,
    cosine_distance,
    jensen_shannon_distance,
    kl_divergence,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CONCEPTS",
    "DegenerateMatrixError",
    "DistanceField",
    "DistanceMatrix",
    "MajorityMap",
    "ReferenceSelection",
    "build_distance_matrix",
    "compare_fields",
    "distance_field",
    "majority_map",
    "median_split_agreement",
    "select_reference",
    "FrequencyModel",
    "FrequencyVector",
    "accumulate",
    "apply_threshold",
    "frequency_vector",
    "read_model",
    "write_model",
    "CellId",
    "GridSpec",
    "cell_bounds",
    "cell_of",
    "MatchEvent",
    "RecordError",
    "TweetRecord",
    "parse_record",
    "passes_language_filter",
    "run_ingest",
    "scan_matches",
    "tokenize",
    "Concept",
    "Lexicon",
    "LexiconError",
    "Variant",
    "load_lexicon",
    "lookup_phrase",
    "read_lexicon",
    "ConceptDistance",
    "MetricDomainError",
    "MetricKind",
    "average_distance",
    "concept_distance",
    "cosine_distance",
    "jensen_shannon_distance",
    "kl_divergence",
    "__version__",
]

"""Concept/variant keyword table: loading, validation and phrase lookup.

A lexicon file is UTF-8 text with one concept per line::

    swimming pool<TAB>alberca, pileta, piscina

Lines starting with ``#`` are comments. Keywords may be multi-word phrases;
they are lowercased and NFC-normalized at load time.
"""

from __future__ import annotations

import hashlib
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple


MAX_VARIANT_TOKENS = 5


class LexiconError(ValueError):
    """Raised when a lexicon source is malformed or inconsistent."""


def fold_accents(text: str) -> str:
    """Strip combining diacritics, keeping ``ñ`` (a distinct letter in Spanish)."""
    out = []
    for ch in unicodedata.normalize("NFD", text):
        if unicodedata.category(ch) == "Mn":
            # keep the tilde only when it makes an n into ñ
            if ch == "\u0303" and out and out[-1] in "nN":
                out.append(ch)
            continue
        out.append(ch)
    return unicodedata.normalize("NFC", "".join(out))


def normalize_token(token: str, accent_fold: bool = False) -> str:
    token = unicodedata.normalize("NFC", unicodedata.normalize("NFC", token).lower())
    if accent_fold:
        token = fold_accents(token)
    return token


@dataclass(frozen=True)
class Variant:
    variant_id: str
    tokens: Tuple[str, ...]


@dataclass(frozen=True)
class Concept:
    concept_id: str
    variants: Tuple[Variant, ...]

    @property
    def variant_ids(self) -> List[str]:
        return [v.variant_id for v in self.variants]


@dataclass(frozen=True)
class Lexicon:
    """Immutable concept registry with an exact-sequence phrase index."""

    concepts: Tuple[Concept, ...]
    phrase_index: Dict[Tuple[str, ...], Tuple[str, str]] = field(repr=False)
    max_phrase_len: int
    accent_fold: bool = False

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {c.concept_id: c for c in self.concepts})

    def __len__(self) -> int:
        return len(self.concepts)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self._by_id

    def concept(self, concept_id: str) -> Concept:
        try:
            return self._by_id[concept_id]
        except KeyError:
            raise KeyError(f"unknown concept {concept_id!r}") from None

    @property
    def concept_ids(self) -> List[str]:
        return [c.concept_id for c in self.concepts]

    def has_variant(self, concept_id: str, variant_id: str) -> bool:
        concept = self._by_id.get(concept_id)
        return concept is not None and variant_id in concept.variant_ids

    def to_tsv(self) -> str:
        lines = []
        for c in self.concepts:
            lines.append(c.concept_id + "\t" + ", ".join(v.variant_id for v in c.variants))
        return "\n".join(lines) + "\n"

    @property
    def digest(self) -> str:
        """Content hash of the canonical (normalized) table."""
        return "sha256:" + hashlib.sha256(self.to_tsv().encode("utf-8")).hexdigest()


def _parse_keyword(raw: str, accent_fold: bool, lineno: int) -> Tuple[str, Tuple[str, ...]]:
    tokens = tuple(normalize_token(t, accent_fold) for t in raw.split())
    if not tokens:
        raise LexiconError(f"line {lineno}: empty keyword")
    if len(tokens) > MAX_VARIANT_TOKENS:
        raise LexiconError(
            f"line {lineno}: keyword {raw.strip()!r} has {len(tokens)} tokens "
            f"(max {MAX_VARIANT_TOKENS})"
        )
    return " ".join(tokens), tokens


def load_lexicon(source: str, accent_fold: bool = False) -> Lexicon:
    """Parse lexicon TSV text into a validated :class:`Lexicon`.

    Args:
        source: Full text of the lexicon file.
        accent_fold: Strip diacritics from every keyword (the tokenizer must
            be run with the same setting).

    Raises:
        LexiconError: on a malformed line, an empty keyword, a concept with
            fewer than two variants, a repeated concept id, or a phrase that
            appears twice (within or across concepts).
    """
    concepts: List[Concept] = []
    index: Dict[Tuple[str, ...], Tuple[str, str]] = {}
    for lineno, line in enumerate(source.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise LexiconError(f"line {lineno}: expected 'concept<TAB>keywords'")
        concept_id, keywords = line.split("\t", 1)
        concept_id = unicodedata.normalize("NFC", concept_id.strip())
        if not concept_id:
            raise LexiconError(f"line {lineno}: empty concept id")
        if any(c.concept_id == concept_id for c in concepts):
            raise LexiconError(f"line {lineno}: concept {concept_id!r} defined twice")

        variants: List[Variant] = []
        for raw in keywords.split(","):
            variant_id, tokens = _parse_keyword(raw, accent_fold, lineno)
            owner = index.get(tokens)
            if owner is not None:
                if owner[0] == concept_id:
                    raise LexiconError(
                        f"line {lineno}: keyword {variant_id!r} repeated in concept {concept_id!r}"
                    )
                raise LexiconError(
                    f"line {lineno}: keyword {variant_id!r} appears in both "
                    f"{owner[0]!r} and {concept_id!r}"
                )
            index[tokens] = (concept_id, variant_id)
            variants.append(Variant(variant_id, tokens))
        if len(variants) < 2:
            raise LexiconError(
                f"line {lineno}: concept {concept_id!r} needs at least 2 variants, got {len(variants)}"
            )
        concepts.append(Concept(concept_id, tuple(variants)))

    max_len = max((len(t) for t in index), default=0)
    return Lexicon(tuple(concepts), index, max_len, accent_fold)


def read_lexicon(path: Optional[Path] = None, accent_fold: bool = False) -> Lexicon:
    """Load a lexicon file, or the bundled table when ``path`` is None."""
    if path is None:
        text = resources.files("geolect.data").joinpath("lexicon.tsv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return load_lexicon(text, accent_fold=accent_fold)


def default_lexicon_path() -> Path:
    return Path(str(resources.files("geolect.data").joinpath("lexicon.tsv")))


def lookup_phrase(lexicon: Lexicon, tokens: Iterable[str]) -> Optional[Tuple[str, str]]:
    """Exact-sequence lookup; returns ``(concept_id, variant_id)`` or None."""
    return lexicon.phrase_index.get(tuple(tokens))

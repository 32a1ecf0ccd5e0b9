"""Tokenization, sentence spans, inverted indexing and candidate retrieval."""

from __future__ import annotations

import re
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .embedding import EmbeddingModel
from .mtm import SimilarityThresholds, translations_of

_TOKEN = re.compile(r"[^\W_]+")
# a terminator followed by whitespace, or a blank line
_BOUNDARY = re.compile(r"(?<=[.!?])\s+|\n[ \t\r\f\v]*\n\s*")


@dataclass(frozen=True)
class Token:
    surface: str
    offset: int
    length: int

    @property
    def end(self) -> int:
        return self.offset + self.length


def tokenize(text: str) -> list[Token]:
    return [Token(m.group().casefold(), m.start(), m.end() - m.start()) for m in _TOKEN.finditer(text)]


def segment_sentences(text: str) -> list[tuple[int, int]]:
    """Partition ``text`` into (offset, length) sentence spans.

    Each span keeps its trailing whitespace so the spans tile the text.
    Abbreviations such as "Mr." are split like any other terminator.
    """
    if not text:
        return []
    spans = []
    start = 0
    for m in _BOUNDARY.finditer(text):
        if m.end() >= len(text):
            break
        spans.append((start, m.end() - start))
        start = m.end()
    spans.append((start, len(text) - start))
    return spans


@dataclass
class Document:
    id: str
    text: str
    language: str = ""
    tokens: list[Token] = field(default_factory=list)
    sentences: list[tuple[int, int]] = field(default_factory=list)
    # token ordinal range [lo, hi) of every sentence
    sentence_tokens: list[tuple[int, int]] = field(default_factory=list)

    @classmethod
    def from_text(cls, id: str, text: str, language: str = "") -> "Document":
        doc = cls(id, text, language, tokenize(text), segment_sentences(text))
        doc._assign()
        return doc

    def _assign(self) -> None:
        starts = [off for off, _ in self.sentences]
        bounds = [0] * (len(self.sentences) + 1)
        for tok in self.tokens:
            bounds[bisect_right(starts, tok.offset)] += 1
        lo = 0
        self.sentence_tokens = []
        for i in range(len(self.sentences)):
            hi = lo + bounds[i + 1]
            self.sentence_tokens.append((lo, hi))
            lo = hi

    def sentence_of(self) -> list[int]:
        """Sentence index of every token ordinal."""
        out = []
        for i, (lo, hi) in enumerate(self.sentence_tokens):
            out.extend([i] * (hi - lo))
        return out

    def trimmed_sentence(self, i: int) -> tuple[int, int]:
        """Sentence ``i`` as (offset, end) with surrounding whitespace removed."""
        off, length = self.sentences[i]
        chunk = self.text[off:off + length]
        lead = len(chunk) - len(chunk.lstrip())
        return off + lead, off + len(chunk.rstrip())

    def with_tokens(self, tokens: list[Token]) -> "Document":
        return Document(self.id, self.text, self.language, tokens, self.sentences,
                        self.sentence_tokens)


def load_documents(directory: Path | str) -> tuple[list[Document], list[str]]:
    """Read every ``*.txt`` (or the files listed in ``manifest.tsv``).

    Returns ``(documents, warnings)``; unreadable files become warnings.
    """
    directory = Path(directory)
    entries: list[tuple[str, str, Path]] = []
    manifest = directory / "manifest.tsv"
    if manifest.exists():
        for lineno, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{manifest}:{lineno}: expected id<TAB>language<TAB>path")
            path = Path(parts[2])
            # relative paths resolve against the directory, then its parent
            if not path.is_absolute():
                path = directory / path if (directory / path).exists() else directory.parent / path
            entries.append((parts[0], parts[1], path))
    else:
        entries = [(p.stem, "", p) for p in sorted(directory.glob("*.txt"))]
    docs, warnings = [], []
    for doc_id, lang, path in entries:
        try:
            docs.append(Document.from_text(doc_id, path.read_text(encoding="utf-8"), lang))
        except (OSError, UnicodeDecodeError) as e:
            warnings.append(f"skipping {path}: {e}")
    return docs, warnings


# --------------------------------------------------------------------------
# inverted index


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[str, list[int]]]] = field(default_factory=dict)
    doc_lengths: dict[str, int] = field(default_factory=dict)

    def lookup(self, term: str) -> list[tuple[str, list[int]]]:
        return self.postings.get(term, [])

    def __len__(self) -> int:
        return len(self.postings)

    def to_json(self) -> dict:
        return {"docs": self.doc_lengths,
                "postings": {t: [[d, pos] for d, pos in plist] for t, plist in self.postings.items()}}


def index_documents(docs: Iterable[Document]) -> InvertedIndex:
    index = InvertedIndex()
    building: dict[str, dict[str, list[int]]] = {}
    for doc in docs:
        if doc.id in index.doc_lengths:
            raise ValueError(f"duplicate document id {doc.id!r}")
        index.doc_lengths[doc.id] = len(doc.tokens)
        for pos, tok in enumerate(doc.tokens):
            building.setdefault(tok.surface, {}).setdefault(doc.id, []).append(pos)
    index.postings = {term: sorted(by_doc.items()) for term, by_doc in building.items()}
    return index


# --------------------------------------------------------------------------
# query side


def extract_keywords(doc: Document, stoplist: set[str] = frozenset(), max_tf: int = 3) -> set[str]:
    """Words occurring at most ``max_tf`` times, stoplisted words removed first."""
    tf = Counter(t.surface for t in doc.tokens if t.surface not in stoplist)
    return {w for w, c in tf.items() if c <= max_tf}


def expand_query(keywords: Iterable[str], model: EmbeddingModel | None,
                 th: SimilarityThresholds) -> dict[str, set[str]]:
    out = {}
    for kw in keywords:
        terms = translations_of(model, kw, th) if model is not None else set()
        terms.add(kw)
        out[kw] = terms
    return out


@dataclass
class CandidateResult:
    doc_id: str
    matched: list[tuple[str, str, list[int]]]
    match_count: int


def retrieve_candidates(index: InvertedIndex, expanded: Mapping[str, set[str]],
                        min_matches: int = 5) -> list[CandidateResult]:
    """Source documents hit by expansions of at least ``min_matches`` keywords."""
    if min_matches < 1:
        raise ValueError("min_matches must be >= 1")
    pairs: dict[str, list[tuple[str, str, list[int]]]] = {}
    hit: dict[str, set[str]] = {}
    for kw in sorted(expanded):
        for term in sorted(expanded[kw]):
            for doc_id, positions in index.lookup(term):
                pairs.setdefault(doc_id, []).append((kw, term, positions))
                hit.setdefault(doc_id, set()).add(kw)
    results = [CandidateResult(d, pairs[d], len(hit[d])) for d in hit if len(hit[d]) >= min_matches]
    results.sort(key=lambda r: (-r.match_count, r.doc_id))
    return results

"""Translation plus monolingual analysis baseline.

Documents are first normalized word by word into the pivot language with the
lexicon. Overlapping 5-grams are hashed with MD5; sources sharing enough
fingerprints with a suspect are candidates, and matched chunks are grown to
whole text lines and merged into passages.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

from .alignment import PassagePair
from .lexicon import Lexicon
from .retrieval import Document, Token


@dataclass
class BaselineConfig:
    ngram: int = 5
    min_shared: int = 20
    max_gap_chunks: int = 50

    def __post_init__(self):
        if self.ngram < 1 or self.min_shared < 1 or self.max_gap_chunks < 0:
            raise ValueError("ngram and min_shared must be >= 1, max_gap_chunks >= 0")


@dataclass(frozen=True)
class Fingerprint:
    digest: bytes
    position: int
    offset: int
    length: int


def normalize_to_pivot(doc: Document, lexicon: Lexicon, reverse: dict[str, str] | None = None) -> Document:
    """Replace translations by their pivot word.

    Tokens keep their original character spans, which serve as the map back
    to the untranslated text.
    """
    if reverse is None:
        reverse = lexicon.reverse()
    pivots = lexicon.entries
    tokens = [t if t.surface in pivots or t.surface not in reverse
              else Token(reverse[t.surface], t.offset, t.length)
              for t in doc.tokens]
    return doc.with_tokens(tokens)


def ngram_digest(words: Sequence[str]) -> bytes:
    return hashlib.md5(" ".join(words).encode("utf-8")).digest()


def fingerprint(tokens: Sequence[Token], n: int = 5) -> list[Fingerprint]:
    out = []
    for i in range(len(tokens) - n + 1):
        window = tokens[i:i + n]
        out.append(Fingerprint(ngram_digest([t.surface for t in window]), i,
                               window[0].offset, window[-1].end - window[0].offset))
    return out


FingerprintIndex = dict[bytes, list[tuple[str, int]]]


def index_fingerprints(docs: Iterable[tuple[str, list[Fingerprint]]]) -> FingerprintIndex:
    index: FingerprintIndex = {}
    for doc_id, fps in docs:
        for fp in fps:
            index.setdefault(fp.digest, []).append((doc_id, fp.position))
    return index


def baseline_retrieve(index: FingerprintIndex, suspect: Sequence[Fingerprint],
                      cfg: BaselineConfig) -> list[tuple[str, list[tuple[int, int]]]]:
    """Sources sharing at least ``min_shared`` distinct fingerprints.

    Each result carries the matched (suspect position, source position) pairs.
    """
    shared: dict[str, set[bytes]] = {}
    pairs: dict[str, list[tuple[int, int]]] = {}
    for fp in suspect:
        for doc_id, pos in index.get(fp.digest, ()):
            shared.setdefault(doc_id, set()).add(fp.digest)
            pairs.setdefault(doc_id, []).append((fp.position, pos))
    hits = [(d, sorted(pairs[d])) for d in shared if len(shared[d]) >= cfg.min_shared]
    hits.sort(key=lambda h: (-len(shared[h[0]]), h[0]))
    return hits


def _line_bounds(text: str, lo: int, hi: int) -> tuple[int, int]:
    start = text.rfind("\n", 0, lo) + 1
    end = text.find("\n", max(hi - 1, lo))
    return start, len(text) if end < 0 else end


def baseline_merge(matches: Sequence[tuple[int, int]], suspect: Document, source: Document,
                   cfg: BaselineConfig) -> list[PassagePair]:
    """Merge matched chunks of one document pair into line-aligned passages.

    ``suspect`` and ``source`` are the normalized documents whose token spans
    point into the original texts.
    """
    # a chunk belongs to the line of its central token; otherwise a chunk
    # ending a copied line drags in the next line on a one-word coincidence
    mid = cfg.ngram // 2
    chains: list[list[int]] = []  # suspect pos lo/hi, source pos lo/hi
    for sp, tp in sorted(matches):
        if chains:
            c = chains[-1]
            if (sp - c[1] <= cfg.max_gap_chunks
                    and max(0, c[2] - tp, tp - c[3]) <= cfg.max_gap_chunks):
                c[1] = max(c[1], sp)
                c[2], c[3] = min(c[2], tp), max(c[3], tp)
                continue
        chains.append([sp, sp, tp, tp])
    out = []
    for s_lo, s_hi, t_lo, t_hi in chains:
        a, b = _line_bounds(suspect.text, suspect.tokens[s_lo + mid].offset,
                            suspect.tokens[s_hi + mid].end)
        c, d = _line_bounds(source.text, source.tokens[t_lo + mid].offset,
                            source.tokens[t_hi + mid].end)
        out.append([a, b, c, d])
    # chains grown to whole lines can now touch or overlap; fold those
    out.sort()
    merged: list[list[int]] = []
    for s in out:
        if merged and s[0] <= merged[-1][1] + 1 and max(s[2], merged[-1][2]) <= min(s[3], merged[-1][3]) + 1:
            m = merged[-1]
            m[1], m[2], m[3] = max(m[1], s[1]), min(m[2], s[2]), max(m[3], s[3])
        else:
            merged.append(s)
    return [PassagePair(a, b - a, c, d - c, suspect.id, source.id) for a, b, c, d in merged if b > a and d > c]


class Baseline:
    """Fingerprint index over normalized sources, queried one suspect at a time."""

    def __init__(self, sources: Iterable[Document], lexicon: Lexicon, cfg: BaselineConfig | None = None):
        self.cfg = cfg or BaselineConfig()
        self.lexicon = lexicon
        self._reverse = lexicon.reverse()
        self.sources = {d.id: normalize_to_pivot(d, lexicon, self._reverse) for d in sources}
        self.index = index_fingerprints(
            (d.id, fingerprint(d.tokens, self.cfg.ngram)) for d in self.sources.values())

    def detect(self, suspect: Document) -> list[PassagePair]:
        norm = normalize_to_pivot(suspect, self.lexicon, self._reverse)
        out = []
        for doc_id, matches in baseline_retrieve(self.index, fingerprint(norm.tokens, self.cfg.ngram), self.cfg):
            out.extend(baseline_merge(matches, norm, self.sources[doc_id], self.cfg))
        out.sort(key=lambda p: (p.suspect_offset, p.source_id, p.source_offset))
        return out

"""Sentence-level comparison and merging of sentence matches into passages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .embedding import EmbeddingModel
from .mtm import SimilarityThresholds, word_pair_similar
from .retrieval import CandidateResult, Document


@dataclass
class AlignmentConfig:
    sentence_tau: float = 0.4
    word_pair_tau: float = 0.97
    merge_gap_chars: int = 1000
    min_passage_chars: int = 150

    def __post_init__(self):
        if not 0 < self.sentence_tau <= 1:
            raise ValueError("sentence_tau must lie in (0, 1]")
        if self.word_pair_tau <= 0 or self.merge_gap_chars < 0 or self.min_passage_chars < 0:
            raise ValueError("thresholds must be positive")


@dataclass(frozen=True)
class SentenceMatch:
    suspect_offset: int
    suspect_length: int
    source_offset: int
    source_length: int
    score: float = 1.0


@dataclass(frozen=True, order=True)
class PassagePair:
    suspect_offset: int
    suspect_length: int
    source_offset: int
    source_length: int
    suspect_id: str = ""
    source_id: str = ""


# --------------------------------------------------------------------------
# sentence scores


def sentence_similarity_collection(suspect_tokens: range, source_tokens: range,
                                   pairs: Iterable[tuple[int, int]]) -> float:
    """Fraction of suspect-sentence tokens paired with a token of the source sentence.

    ``pairs`` holds (suspect ordinal, source ordinal) matches from retrieval.
    """
    if len(suspect_tokens) == 0:
        return 0.0
    hit = {s for s, t in pairs if s in suspect_tokens and t in source_tokens}
    return len(hit) / len(suspect_tokens)


def sentence_similarity_pairwise(suspect_words: Sequence[str], source_words: Sequence[str],
                                 model: EmbeddingModel, word_pair_tau: float) -> float:
    if not suspect_words:
        return 0.0
    th = SimilarityThresholds(word_pair_tau=word_pair_tau)
    matched = sum(1 for w in suspect_words
                  if any(word_pair_similar(model, w, v, th) for v in source_words))
    return matched / len(suspect_words)


def pairwise_score_matrix(suspect: Document, source: Document, model: EmbeddingModel,
                          word_pair_tau: float) -> np.ndarray:
    """Scores of every (suspect sentence, source sentence) pair at once.

    Equal to calling :func:`sentence_similarity_pairwise` on each pair.
    """
    index = model.vocab.index
    s_words = sorted({t.surface for t in suspect.tokens if t.surface in index})
    t_words = sorted({t.surface for t in source.tokens if t.surface in index})
    n_s, n_t = len(suspect.sentences), len(source.sentences)
    if not s_words or not t_words:
        return np.zeros((n_s, n_t))
    unit = model.unit_vectors
    su = unit[[index[w] for w in s_words]]
    tu = unit[[index[w] for w in t_words]]
    sim = (su @ tu.T) >= word_pair_tau
    t_col = {w: i for i, w in enumerate(t_words)}
    for i, w in enumerate(s_words):
        if w in t_col:
            sim[i, t_col[w]] = True
    # reach[j, u]: suspect word u matches some token of source sentence j
    reach = np.zeros((n_t, len(s_words)), dtype=bool)
    for j, (lo, hi) in enumerate(source.sentence_tokens):
        cols = [t_col[t.surface] for t in source.tokens[lo:hi] if t.surface in t_col]
        if cols:
            reach[j] = sim[:, cols].any(axis=1)
    s_col = {w: i for i, w in enumerate(s_words)}
    counts = np.zeros((n_s, len(s_words)))
    lengths = np.zeros(n_s)
    for i, (lo, hi) in enumerate(suspect.sentence_tokens):
        lengths[i] = hi - lo
        for t in suspect.tokens[lo:hi]:
            if t.surface in s_col:
                counts[i, s_col[t.surface]] += 1
    scores = counts @ reach.T.astype(float)
    return np.divide(scores, lengths[:, None], out=np.zeros_like(scores), where=lengths[:, None] > 0)


# --------------------------------------------------------------------------
# merging


def _gap(a_lo, a_hi, b_lo, b_hi) -> int:
    return max(0, max(a_lo, b_lo) - min(a_hi, b_hi))


def _merge_once(spans: list[list[int]], gap: int) -> list[list[int]]:
    spans = sorted(spans)
    out: list[list[int]] = []
    for s in spans:
        if out:
            cur = out[-1]
            if _gap(cur[0], cur[1], s[0], s[1]) <= gap and _gap(cur[2], cur[3], s[2], s[3]) <= gap:
                cur[0], cur[1] = min(cur[0], s[0]), max(cur[1], s[1])
                cur[2], cur[3] = min(cur[2], s[2]), max(cur[3], s[3])
                continue
        out.append(list(s))
    return out


def merge_passages(matches: Iterable, cfg: AlignmentConfig, suspect_id: str = "",
                   source_id: str = "") -> list[PassagePair]:
    """Chain-merge sentence matches (or passages) of one document pair.

    Neighbours merge when both their suspect-side and source-side gaps are
    within ``merge_gap_chars``. Passages shorter than ``min_passage_chars`` on
    the suspect side are dropped. Repeats until nothing changes.
    """
    spans = [[m.suspect_offset, m.suspect_offset + m.suspect_length,
              m.source_offset, m.source_offset + m.source_length] for m in matches]
    while True:
        merged = spans
        while True:
            nxt = _merge_once(merged, cfg.merge_gap_chars)
            if nxt == merged:
                break
            merged = nxt
        kept = [s for s in merged if s[1] - s[0] >= cfg.min_passage_chars]
        if kept == spans:
            break
        spans = kept
    return [PassagePair(a, b - a, c, d - c, suspect_id, source_id) for a, b, c, d in spans]


# --------------------------------------------------------------------------
# detection


def _best_matches(scores: np.ndarray, suspect: Document, source: Document,
                  tau: float) -> list[SentenceMatch]:
    out = []
    for i in range(scores.shape[0]):
        if scores.shape[1] == 0:
            break
        j = int(np.argmax(scores[i]))
        if scores[i, j] >= tau:
            s_lo, s_hi = suspect.trimmed_sentence(i)
            t_lo, t_hi = source.trimmed_sentence(j)
            out.append(SentenceMatch(s_lo, s_hi - s_lo, t_lo, t_hi - t_lo, float(scores[i, j])))
    return out


def detect_pairwise(suspect: Document, source: Document, model: EmbeddingModel,
                    cfg: AlignmentConfig) -> list[PassagePair]:
    scores = pairwise_score_matrix(suspect, source, model, cfg.word_pair_tau)
    matches = _best_matches(scores, suspect, source, cfg.sentence_tau)
    return merge_passages(matches, cfg, suspect.id, source.id)


def collection_score_matrix(suspect: Document, source: Document,
                            candidate: CandidateResult) -> np.ndarray:
    """Containment of every suspect sentence in every source sentence.

    Uses only the word pairs recorded during candidate retrieval.
    """
    positions: dict[str, list[int]] = {}
    for k, tok in enumerate(suspect.tokens):
        positions.setdefault(tok.surface, []).append(k)
    s_sent = suspect.sentence_of()
    t_sent = source.sentence_of()
    hits: dict[tuple[int, int], set[int]] = {}
    for query, _term, src_positions in candidate.matched:
        for sp in positions.get(query, ()):
            i = s_sent[sp]
            for tp in src_positions:
                hits.setdefault((i, t_sent[tp]), set()).add(sp)
    scores = np.zeros((len(suspect.sentences), len(source.sentences)))
    for (i, j), toks in hits.items():
        lo, hi = suspect.sentence_tokens[i]
        scores[i, j] = len(toks) / (hi - lo)
    return scores


def detect_collection(suspect: Document, candidates: Sequence[CandidateResult],
                      docs: Mapping[str, Document], cfg: AlignmentConfig) -> list[PassagePair]:
    out: list[PassagePair] = []
    for cand in candidates:
        source = docs[cand.doc_id]
        scores = collection_score_matrix(suspect, source, cand)
        matches = _best_matches(scores, suspect, source, cfg.sentence_tau)
        out.extend(merge_passages(matches, cfg, suspect.id, source.id))
    out.sort(key=lambda p: (p.suspect_offset, p.source_id, p.source_offset))
    return out

"""The trained embedding model used as an offline multilingual translator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingModel


class OOVError(KeyError):
    def __init__(self, word: str):
        super().__init__(word)
        self.word = word

    def __str__(self) -> str:
        return f"out-of-vocabulary word: {self.word!r}"


@dataclass
class SimilarityThresholds:
    word_pair_tau: float = 0.97
    expansion_k: int = 10
    expansion_min_score: float = 0.9

    def __post_init__(self):
        if not 0 < self.word_pair_tau <= 1:
            raise ValueError("word_pair_tau must lie in (0, 1]")
        if self.expansion_k < 1:
            raise ValueError("expansion_k must be positive")
        if not -1 <= self.expansion_min_score <= 1:
            raise ValueError("expansion_min_score must lie in [-1, 1]")


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("cosine undefined for a zero vector")
    # symmetric by construction: both products commute exactly
    return float(np.dot(u, v) / (nu * nv))


def top_k_neighbors(model: EmbeddingModel, word: str, k: int) -> list[tuple[str, float]]:
    """The ``k`` most cosine-similar words, best first, ties by word."""
    if k < 1:
        raise ValueError("k must be >= 1")
    idx = model.vocab.index.get(word)
    if idx is None:
        raise OOVError(word)
    unit = model.unit_vectors
    scores = unit @ unit[idx]
    scores[idx] = -np.inf
    n = len(scores) - 1
    if n <= 0:
        return []
    k = min(k, n)
    # scores holds n real values plus one -inf; the k-th largest sits at n + 1 - k
    cutoff = np.partition(scores, n + 1 - k)[n + 1 - k]
    cand = np.flatnonzero(scores >= cutoff)
    words = model.vocab.words
    ranked = sorted(cand.tolist(), key=lambda i: (-scores[i], words[i]))[:k]
    return [(words[i], float(scores[i])) for i in ranked]


def translations_of(model: EmbeddingModel, word: str, th: SimilarityThresholds) -> set[str]:
    if word not in model.vocab.index:
        return set()
    return {w for w, s in top_k_neighbors(model, word, th.expansion_k) if s >= th.expansion_min_score}


def word_pair_similar(model: EmbeddingModel, w1: str, w2: str, th: SimilarityThresholds) -> bool:
    index = model.vocab.index
    if w1 not in index or w2 not in index:
        return False
    if w1 == w2:
        return True
    unit = model.unit_vectors
    return float(unit[index[w1]] @ unit[index[w2]]) >= th.word_pair_tau

"""Translation lexicon ingestion, pivot selection and simulated corpora.

A context is an artificial sentence: a pivot word followed by one translation
per language. Replicating contexts many times gives the embedding trainer
enough co-occurrence evidence to place translations next to each other.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

import numpy as np


class LexiconFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class LexiconEntry:
    pivot: str
    translations: dict[str, list[str]] = field(default_factory=dict)

    def add(self, lang: str, word: str) -> None:
        words = self.translations.setdefault(lang, [])
        if word not in words:
            words.append(word)


@dataclass
class Lexicon:
    entries: dict[str, LexiconEntry] = field(default_factory=dict)
    languages: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, pivot: str) -> bool:
        return pivot in self.entries

    def add(self, pivot: str, lang: str, word: str) -> None:
        entry = self.entries.get(pivot)
        if entry is None:
            entry = self.entries[pivot] = LexiconEntry(pivot)
        entry.add(lang, word)
        if lang not in self.languages:
            self.languages.append(lang)

    def reverse(self) -> dict[str, str]:
        """Map every translation to its pivot; the smallest pivot wins ties."""
        out: dict[str, str] = {}
        for pivot in sorted(self.entries):
            for words in self.entries[pivot].translations.values():
                for w in words:
                    out.setdefault(w, pivot)
        return out


@dataclass
class PivotConfig:
    top_k: int = 25000
    exclude_top: int = 100

    def __post_init__(self):
        if self.top_k < 1 or self.exclude_top < 0:
            raise ValueError("top_k must be positive and exclude_top non-negative")
        if self.top_k <= self.exclude_top:
            raise ValueError(f"top_k ({self.top_k}) must exceed exclude_top ({self.exclude_top})")


@dataclass
class SimulationConfig:
    replicas: int = 100
    shuffle_tokens: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")


# --------------------------------------------------------------------------
# file formats


def _read_text(stream: TextIO | str) -> Iterator[str]:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for line in stream:
        yield line.rstrip("\r\n")


def parse_lexicon(stream: TextIO | str) -> Lexicon:
    """Parse ``pivot<TAB>lang<TAB>translation`` rows into a Lexicon."""
    lex = Lexicon()
    for lineno, line in enumerate(_read_text(stream), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise LexiconFormatError(lineno, f"expected 3 tab-separated fields, got {len(fields)}")
        pivot, lang, word = (f.strip().casefold() for f in fields)
        if not (pivot and lang and word):
            raise LexiconFormatError(lineno, "empty field")
        lex.add(pivot, lang, word)
    return lex


def format_lexicon(lex: Lexicon) -> str:
    rows = []
    for pivot, entry in lex.entries.items():
        for lang in lex.languages:
            for word in entry.translations.get(lang, ()):
                rows.append(f"{pivot}\t{lang}\t{word}\n")
    return "".join(rows)


FrequencyList = list[tuple[str, int]]


def sort_frequencies(pairs: Iterable[tuple[str, int]]) -> FrequencyList:
    return sorted(pairs, key=lambda p: (-p[1], p[0]))


def parse_frequencies(stream: TextIO | str) -> FrequencyList:
    counts: dict[str, int] = {}
    for lineno, line in enumerate(_read_text(stream), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise LexiconFormatError(lineno, "expected word<TAB>count")
        word = fields[0].strip().casefold()
        try:
            count = int(fields[1])
        except ValueError:
            raise LexiconFormatError(lineno, f"bad count {fields[1]!r}") from None
        if not word or count < 0:
            raise LexiconFormatError(lineno, "empty word or negative count")
        counts[word] = counts.get(word, 0) + count
    return sort_frequencies(counts.items())


def format_frequencies(freqs: FrequencyList) -> str:
    return "".join(f"{w}\t{c}\n" for w, c in freqs)


# --------------------------------------------------------------------------
# contexts


def select_pivots(freqs: FrequencyList, cfg: PivotConfig) -> list[str]:
    """Words at frequency ranks (exclude_top, top_k], in rank order."""
    if len(freqs) < cfg.top_k:
        raise ValueError(f"frequency list has only {len(freqs)} words, top_k={cfg.top_k}")
    return [w for w, _ in freqs[cfg.exclude_top:cfg.top_k]]


def stoplist(freqs: FrequencyList, cfg: PivotConfig) -> set[str]:
    return {w for w, _ in freqs[:cfg.exclude_top]}


def build_contexts(lexicon: Lexicon, pivots: Iterable[str]) -> tuple[list[list[str]], int]:
    """Build one context per pivot, plus one per alternative translation.

    Context ``j`` of a pivot takes the j-th translation of every language,
    falling back to the first translation where a language has fewer
    alternatives. Returns ``(contexts, skipped)`` where ``skipped`` counts
    pivots absent from the lexicon.
    """
    contexts: list[list[str]] = []
    skipped = 0
    for pivot in pivots:
        entry = lexicon.entries.get(pivot)
        if entry is None:
            skipped += 1
            continue
        lists = [entry.translations[lang] for lang in lexicon.languages if lang in entry.translations]
        if not lists:
            skipped += 1
            continue
        n_alt = max(len(words) for words in lists)
        for j in range(n_alt):
            contexts.append([pivot] + [words[min(j, len(words) - 1)] for words in lists])
    return contexts, skipped


def read_contexts(stream: TextIO | str) -> list[list[str]]:
    return [line.split() for line in _read_text(stream) if line.strip()]


def format_contexts(contexts: Iterable[Iterable[str]]) -> str:
    return "".join(" ".join(c) + "\n" for c in contexts)


# --------------------------------------------------------------------------
# corpus simulation


@dataclass
class SimulatedCorpus:
    """Replicated contexts, integer encoded.

    ``ids[offsets[i]:offsets[i + 1]]`` are the token ids of line ``i``;
    ``words[id]`` recovers the surface form.
    """

    words: list[str]
    ids: np.ndarray
    offsets: np.ndarray

    def __len__(self) -> int:
        return len(self.offsets) - 1

    def line(self, i: int) -> list[str]:
        return [self.words[t] for t in self.ids[self.offsets[i]:self.offsets[i + 1]]]

    def lines(self) -> Iterator[list[str]]:
        for i in range(len(self)):
            yield self.line(i)

    @classmethod
    def from_lines(cls, lines: Iterable[Iterable[str]]) -> "SimulatedCorpus":
        index: dict[str, int] = {}
        ids: list[int] = []
        offsets = [0]
        for line in lines:
            for tok in line:
                ids.append(index.setdefault(tok, len(index)))
            offsets.append(len(ids))
        return cls(list(index), np.asarray(ids, dtype=np.int32), np.asarray(offsets, dtype=np.int64))

    def write(self, fh: TextIO) -> None:
        for line in self.lines():
            fh.write(" ".join(line) + "\n")


def simulate_corpus(contexts: list[list[str]], cfg: SimulationConfig) -> SimulatedCorpus:
    """Replicate every context ``cfg.replicas`` times.

    Each replica optionally gets an independent token permutation; all lines
    are then put in one seeded global order.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    base = SimulatedCorpus.from_lines(contexts)
    n = cfg.replicas
    lengths = np.diff(base.offsets)
    # group contexts by length so permutations are drawn row-wise in bulk
    blocks: list[np.ndarray] = []
    for length in np.unique(lengths):
        members = np.flatnonzero(lengths == length)
        rows = np.stack([base.ids[base.offsets[i]:base.offsets[i + 1]] for i in members])
        rows = np.repeat(rows, n, axis=0)
        if cfg.shuffle_tokens and length > 1:
            perm = np.argsort(rng.random(rows.shape), axis=1, kind="stable")
            rows = np.take_along_axis(rows, perm, axis=1)
        blocks.append(rows)
    if not blocks:
        return SimulatedCorpus(base.words, np.zeros(0, np.int32), np.zeros(1, np.int64))
    width = int(lengths.max())
    padded = np.concatenate(
        [np.pad(b, ((0, 0), (0, width - b.shape[1])), constant_values=-1) for b in blocks])
    padded = padded[rng.permutation(len(padded))]
    line_lengths = (padded >= 0).sum(axis=1)
    ids = padded[padded >= 0].astype(np.int32)
    offsets = np.concatenate([[0], np.cumsum(line_lengths)]).astype(np.int64)
    return SimulatedCorpus(base.words, ids, offsets)

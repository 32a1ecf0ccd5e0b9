"""Synthetic lexicons and plagiarism corpora with exact gold annotations.

Words are pronounceable pseudo-words, unique across all languages so that no
cross-language homographs arise. Synonyms are modelled as groups of pivot
words sharing one translation set: rendering into a source language collapses
a group, and translating back yields the group's canonical (smallest) pivot,
which is also what lexicon normalization produces. Paraphrase swaps a
canonical pivot for another member of its group.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lexicon import FrequencyList, Lexicon, format_frequencies, format_lexicon
from .metrics import Case, CharRegion, write_annotations

PIVOT_LANGUAGE = "en"
DEFAULT_LANGUAGES = ("fr", "de", "es", "da")

_ONSETS = ["b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v",
           "w", "z", "br", "ch", "dr", "fl", "gr", "kl", "pr", "sk", "st", "tr", "sh", "th"]
_VOWELS = ["a", "e", "i", "o", "u", "ai", "ea", "ou", "ie", "oa"]
_CODAS = ["", "", "", "n", "r", "s", "l", "m", "t", "k"]


def _pseudo_words(rng: np.random.Generator, n: int, taken: set[str]) -> list[str]:
    out = []
    while len(out) < n:
        syl = int(rng.integers(2, 4))
        w = "".join(_ONSETS[rng.integers(len(_ONSETS))] + _VOWELS[rng.integers(len(_VOWELS))]
                    for _ in range(syl)) + _CODAS[rng.integers(len(_CODAS))]
        if w not in taken:
            taken.add(w)
            out.append(w)
    return out


@dataclass
class LexiconSpec:
    n_pivots: int = 1000
    n_stop: int = 100
    languages: tuple[str, ...] = DEFAULT_LANGUAGES
    synonym_pairs: int = 0
    alt_fraction: float = 0.0
    seed: int = 0


def make_lexicon(spec: LexiconSpec) -> tuple[Lexicon, FrequencyList, list[tuple[str, str]]]:
    """Generate a lexicon, a frequency list and the planted synonym pairs.

    The first ``n_stop`` ranks of the frequency list are function words;
    content pivots follow. ``synonym_pairs`` pairs of content pivots share
    identical translation sets. A fraction ``alt_fraction`` of the remaining
    pivots get a second translation in every language.
    """
    rng = np.random.default_rng(spec.seed)
    taken: set[str] = set()
    total = spec.n_stop + spec.n_pivots
    pivots = _pseudo_words(rng, total, taken)
    if 2 * spec.synonym_pairs > spec.n_pivots:
        raise ValueError("too many synonym pairs for the number of pivots")
    lex = Lexicon()
    content = pivots[spec.n_stop:]
    pair_idx = rng.permutation(spec.n_pivots)[:2 * spec.synonym_pairs]
    partner: dict[int, int] = {}
    pairs = []
    for a, b in zip(pair_idx[0::2], pair_idx[1::2]):
        a, b = int(a), int(b)
        partner[b] = a
        pairs.append(tuple(sorted((content[a], content[b]))))
    for i, pivot in enumerate(pivots):
        ci = i - spec.n_stop
        if ci in partner:
            continue
        n_alt = 2 if ci >= 0 and rng.random() < spec.alt_fraction else 1
        for lang in spec.languages:
            for word in _pseudo_words(rng, n_alt, taken):
                lex.add(pivot, lang, word)
    for b, a in partner.items():
        src = lex.entries[content[a]]
        for lang in spec.languages:
            for word in src.translations[lang]:
                lex.add(content[b], lang, word)
    # keep entry order equal to frequency rank order
    lex.entries = {p: lex.entries[p] for p in pivots}
    counts = np.sort(rng.integers(10, 10_000_000, size=total))[::-1]
    counts = counts + np.arange(total)[::-1]  # strictly decreasing
    freqs = [(p, int(c)) for p, c in zip(pivots, counts)]
    return lex, freqs, pairs


# --------------------------------------------------------------------------
# corpus


@dataclass
class CorpusSpec:
    n_sources: int = 200
    n_suspects: int = 50
    n_cases: int = 100
    substitution: float = 0.0
    paragraphs: int = 8
    sentences_per_paragraph: tuple[int, int] = (3, 5)
    words_per_sentence: tuple[int, int] = (8, 14)
    stop_fraction: float = 0.2
    passage_paragraphs: int = 1
    exclude_top: int = 100
    seed: int = 0


@dataclass
class SynthDocument:
    id: str
    language: str
    text: str


@dataclass
class SynthCorpus:
    sources: list[SynthDocument]
    suspects: list[SynthDocument]
    cases: dict[str, list[Case]]
    substituted: int = 0


def _sentence_pivots(rng, content, stop, spec: CorpusSpec) -> list[str]:
    n = int(rng.integers(spec.words_per_sentence[0], spec.words_per_sentence[1] + 1))
    out = []
    for _ in range(n):
        pool = stop if rng.random() < spec.stop_fraction else content
        out.append(pool[rng.integers(len(pool))])
    return out


def _render(words: list[list[str]]) -> str:
    sentences = []
    for sent in words:
        sentences.append(sent[0].capitalize() + (" " + " ".join(sent[1:]) if len(sent) > 1 else "") + ".")
    return " ".join(sentences)


def make_corpus(lexicon: Lexicon, freqs: FrequencyList, spec: CorpusSpec) -> SynthCorpus:
    """Generate sources, suspects and planted cases.

    Source documents are written in the lexicon's non-pivot languages, one
    paragraph per line. Each case copies ``passage_paragraphs`` consecutive
    paragraphs of a source, translates them word by word back into the pivot
    language and inserts them as whole lines into a suspect document.
    """
    if spec.passage_paragraphs > spec.paragraphs:
        raise ValueError(f"passage of {spec.passage_paragraphs} paragraphs exceeds "
                         f"documents of {spec.paragraphs}")
    if spec.n_cases and spec.n_suspects < 1:
        raise ValueError("cases need at least one suspect document")
    rng = np.random.default_rng(spec.seed)
    ranked = [w for w, _ in freqs if w in lexicon.entries]
    stop = ranked[:spec.exclude_top]
    content = ranked[spec.exclude_top:]
    if not content or not stop:
        raise ValueError("lexicon needs both function words and content pivots")
    reverse = lexicon.reverse()
    groups: dict[str, list[str]] = {}
    for pivot in content:
        canon = reverse[lexicon.entries[pivot].translations[lexicon.languages[0]][0]]
        groups.setdefault(canon, []).append(pivot)
    langs = list(lexicon.languages)

    def translate(pivot: str, lang: str) -> str:
        options = lexicon.entries[pivot].translations[lang]
        return options[rng.integers(len(options))]

    # sources: paragraphs of sentences, kept as token lists for back-translation
    sources = []
    source_paras: list[list[list[list[str]]]] = []
    for i in range(spec.n_sources):
        lang = langs[i % len(langs)]
        paras = []
        for _ in range(spec.paragraphs):
            n_sent = int(rng.integers(spec.sentences_per_paragraph[0], spec.sentences_per_paragraph[1] + 1))
            paras.append([[translate(p, lang) for p in _sentence_pivots(rng, content, stop, spec)]
                          for _ in range(n_sent)])
        source_paras.append(paras)
        sources.append(SynthDocument(f"source-document{i:05d}", lang, "\n".join(_render(p) for p in paras) + "\n"))

    # every case copies a distinct source passage
    per_source = spec.paragraphs // spec.passage_paragraphs
    slots_free = [(i, k * spec.passage_paragraphs) for i in range(spec.n_sources) for k in range(per_source)]
    plan: dict[int, list[tuple[int, int]]] = {s: [] for s in range(spec.n_suspects)}
    for c in range(spec.n_cases):
        s = c % spec.n_suspects
        used = {src for src, _ in plan[s]}
        choices = [k for k, (src, _) in enumerate(slots_free) if src not in used]
        if not choices:
            raise ValueError("not enough source passages for the requested cases")
        plan[s].append(slots_free.pop(choices[rng.integers(len(choices))]))

    suspects = []
    cases: dict[str, list[Case]] = {}
    substituted = 0
    for s in range(spec.n_suspects):
        sid = f"suspicious-document{s:05d}"
        own = []
        for _ in range(spec.paragraphs):
            n_sent = int(rng.integers(spec.sentences_per_paragraph[0], spec.sentences_per_paragraph[1] + 1))
            own.append(_render([_sentence_pivots(rng, content, stop, spec) for _ in range(n_sent)]))
        slots = sorted(rng.choice(len(own) + 1, size=len(plan[s]), replace=True).tolist())
        inserts = []
        for src, start in plan[s]:
            paras = []
            for para in source_paras[src][start:start + spec.passage_paragraphs]:
                sent_out = []
                for sent in para:
                    back = []
                    for tok in sent:
                        pivot = reverse[tok]
                        group = groups.get(pivot, [pivot])
                        if len(group) > 1 and rng.random() < spec.substitution:
                            pivot = group[1 + int(rng.integers(len(group) - 1))]
                            substituted += 1
                        back.append(pivot)
                    sent_out.append(back)
                paras.append(_render(sent_out))
            inserts.append((src, start, paras))
        lines: list[tuple[str, tuple | None]] = [(p, None) for p in own]
        for slot, ins in sorted(zip(slots, inserts), key=lambda t: t[0], reverse=True):
            lines[slot:slot] = [(p, ins if k == 0 else "cont") for k, p in enumerate(ins[2])]
        text_parts = []
        pos = 0
        doc_cases = []
        i = 0
        while i < len(lines):
            para, tag = lines[i]
            if isinstance(tag, tuple):
                src, start, paras = tag
                block = "\n".join(paras)
                src_doc = sources[src]
                src_lines = src_doc.text.split("\n")
                src_off = sum(len(l) + 1 for l in src_lines[:start])
                src_len = len("\n".join(src_lines[start:start + spec.passage_paragraphs]))
                doc_cases.append(Case(CharRegion(sid, pos, len(block)),
                                      CharRegion(src_doc.id, src_off, src_len)))
                text_parts.append(block)
                pos += len(block) + 1
                i += len(paras)
                continue
            text_parts.append(para)
            pos += len(para) + 1
            i += 1
        suspects.append(SynthDocument(sid, PIVOT_LANGUAGE, "\n".join(text_parts) + "\n"))
        cases[sid] = doc_cases
    return SynthCorpus(sources, suspects, cases, substituted)


def write_corpus(corpus: SynthCorpus, out: os.PathLike | str) -> None:
    """Write ``src/``, ``susp/``, ``gold/`` and the manifests under ``out``."""
    out = Path(out)
    for sub in ("src", "susp", "gold"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    manifest = []
    for doc in corpus.sources:
        path = out / "src" / f"{doc.id}.txt"
        path.write_text(doc.text, encoding="utf-8", newline="\n")
        manifest.append(f"{doc.id}\t{doc.language}\tsrc/{doc.id}.txt\n")
    (out / "src" / "manifest.tsv").write_text("".join(manifest), encoding="utf-8")
    pairs = []
    for doc in corpus.suspects:
        (out / "susp" / f"{doc.id}.txt").write_text(doc.text, encoding="utf-8", newline="\n")
        cases = corpus.cases.get(doc.id, [])
        (out / "gold" / f"{doc.id}.xml").write_text(
            write_annotations(doc.id, cases, name="plagiarism"), encoding="utf-8")
        for case in cases:
            pairs.append(f"susp/{doc.id}.txt\tsrc/{case.source.doc}.txt\n")
    (out / "pairs.tsv").write_text("".join(pairs), encoding="utf-8")


def write_lexicon_files(lexicon: Lexicon, freqs: FrequencyList, out: os.PathLike | str) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "lexicon.tsv").write_text(format_lexicon(lexicon), encoding="utf-8")
    (out / "freqs.tsv").write_text(format_frequencies(freqs), encoding="utf-8")


@dataclass
class ToyFixture:
    lexicon: Lexicon
    freqs: FrequencyList
    synonym_pairs: list[tuple[str, str]]
    pivots: list[str]
    contexts: list[list[str]]

    def context_sets(self) -> dict[str, set[str]]:
        """Every pivot's context members, the pivot itself excluded."""
        out: dict[str, set[str]] = {}
        for ctx in self.contexts:
            out.setdefault(ctx[0], set()).update(ctx[1:])
        return out


def toy_fixture(seed: int = 0, n_pivots: int = 200, synonym_pairs: int = 4,
                languages: tuple[str, ...] = DEFAULT_LANGUAGES) -> ToyFixture:
    """Small lexicon whose pivots all enter the model (100 excluded function words)."""
    from .lexicon import PivotConfig, build_contexts, select_pivots

    lex, freqs, pairs = make_lexicon(LexiconSpec(n_pivots=n_pivots, n_stop=100, languages=languages,
                                                 synonym_pairs=synonym_pairs, seed=seed))
    pivots = select_pivots(freqs, PivotConfig(top_k=len(freqs), exclude_top=100))
    contexts, _ = build_contexts(lex, pivots)
    return ToyFixture(lex, freqs, pairs, pivots, contexts)
